import os

os.environ.setdefault("OMP_WAIT_POLICY", "PASSIVE")
os.environ.setdefault("OPENBLAS_NUM_THREADS", "1")

import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(scope="session")
def small_checkpoint(tmp_path_factory):
    """A quickly trained small-grid checkpoint for service/CLI tests."""
    from cnnfd.datasets import generate_dataset
    from cnnfd.model import ArchitectureConfig, save_checkpoint, parameter_count
    from cnnfd.oracle import (GasProperties, OracleCoefficients,
                              default_compressor, oracle_config_dict)
    from cnnfd.training import TrainConfig, run_training

    gas = GasProperties()
    spec = default_compressor(gas)
    coeffs = OracleCoefficients()
    ds = generate_dataset(spec, gas, coeffs, 16, seed=5, n_radial=16,
                          n_tangential=16)
    arch = ArchitectureConfig(arch="cnnfd", grid=(24, 16, 16), depth=4,
                              channels=(6, 12, 24, 48, 96),
                              residual=True).validate()
    cfg = TrainConfig(batch_size=8, lr0=0.004, max_epochs=10,
                      scheduler_patience=4, early_stop_patience=9).validate()
    run = run_training(ds, arch, cfg, seed=0)
    path = tmp_path_factory.mktemp("ckpt") / "best.ckpt"
    save_checkpoint(path, run.model, arch, run.input_stats, run.output_stats,
                    extra_tensors={"output_reference": run.output_reference},
                    metadata={"seed": 0,
                              "oracle_config": oracle_config_dict(spec, coeffs, gas),
                              "oracle_hash": ds.oracle_hash,
                              "trainable_parameters": parameter_count(run.model)})
    return str(path)


def naive_conv3d(x, w, b=None, stride=(1, 1, 1), padding=(1, 1, 1)):
    """Direct seven-loop cross-correlation, the reference for the fast path."""
    n_s, ci, d, h, wd = x.shape
    co, _, kd, kh, kw = w.shape
    sd, sh, sw = stride
    pd, ph, pw = padding
    xp = np.pad(x.astype(np.float64), ((0, 0), (0, 0), (pd, pd), (ph, ph), (pw, pw)))
    do = (d + 2 * pd - kd) // sd + 1
    ho = (h + 2 * ph - kh) // sh + 1
    wo = (wd + 2 * pw - kw) // sw + 1
    out = np.zeros((n_s, co, do, ho, wo))
    for n in range(n_s):
        for o in range(co):
            for z in range(do):
                for y in range(ho):
                    for t in range(wo):
                        acc = 0.0
                        for c in range(ci):
                            for a in range(kd):
                                for bb in range(kh):
                                    for cc in range(kw):
                                        acc += (w[o, c, a, bb, cc]
                                                * xp[n, c, z * sd + a, y * sh + bb, t * sw + cc])
                        out[n, o, z, y, t] = acc
    if b is not None:
        out += b.reshape(1, -1, 1, 1, 1)
    return out


def central_diff_grad(f, x, eps=1e-4):
    """Central finite-difference gradient of scalar f at x (64-bit)."""
    x = x.astype(np.float64)
    g = np.zeros_like(x)
    flat = x.reshape(-1)
    gflat = g.reshape(-1)
    for i in range(flat.size):
        orig = flat[i]
        flat[i] = orig + eps
        fp = f(x)
        flat[i] = orig - eps
        fm = f(x)
        flat[i] = orig
        gflat[i] = (fp - fm) / (2 * eps)
    return g


def rel_err(a, b):
    denom = max(np.abs(a).max(), np.abs(b).max(), 1e-12)
    return np.abs(a - b).max() / denom
