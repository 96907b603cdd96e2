"""CLI surfaces: determinism, exit codes, artifact layout."""

import hashlib
import json
import os
import subprocess
import sys

import pytest

CLI = [sys.executable, "-m", "cnnfd.cli"]


def run_cli(*args, check=True):
    proc = subprocess.run([*CLI, *args], capture_output=True, text=True,
                          env=dict(os.environ))
    if check and proc.returncode != 0:
        raise AssertionError(f"cnnfd {' '.join(args)} failed "
                             f"({proc.returncode}):\n{proc.stderr}")
    return proc


def digest(path):
    return hashlib.sha256(path.read_bytes()).hexdigest()


def test_generate_bit_reproducible(tmp_path):
    a = tmp_path / "a"
    b = tmp_path / "b"
    for out in (a, b):
        run_cli("generate", "--n", "4", "--seed", "1", "--grid", "8x8",
                "--out", str(out))
    assert digest(a / "fields.bin") == digest(b / "fields.bin")
    assert digest(a / "builds.bin") == digest(b / "builds.bin")
    assert digest(a / "manifest.json") == digest(b / "manifest.json")


def test_generate_respects_spec_file(tmp_path):
    out = tmp_path / "ds"
    run_cli("generate", "--spec", "spec.json", "--n", "3", "--seed", "2",
            "--grid", "8x8", "--out", str(out))
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["n_samples"] == 3
    assert len(manifest["row_names"]) == 22


def test_usage_error_exit_code():
    proc = run_cli("generate", "--n", "4", check=False)  # missing --out
    assert proc.returncode == 2


def test_data_error_exit_code(tmp_path):
    bad = tmp_path / "nonsense"
    bad.mkdir()
    (bad / "manifest.json").write_text("{}")
    proc = run_cli("train", "--data", str(bad), "--out",
                   str(tmp_path / "runs"), check=False)
    assert proc.returncode == 3
    assert "kind=data" in proc.stderr.splitlines()[-1]


def test_integrity_error_exit_code(tmp_path):
    out = tmp_path / "ds"
    run_cli("generate", "--n", "4", "--seed", "1", "--grid", "8x8",
            "--out", str(out))
    blob = out / "fields.bin"
    blob.write_bytes(blob.read_bytes()[:-4])
    proc = run_cli("train", "--data", str(out), "--out",
                   str(tmp_path / "runs"), check=False)
    assert proc.returncode == 3
    assert "checksum" in proc.stderr


def test_predict_design_build_zero_deltas(tmp_path, small_checkpoint):
    build = tmp_path / "build.json"
    build.write_text(json.dumps({"clearance": [1.0] * 22,
                                 "roughness": [1.6] * 22}))
    out = tmp_path / "pred.json"
    run_cli("predict", "--ckpt", small_checkpoint, "--build", str(build),
            "--out", str(out))
    pred = json.loads(out.read_text())
    for key in ("mdot_pct", "pr_pct", "eta_p_pts"):
        assert pred["deltas"][key] == pytest.approx(0.0, abs=1e-9)
    assert len(pred["stages"]) == 10


def test_predict_numeric_envelope_exit_code(tmp_path, small_checkpoint):
    build = tmp_path / "build.json"
    build.write_text(json.dumps({"clearance": [9.0] + [1.0] * 21,
                                 "roughness": [1.6] * 22}))
    proc = run_cli("predict", "--ckpt", small_checkpoint, "--build",
                   str(build), "--out", str(tmp_path / "p.json"), check=False)
    assert proc.returncode == 4
    assert "kind=numeric" in proc.stderr


def test_bench_reports_latency(small_checkpoint):
    proc = run_cli("bench", "--ckpt", small_checkpoint, "--n", "5")
    assert "p50=" in proc.stdout and "p95=" in proc.stdout
