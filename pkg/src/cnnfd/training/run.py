"""Dataset-to-model orchestration: per-seed splits, normalization, training,
multi-seed statistics, and the architecture benchmark table."""

import time
from dataclasses import dataclass

import numpy as np

from ..datasets.normalize import compute_normalization, residual_normalization
from ..datasets.split import stratified_split
from ..features import assemble_batch
from ..model.build import build_model, parameter_count
from .loop import RunReport, train


@dataclass
class TrainedModel:
    model: object
    arch: object
    input_stats: object
    output_stats: object
    output_reference: np.ndarray
    split: object
    report: RunReport
    inputs: np.ndarray
    targets: np.ndarray

    def predict_fields(self, x):
        """Denormalized field predictions for normalized inputs x."""
        z = self.model.forward(x, train=False)
        out = self.output_stats.invert(z)
        if self.output_reference is not None:
            out = out + self.output_reference[None]
        return out


def prepare_inputs(dataset):
    """Assembled (n, 7, P, R, T) network inputs for every sample."""
    _, _, r, t = dataset.field_shape
    return assemble_batch(dataset.builds, r, t)


def run_training(dataset, arch, config, seed, inputs=None, log=None,
                 residual_targets=True):
    """Split, normalize on the training portion, fit one model.

    By default the network learns residuals against the training-mean
    field, which focuses the normalized targets on build-to-build
    variation (the static structure is carried by the stored reference).
    """
    if inputs is None:
        inputs = prepare_inputs(dataset)
    split = stratified_split(dataset.overall_eta_p, seed=seed)
    tr = split.indices("train")
    va = split.indices("validation")
    ho = split.indices("holdout")
    # geometry input channels and zero-swirl planes are constant by design
    in_stats = compute_normalization(inputs[tr], warn_degenerate=False)
    if residual_targets:
        ref, out_stats = residual_normalization(dataset.fields[tr])
        y = out_stats.apply(dataset.fields - ref[None])
    else:
        ref = None
        out_stats = compute_normalization(dataset.fields[tr],
                                          warn_degenerate=False)
        y = out_stats.apply(dataset.fields)
    x = in_stats.apply(inputs)
    model = build_model(arch, seed=seed)
    report = train(model, x, y, tr, va, config, seed, holdout_idx=ho, log=log)
    return TrainedModel(model=model, arch=arch, input_stats=in_stats,
                        output_stats=out_stats, output_reference=ref,
                        split=split, report=report, inputs=x, targets=y)


def summarize_losses(reports):
    """Mean and (unbiased) standard deviation of the per-seed losses."""
    out = {}
    for key, pick in (("train_loss", lambda r: r.final_train_loss),
                      ("val_loss", lambda r: r.best_val_loss),
                      ("holdout_loss", lambda r: r.holdout_loss)):
        vals = np.array([pick(r) for r in reports], float)
        vals = vals[np.isfinite(vals)]
        if len(vals) == 0:
            continue
        std = float(vals.std(ddof=1)) if len(vals) > 1 else 0.0
        out[key] = {"mean": float(vals.mean()), "std": std,
                    "per_seed": vals.tolist()}
    return out


def multi_seed(dataset, arch, config, seeds, inputs=None, log=None):
    """Train once per seed (seed drives split, shuffling, initialization)."""
    if len(seeds) < 1:
        raise ValueError("multi_seed needs at least one seed")
    if inputs is None:
        inputs = prepare_inputs(dataset)
    runs = [run_training(dataset, arch, config, s, inputs=inputs, log=log)
            for s in seeds]
    return runs, summarize_losses([r.report for r in runs])


def benchmark_models(dataset, configs, train_config, seed, inputs=None,
                     log=None):
    """Table comparing architectures under the same split/seed/budget."""
    if inputs is None:
        inputs = prepare_inputs(dataset)
    rows = []
    trained = {}
    for name, arch in configs.items():
        start = time.perf_counter()
        run = run_training(dataset, arch, train_config, seed, inputs=inputs,
                           log=log)
        wall = time.perf_counter() - start
        rows.append({
            "model": name,
            "trainable_parameters": parameter_count(run.model),
            "wall_time_s": wall,
            "train_loss": run.report.final_train_loss,
            "val_loss": run.report.best_val_loss,
        })
        trained[name] = run
    return rows, trained


def memorize(model, x, y, max_steps=2000, lr0=0.01, target=1e-4,
             plateau_patience=40, min_improvement=3e-3, huber_delta=1.0,
             log=None):
    """Full-batch capacity check: fit until the Huber loss drops below
    `target` (or the step budget runs out), halving the rate on plateaus.

    Returns (losses, steps_used); the target is met when losses[-1] < target.
    """
    from ..tensorcore import AdamWConfig, OptimizerState, adamw_step, huber_loss

    opt = OptimizerState(AdamWConfig(learning_rate=lr0, weight_decay=0.0))
    params = model.params()
    lr = lr0
    best = float("inf")
    since = 0
    losses = []
    for step in range(1, max_steps + 1):
        pred = model.forward(x, train=True)
        loss, grad = huber_loss(pred, y, huber_delta)
        model.backward(grad)
        adamw_step(params, opt, learning_rate=lr)
        losses.append(loss)
        if log and (step % 25 == 0 or loss < target):
            log(step, loss, lr)
        if loss < target:
            break
        if loss < best * (1 - min_improvement):
            best = loss
            since = 0
        else:
            since += 1
            if since >= plateau_patience:
                lr *= 0.5
                since = 0
    return losses, len(losses)
