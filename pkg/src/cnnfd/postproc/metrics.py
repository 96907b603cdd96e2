"""Prediction-quality metrics on derived overall quantities.

R^2 and MAE are computed on the overall mass flow and polytropic efficiency
derived from predicted versus ground-truth flow fields; MAE is reported as
a percentage of the baseline value and the dataset spread as a percentage
range.  The worst sample (largest efficiency error) is singled out together
with its per-node error maps for contour reporting.
"""

from dataclasses import dataclass

import numpy as np

from ..oracle.geometry import VARIABLES
from .averaging import IDX
from .performance import stage_and_overall


def r_squared(truth, pred):
    """Coefficient of determination; None when the truth set has no variance."""
    truth = np.asarray(truth, float)
    pred = np.asarray(pred, float)
    ss_tot = ((truth - truth.mean()) ** 2).sum()
    if ss_tot == 0.0:
        return None
    ss_res = ((truth - pred) ** 2).sum()
    return float(1.0 - ss_res / ss_tot)


@dataclass
class TargetMetrics:
    name: str
    r2: object
    mae: float
    mae_pct_of_baseline: float
    range_pct_of_baseline: float
    truth: np.ndarray
    pred: np.ndarray

    def to_dict(self):
        return {"name": self.name, "r2": self.r2, "mae": self.mae,
                "mae_pct_of_baseline": self.mae_pct_of_baseline,
                "range_pct_of_baseline": self.range_pct_of_baseline,
                "truth": self.truth.tolist(), "pred": self.pred.tolist()}


def _target_metrics(name, truth, pred, baseline_value):
    truth = np.asarray(truth, float)
    pred = np.asarray(pred, float)
    mae = float(np.abs(truth - pred).mean())
    return TargetMetrics(
        name=name, r2=r_squared(truth, pred), mae=mae,
        mae_pct_of_baseline=100.0 * mae / abs(baseline_value),
        range_pct_of_baseline=100.0 * (truth.max() - truth.min()) / abs(baseline_value),
        truth=truth, pred=pred)


def error_maps(pred_field, truth_field, baseline_averages):
    """Per-node error of `pred_field` relative to baseline 1D magnitudes.

    Velocity components can pass through zero, so every variable normalizes
    by a plane-wise baseline scale floored at 5% of the baseline axial
    velocity.
    """
    scale = np.abs(np.asarray(baseline_averages, float)).copy()
    floor = 0.05 * scale[IDX["Vx"]]
    scale = np.maximum(scale, floor[None, :])
    return (np.asarray(pred_field, float) - np.asarray(truth_field, float)) \
        / scale[:, :, None, None]


@dataclass
class EvaluationResult:
    targets: dict                 # name -> TargetMetrics
    worst_index: int
    worst_error_maps: np.ndarray  # (6, P, R, T)
    per_sample: list              # dicts with truth/pred overall values

    def to_dict(self):
        return {
            "targets": {k: v.to_dict() for k, v in self.targets.items()},
            "worst_index": self.worst_index,
            "per_sample": self.per_sample,
        }


def evaluate_predictions(pred_fields, truth_fields, grid, gas, baseline):
    """Metrics over matched prediction/truth field sets.

    `baseline` is the design-build PerformanceBreakdown used for relative
    reporting.
    """
    if len(pred_fields) != len(truth_fields):
        raise ValueError("prediction and truth sets differ in length")
    rows = []
    for pred, truth in zip(pred_fields, truth_fields):
        bp = stage_and_overall(pred, grid, gas)
        bt = stage_and_overall(truth, grid, gas)
        rows.append({"truth_mdot": bt.mdot, "pred_mdot": bp.mdot,
                     "truth_eta_p": bt.eta_p, "pred_eta_p": bp.eta_p,
                     "truth_pr": bt.pr, "pred_pr": bp.pr})
    targets = {
        "mdot": _target_metrics("mdot",
                                [r["truth_mdot"] for r in rows],
                                [r["pred_mdot"] for r in rows], baseline.mdot),
        "eta_p": _target_metrics("eta_p",
                                 [r["truth_eta_p"] for r in rows],
                                 [r["pred_eta_p"] for r in rows], baseline.eta_p),
    }
    eta_err = np.abs(targets["eta_p"].truth - targets["eta_p"].pred)
    worst = int(np.argmax(eta_err))
    maps = error_maps(pred_fields[worst], truth_fields[worst],
                      baseline.averages_1d)
    return EvaluationResult(targets=targets, worst_index=worst,
                            worst_error_maps=maps, per_sample=rows)


def variable_index(name):
    return VARIABLES.index(name)
