"""Stage-wise and overall performance from plane-averaged states."""

from dataclasses import dataclass, field

import numpy as np

from ..errors import NumericError
from ..oracle.geometry import N_STAGES, stage_plane_bounds
from .averaging import IDX, average_1d, plane_massflow


def polytropic_efficiency(pr, tr, gamma):
    """Total-to-total polytropic efficiency ((g-1)/g) * ln PR / ln TR."""
    if pr <= 0.0:
        raise NumericError(f"polytropic_efficiency: PR must be positive, got {pr}")
    if abs(tr - 1.0) < 1e-12:
        if abs(pr - 1.0) < 1e-9:
            raise NumericError("polytropic_efficiency: zero-work stage")
        raise NumericError(
            f"polytropic_efficiency: undefined for TR=1 with PR={pr}")
    if tr < 1.0:
        raise NumericError(
            f"polytropic_efficiency: temperature ratio {tr} < 1 is not compression")
    return (gamma - 1.0) / gamma * np.log(pr) / np.log(tr)


@dataclass
class StagePerformance:
    stage: int
    pr: float
    eta_p: float
    flag: str = None


@dataclass
class PerformanceBreakdown:
    """Row-wise 1D averages, per-stage PR/eta_p, and overall quantities."""

    averages_1d: np.ndarray            # (6, P)
    stages: list                       # [StagePerformance] * 10
    mdot: float
    pr: float
    eta_p: float
    flag: str = None
    deltas: dict = field(default_factory=dict)

    def stage_attr(self, name):
        return np.array([getattr(s, name) for s in self.stages])

    def to_dict(self):
        return {
            "mdot": self.mdot, "pr": self.pr, "eta_p": self.eta_p,
            "stages": [{"stage": s.stage, "pr": s.pr, "eta_p": s.eta_p,
                        "flag": s.flag} for s in self.stages],
            "averages_1d": self.averages_1d.tolist(),
            "deltas": self.deltas,
        }

    @classmethod
    def from_dict(cls, d):
        return cls(averages_1d=np.asarray(d["averages_1d"], float),
                   stages=[StagePerformance(**s) for s in d["stages"]],
                   mdot=d["mdot"], pr=d["pr"], eta_p=d["eta_p"],
                   deltas=dict(d.get("deltas", {})))


def breakdown_deltas(current, baseline):
    """Deltas against a baseline: relative for mdot/PR, points for eta_p."""
    return {
        "mdot_pct": 100.0 * (current.mdot / baseline.mdot - 1.0),
        "pr_pct": 100.0 * (current.pr / baseline.pr - 1.0),
        "eta_p_pts": 100.0 * (current.eta_p - baseline.eta_p),
        "stage_pr_pct": [100.0 * (c.pr / b.pr - 1.0)
                         for c, b in zip(current.stages, baseline.stages)],
        "stage_eta_p_pts": [100.0 * (c.eta_p - b.eta_p)
                            for c, b in zip(current.stages, baseline.stages)],
    }


def stage_and_overall(field, grid, gas, baseline=None, averages=None,
                      mdot=None):
    """PerformanceBreakdown of a flow field (or precomputed 1D averages).

    Stage i spans the plane upstream of rotor i to the stator-i outlet;
    overall performance spans plane 0 to the last plane.
    """
    if averages is None:
        averages = average_1d(field, grid)
    if mdot is None:
        mdot = plane_massflow(field, grid, 0)
    pt = averages[IDX["Pt"]]
    tt = averages[IDX["Tt"]]
    stages = []
    for s in range(1, N_STAGES + 1):
        lo, hi = stage_plane_bounds(s)
        pr = pt[hi] / pt[lo]
        try:
            eta = float(polytropic_efficiency(pr, tt[hi] / tt[lo], gas.gamma))
            flag = None
        except NumericError as e:
            eta, flag = float("nan"), str(e)
        stages.append(StagePerformance(stage=s, pr=float(pr), eta_p=eta,
                                       flag=flag))
    pr_all = float(pt[-1] / pt[0])
    try:
        eta_all = float(polytropic_efficiency(pr_all, tt[-1] / tt[0], gas.gamma))
        flag_all = None
    except NumericError as e:
        eta_all, flag_all = float("nan"), str(e)
    out = PerformanceBreakdown(averages_1d=averages, stages=stages,
                               mdot=float(mdot), pr=pr_all, eta_p=eta_all,
                               flag=flag_all)
    if baseline is not None:
        out.deltas = breakdown_deltas(out, baseline)
    return out
