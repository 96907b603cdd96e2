"""Report bundle: metrics JSON, profile CSV, and rendered figures.

The evaluate CLI drops everything into one directory: `metrics.json`,
`profiles.csv` (radial profiles of the worst case, truth vs prediction),
`samples.csv` (per-sample overall values) and PNG figures (parity plots,
contour triptych of the worst case, stage-wise bars, row-wise 1D curves).
"""

import json
import os

import matplotlib
import numpy as np

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from ..oracle.geometry import VARIABLES, plane_names  # noqa: E402
from .averaging import IDX, average_1d, massflow_average_circ  # noqa: E402
from .performance import stage_and_overall  # noqa: E402


def _parity_plot(ax, metrics, label):
    t, p = metrics.truth, metrics.pred
    ax.scatter(t, p, s=18, alpha=0.8)
    lo, hi = min(t.min(), p.min()), max(t.max(), p.max())
    pad = 0.05 * (hi - lo + 1e-12)
    ax.plot([lo - pad, hi + pad], [lo - pad, hi + pad], "k--", lw=0.8)
    r2 = "n/a" if metrics.r2 is None else f"{metrics.r2:.3f}"
    ax.set_xlabel(f"ground truth {label}")
    ax.set_ylabel(f"predicted {label}")
    ax.set_title(f"{label}: R$^2$={r2}")


def _contour_triptych(path, pred, truth, err, plane, var):
    v = IDX[var]
    fig, axes = plt.subplots(1, 3, figsize=(12, 3.6), constrained_layout=True)
    vmin = min(truth[v, plane].min(), pred[v, plane].min())
    vmax = max(truth[v, plane].max(), pred[v, plane].max())
    for ax, data, title, kw in (
            (axes[0], truth[v, plane], "ground truth", dict(vmin=vmin, vmax=vmax)),
            (axes[1], pred[v, plane], "prediction", dict(vmin=vmin, vmax=vmax)),
            (axes[2], 100 * err[v, plane], "error [% of baseline]", dict(cmap="RdBu_r"))):
        im = ax.imshow(data, origin="lower", aspect="auto",
                       extent=(0, 100, 0, 100), **kw)
        ax.set_title(title)
        ax.set_xlabel(r"$\theta$ [%]")
        ax.set_ylabel("span [%]")
        fig.colorbar(im, ax=ax, shrink=0.85)
    fig.suptitle(f"{var} at {plane_names()[plane]}")
    fig.savefig(path, dpi=110)
    plt.close(fig)


def write_report(outdir, result, pred_fields, truth_fields, grid, gas,
                 baseline, run_reports=None):
    """Render the full evaluation bundle into `outdir`."""
    os.makedirs(outdir, exist_ok=True)
    with open(os.path.join(outdir, "metrics.json"), "w") as f:
        json.dump(result.to_dict(), f, indent=1)

    with open(os.path.join(outdir, "samples.csv"), "w") as f:
        f.write("sample,truth_mdot,pred_mdot,truth_eta_p,pred_eta_p,"
                "truth_pr,pred_pr\n")
        for k, r in enumerate(result.per_sample):
            f.write(f"{k},{r['truth_mdot']:.6f},{r['pred_mdot']:.6f},"
                    f"{r['truth_eta_p']:.6f},{r['pred_eta_p']:.6f},"
                    f"{r['truth_pr']:.6f},{r['pred_pr']:.6f}\n")

    fig, axes = plt.subplots(1, 2, figsize=(9, 4), constrained_layout=True)
    _parity_plot(axes[0], result.targets["mdot"], "mass flow [kg/s]")
    _parity_plot(axes[1], result.targets["eta_p"], "polytropic efficiency")
    fig.savefig(os.path.join(outdir, "overall_parity.png"), dpi=110)
    plt.close(fig)

    worst = result.worst_index
    pred, truth = pred_fields[worst], truth_fields[worst]
    for plane in (2, 12, 21):
        _contour_triptych(
            os.path.join(outdir, f"contour_Vx_plane{plane:02d}.png"),
            pred, truth, result.worst_error_maps, plane, "Vx")

    prof_p = massflow_average_circ(pred, grid)
    prof_t = massflow_average_circ(truth, grid)
    spans = grid.span_fractions * 100
    with open(os.path.join(outdir, "profiles.csv"), "w") as f:
        f.write("plane,variable,span_pct,truth,pred\n")
        for plane in range(grid.n_planes):
            for var in VARIABLES:
                for i, s in enumerate(spans):
                    f.write(f"{plane},{var},{s:.3f},"
                            f"{prof_t[IDX[var], plane, i]:.6e},"
                            f"{prof_p[IDX[var], plane, i]:.6e}\n")

    fig, axes = plt.subplots(1, 3, figsize=(12, 4), constrained_layout=True)
    for ax, plane in zip(axes, (2, 12, 21)):
        ax.plot(prof_t[IDX["Vx"], plane], spans, label="truth")
        ax.plot(prof_p[IDX["Vx"], plane], spans, "--", label="prediction")
        ax.set_title(plane_names()[plane])
        ax.set_xlabel("Vx [m/s]")
        ax.set_ylabel("span [%]")
        ax.legend()
    fig.savefig(os.path.join(outdir, "radial_profiles.png"), dpi=110)
    plt.close(fig)

    bp = stage_and_overall(pred, grid, gas)
    bt = stage_and_overall(truth, grid, gas)
    stages = np.arange(1, 11)
    fig, axes = plt.subplots(1, 2, figsize=(10, 4), constrained_layout=True)
    width = 0.38
    for ax, attr, label in ((axes[0], "pr", "stage PR"),
                            (axes[1], "eta_p", "stage polytropic efficiency")):
        ax.bar(stages - width / 2, bt.stage_attr(attr), width, label="truth")
        ax.bar(stages + width / 2, bp.stage_attr(attr), width, label="prediction")
        ax.set_xlabel("stage")
        ax.set_title(label)
        ax.legend()
    fig.savefig(os.path.join(outdir, "stagewise.png"), dpi=110)
    plt.close(fig)

    avg_p, avg_t = average_1d(pred, grid), average_1d(truth, grid)
    fig, axes = plt.subplots(2, 2, figsize=(11, 7), constrained_layout=True)
    for ax, var in zip(axes.ravel(), ("Pt", "Tt", "Vx", "rho")):
        ax.plot(avg_t[IDX[var]], marker="o", ms=3, label="truth")
        ax.plot(avg_p[IDX[var]], marker="s", ms=3, ls="--", label="prediction")
        ax.set_title(f"{var} row-wise 1D average")
        ax.set_xlabel("plane")
        ax.legend()
    fig.savefig(os.path.join(outdir, "rowwise_1d.png"), dpi=110)
    plt.close(fig)

    if run_reports:
        fig, ax = plt.subplots(figsize=(6, 4), constrained_layout=True)
        for rep in run_reports:
            ax.semilogy(rep.curve("epoch"), rep.curve("train_loss"),
                        label=f"train (seed {rep.seed})")
            ax.semilogy(rep.curve("epoch"), rep.curve("val_loss"), "--",
                        label=f"validation (seed {rep.seed})")
        ax.set_xlabel("epoch")
        ax.set_ylabel("Huber loss")
        ax.legend(fontsize=7)
        fig.savefig(os.path.join(outdir, "training_curves.png"), dpi=110)
        plt.close(fig)

    return outdir
