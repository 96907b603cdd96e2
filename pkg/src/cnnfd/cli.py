"""Command-line entry points: generate, train, evaluate, predict, serve, bench.

Exit codes: 0 success, 2 usage error, 3 data/integrity error, 4 numeric
failure; failures print one machine-parsable line on stderr of the form
`cnnfd: error kind=<data|numeric> msg="..."`.
"""

import json
import os
import sys

import click

from . import apply_thread_cap
from .errors import ConfigError, DataError, NumericError


def _load_oracle(spec_path):
    from .oracle import (GasProperties, OracleCoefficients, default_compressor,
                         load_oracle_config)

    if spec_path:
        return load_oracle_config(spec_path)
    gas = GasProperties()
    return default_compressor(gas), OracleCoefficients(), gas


def _parse_grid(text):
    try:
        r, t = (int(v) for v in text.lower().split("x"))
        return r, t
    except ValueError as e:
        raise click.UsageError(f"--grid expects RxT, got {text!r}") from e


@click.group()
def cli():
    """Compressor flow-field surrogate toolkit."""
    apply_thread_cap()


@cli.command()
@click.option("--spec", "spec_path", type=click.Path(exists=True), default=None,
              help="Oracle spec JSON (defaults to the built-in machine).")
@click.option("--n", "n_samples", type=int, default=400, show_default=True)
@click.option("--seed", type=int, default=7, show_default=True)
@click.option("--grid", default="64x64", show_default=True,
              help="Radial x tangential resolution.")
@click.option("--out", "out_dir", type=click.Path(), required=True)
def generate(spec_path, n_samples, seed, grid, out_dir):
    """Sample builds by LHS and evaluate them through the synthetic oracle."""
    from .datasets import generate_dataset, write_dataset

    spec, coeffs, gas = _load_oracle(spec_path)
    n_radial, n_tangential = _parse_grid(grid)
    ds = generate_dataset(spec, gas, coeffs, n_samples, seed,
                          n_radial, n_tangential)
    write_dataset(ds, out_dir)
    click.echo(f"wrote {n_samples} samples ({n_radial}x{n_tangential} grid) "
               f"to {out_dir}")


def _arch_for(name, field_shape):
    from .model import (cnnfd_config, doubleconv_config, unet_baseline_config)

    grid = (field_shape[1], field_shape[2], field_shape[3])
    if name == "cnnfd":
        depth = 0
        size = min(grid[1], grid[2])
        while size > 1:
            size //= 2
            depth += 1
        return cnnfd_config(grid=grid, depth=depth, cap=96 if grid[1] <= 32 else None)
    if name == "unet":
        return unet_baseline_config(grid=grid)
    return doubleconv_config(grid=grid)


@cli.command()
@click.option("--data", "data_dir", type=click.Path(exists=True), required=True)
@click.option("--arch", type=click.Choice(["cnnfd", "unet", "doubleconv"]),
              default="cnnfd", show_default=True)
@click.option("--config", "config_path", type=click.Path(exists=True),
              default=None, help="TrainConfig overrides as JSON.")
@click.option("--seeds", type=int, default=5, show_default=True,
              help="Number of seeds (0..seeds-1).")
@click.option("--spec", "spec_path", type=click.Path(exists=True), default=None)
@click.option("--out", "out_dir", type=click.Path(), required=True)
def train(data_dir, arch, config_path, seeds, spec_path, out_dir):
    """Train the surrogate over several seeds and save per-seed checkpoints."""
    from .datasets import read_dataset
    from .model import parameter_count, save_checkpoint
    from .oracle import oracle_config_dict
    from .training import TrainConfig, multi_seed, prepare_inputs

    ds = read_dataset(data_dir)
    spec, coeffs, gas = _load_oracle(spec_path)
    cfg = TrainConfig()
    if config_path:
        with open(config_path) as f:
            cfg = TrainConfig.from_dict({**cfg.to_dict(), **json.load(f)})
    arch_cfg = _arch_for(arch, ds.field_shape)
    inputs = prepare_inputs(ds)
    os.makedirs(out_dir, exist_ok=True)

    def log(epoch, tr, va, lr):
        click.echo(f"  epoch {epoch:4d}  train {tr:.5f}  val {va:.5f}  lr {lr:.2e}")

    runs, summary = multi_seed(ds, arch_cfg, cfg, list(range(seeds)),
                               inputs=inputs, log=log if seeds == 1 else None)
    oracle_cfg = oracle_config_dict(spec, coeffs, gas)
    for run in runs:
        seed_dir = os.path.join(out_dir, f"seed{run.report.seed}")
        os.makedirs(seed_dir, exist_ok=True)
        extras = ({"output_reference": run.output_reference}
                  if run.output_reference is not None else None)
        save_checkpoint(
            os.path.join(seed_dir, "best.ckpt"), run.model, run.arch,
            run.input_stats, run.output_stats, extra_tensors=extras,
            metadata={"seed": run.report.seed,
                      "best_epoch": run.report.best_epoch,
                      "best_val_loss": run.report.best_val_loss,
                      "final_train_loss": run.report.final_train_loss,
                      "holdout_loss": run.report.holdout_loss,
                      "train_config": cfg.to_dict(),
                      "dataset_seed": ds.seed,
                      "oracle_hash": ds.oracle_hash,
                      "oracle_config": oracle_cfg,
                      "trainable_parameters": parameter_count(run.model)})
        run.report.save_json(os.path.join(seed_dir, "report.json"))
        run.report.save_curves_csv(os.path.join(seed_dir, "curves.csv"))
    best = min(runs, key=lambda r: r.report.best_val_loss)
    with open(os.path.join(out_dir, "aggregate.json"), "w") as f:
        json.dump({"arch": arch, "losses": summary,
                   "best_seed": best.report.seed}, f, indent=1)
    link = os.path.join(out_dir, "best.ckpt")
    src = os.path.join(out_dir, f"seed{best.report.seed}", "best.ckpt")
    if os.path.islink(link) or os.path.exists(link):
        pass
    else:
        os.symlink(os.path.relpath(src, out_dir), link)
    click.echo(f"trained {len(runs)} seed(s); best seed {best.report.seed} "
               f"val {best.report.best_val_loss:.5f}; aggregate in {out_dir}")


@cli.command()
@click.option("--ckpt", "ckpt_path", type=click.Path(exists=True), required=True)
@click.option("--data", "data_dir", type=click.Path(exists=True), required=True)
@click.option("--split", type=click.Choice(["train", "validation", "holdout"]),
              default="holdout", show_default=True)
@click.option("--seed", type=int, default=None,
              help="Split seed (defaults to the checkpoint's training seed).")
@click.option("--report", "report_dir", type=click.Path(), required=True)
def evaluate(ckpt_path, data_dir, split, seed, report_dir):
    """Evaluate a checkpoint on a dataset split and render the report bundle."""
    from .datasets import read_dataset, stratified_split
    from .postproc.metrics import evaluate_predictions
    from .postproc.report import write_report
    from .service.predictor import Predictor

    ds = read_dataset(data_dir)
    predictor = Predictor(ckpt_path)
    if seed is None:
        seed = predictor.manifest["metadata"].get("seed", 0)
    assignment = stratified_split(ds.overall_eta_p, seed=seed)
    idx = assignment.indices(split)
    if len(idx) == 0:
        raise DataError(f"split {split} is empty for this dataset")
    preds = []
    for k in idx:
        b = ds.builds[k]
        field, _, _ = predictor.predict(b.clearance, b.roughness)
        preds.append(field)
    truths = [ds.fields[k].astype(float) for k in idx]
    result = evaluate_predictions(preds, truths, predictor.grid, predictor.gas,
                                  predictor.baseline)
    write_report(report_dir, result, preds, truths, predictor.grid,
                 predictor.gas, predictor.baseline)
    m = result.targets
    click.echo(f"{split}: n={len(idx)}  "
               f"R2(mdot)={m['mdot'].r2:.4f}  R2(eta_p)={m['eta_p'].r2:.4f}  "
               f"MAE(eta_p)={m['eta_p'].mae:.5f}  report in {report_dir}")


@cli.command()
@click.option("--ckpt", "ckpt_path", type=click.Path(exists=True), required=True)
@click.option("--build", "build_path", type=click.Path(exists=True), required=True,
              help='JSON {"clearance": [22], "roughness": [22]}.')
@click.option("--out", "out_path", type=click.Path(), required=True)
def predict(ckpt_path, build_path, out_path):
    """Predict overall and stage-wise performance for one build."""
    from .service.predictor import Predictor

    with open(build_path) as f:
        body = json.load(f)
    predictor = Predictor(ckpt_path)
    _, breakdown, latency = predictor.predict(body["clearance"],
                                              body["roughness"])
    payload = {"model_id": predictor.model_id, "latency_ms": 1000 * latency,
               "overall": {"mdot": breakdown.mdot, "pr": breakdown.pr,
                           "eta_p": breakdown.eta_p},
               "deltas": breakdown.deltas,
               "stages": [{"stage": s.stage, "pr": s.pr, "eta_p": s.eta_p}
                          for s in breakdown.stages]}
    with open(out_path, "w") as f:
        json.dump(payload, f, indent=1)
    click.echo(f"eta_p={breakdown.eta_p:.5f}  d_eta={breakdown.deltas['eta_p_pts']:+.4f} pts  "
               f"mdot={breakdown.mdot:.3f}  wrote {out_path}")


@cli.command()
@click.option("--ckpt", "ckpt_path", type=click.Path(exists=True), required=True)
@click.option("--addr", default="127.0.0.1:8080", show_default=True)
def serve(ckpt_path, addr):
    """Serve the prediction API over HTTP."""
    import uvicorn

    from .service.app import create_app

    host, _, port = addr.partition(":")
    app = create_app(ckpt_path)
    uvicorn.run(app, host=host or "127.0.0.1", port=int(port or 8080),
                log_level="warning")


@cli.command()
@click.option("--ckpt", "ckpt_path", type=click.Path(exists=True), required=True)
@click.option("--n", "n_repeat", type=int, default=40, show_default=True)
def bench(ckpt_path, n_repeat):
    """Measure single-prediction latency (p50/p95)."""
    import numpy as np

    from .service.predictor import Predictor

    predictor = Predictor(ckpt_path)
    build = predictor.design
    lat = []
    for _ in range(n_repeat):
        _, _, dt = predictor.predict(build.clearance, build.roughness)
        lat.append(dt)
    lat = np.sort(np.array(lat))
    p50 = float(np.percentile(lat, 50))
    p95 = float(np.percentile(lat, 95))
    click.echo(f"n={n_repeat}  p50={1000 * p50:.1f} ms  p95={1000 * p95:.1f} ms  "
               f"grid={predictor.arch.grid}")


def main():
    try:
        cli(standalone_mode=False)
    except click.UsageError as e:
        e.show()
        sys.exit(2)
    except click.ClickException as e:
        e.show()
        sys.exit(1)
    except click.Abort:
        sys.exit(130)
    except (DataError, ConfigError) as e:
        print(f'cnnfd: error kind=data msg="{e}"', file=sys.stderr)
        sys.exit(3)
    except (NumericError, ArithmeticError) as e:
        print(f'cnnfd: error kind=numeric msg="{e}"', file=sys.stderr)
        sys.exit(4)


if __name__ == "__main__":
    main()
