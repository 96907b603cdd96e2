"""Training loop: AdamW on the Huber loss with plateau scheduling and early
stopping, both driven by the validation loss."""

import json
import time
from dataclasses import dataclass, field

import numpy as np

from ..errors import ConfigError, NumericError
from ..model.graph import restore_state, snapshot_state
from ..tensorcore import AdamWConfig, OptimizerState, adamw_step, huber_loss


@dataclass
class TrainConfig:
    batch_size: int = 20
    lr0: float = 0.01
    scheduler_factor: float = 0.5
    scheduler_patience: int = 20
    early_stop_patience: int = 50
    max_epochs: int = 500
    huber_delta: float = 1.0
    weight_decay: float = 0.01
    min_lr: float = 1e-6
    stop_below_train_loss: float = None

    def validate(self):
        if self.batch_size < 1:
            raise ConfigError("batch_size must be at least 1")
        if self.early_stop_patience <= self.scheduler_patience:
            raise ConfigError("early-stop patience must exceed scheduler patience")
        if self.lr0 <= 0:
            raise ConfigError("initial learning rate must be positive")
        return self

    def to_dict(self):
        return dict(self.__dict__)

    @classmethod
    def from_dict(cls, d):
        return cls(**d).validate()


@dataclass
class RunReport:
    seed: int
    epochs: list = field(default_factory=list)  # dicts: epoch/train/val/lr
    best_epoch: int = 0
    best_val_loss: float = float("inf")
    final_train_loss: float = float("nan")
    holdout_loss: float = float("nan")
    wall_time_s: float = 0.0
    stopped_epoch: int = 0

    def curve(self, key):
        return np.array([e[key] for e in self.epochs])

    def to_dict(self):
        return dict(seed=self.seed, epochs=self.epochs,
                    best_epoch=self.best_epoch,
                    best_val_loss=self.best_val_loss,
                    final_train_loss=self.final_train_loss,
                    holdout_loss=self.holdout_loss,
                    wall_time_s=self.wall_time_s,
                    stopped_epoch=self.stopped_epoch)

    def save_json(self, path):
        with open(path, "w") as f:
            json.dump(self.to_dict(), f, indent=1)

    def save_curves_csv(self, path):
        with open(path, "w") as f:
            f.write("epoch,train_loss,val_loss,lr\n")
            for e in self.epochs:
                f.write(f"{e['epoch']},{e['train_loss']:.8e},"
                        f"{e['val_loss']:.8e},{e['lr']:.8e}\n")


def evaluate_loss(model, x, y, indices, batch_size, delta):
    """Mean Huber loss over `indices` in inference mode."""
    total = 0.0
    count = 0
    for lo in range(0, len(indices), batch_size):
        sel = indices[lo:lo + batch_size]
        pred = model.forward(x[sel], train=False)
        loss, _ = huber_loss(pred, y[sel], delta)
        total += loss * len(sel)
        count += len(sel)
    return total / max(count, 1)


def train(model, x, y, train_idx, val_idx, config, seed, holdout_idx=None,
          log=None):
    """Fit `model` on normalized inputs/targets; returns a RunReport.

    The best-validation parameter state is restored into the model before
    returning.  Deterministic for a fixed seed under the default execution
    profile (fixed thread count).
    """
    config.validate()
    rng = np.random.default_rng(seed)
    opt = OptimizerState(AdamWConfig(learning_rate=config.lr0,
                                     weight_decay=config.weight_decay))
    params = model.params()
    lr = config.lr0
    report = RunReport(seed=seed)
    best_state = snapshot_state(model)
    since_best = 0
    since_sched = 0
    start = time.perf_counter()

    for epoch in range(1, config.max_epochs + 1):
        perm = rng.permutation(train_idx)
        running = 0.0
        seen = 0
        for bi, lo in enumerate(range(0, len(perm), config.batch_size)):
            sel = perm[lo:lo + config.batch_size]
            pred = model.forward(x[sel], train=True)
            loss, grad = huber_loss(pred, y[sel], config.huber_delta)
            if not np.isfinite(loss):
                raise NumericError(
                    f"non-finite training loss at epoch {epoch}, batch {bi}, "
                    f"lr {lr:.3e}")
            model.backward(grad)
            adamw_step(params, opt, learning_rate=lr)
            running += loss * len(sel)
            seen += len(sel)
        train_loss = running / seen
        val_loss = evaluate_loss(model, x, y, val_idx, config.batch_size,
                                 config.huber_delta)
        report.epochs.append(dict(epoch=epoch, train_loss=train_loss,
                                  val_loss=val_loss, lr=lr))
        if log:
            log(epoch, train_loss, val_loss, lr)

        if val_loss < report.best_val_loss:
            report.best_val_loss = val_loss
            report.best_epoch = epoch
            best_state = snapshot_state(model)
            since_best = 0
            since_sched = 0
        else:
            since_best += 1
            since_sched += 1
        if since_sched >= config.scheduler_patience:
            lr = max(lr * config.scheduler_factor, config.min_lr)
            since_sched = 0
        if since_best >= config.early_stop_patience:
            break
        if (config.stop_below_train_loss is not None
                and train_loss < config.stop_below_train_loss):
            break

    report.stopped_epoch = report.epochs[-1]["epoch"]
    restore_state(model, best_state)
    report.final_train_loss = evaluate_loss(
        model, x, y, train_idx, config.batch_size, config.huber_delta)
    if holdout_idx is not None and len(holdout_idx):
        report.holdout_loss = evaluate_loss(
            model, x, y, holdout_idx, config.batch_size, config.huber_delta)
    report.wall_time_s = time.perf_counter() - start
    return report
