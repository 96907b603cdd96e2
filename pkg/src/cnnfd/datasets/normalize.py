"""Per-(channel, plane) normalization statistics from the training split."""

import warnings
from dataclasses import dataclass

import numpy as np

from ..errors import ConfigError

STD_FLOOR = 1e-12


@dataclass
class NormStats:
    mean: np.ndarray   # (C, P)
    std: np.ndarray    # (C, P), clamped away from zero
    clamped: np.ndarray = None  # (C, P) bool, True where std was degenerate

    def apply(self, x):
        """(x - mean) / std for x of shape (..., C, P, R, T).

        Clamped (declared-constant) slots normalize to exactly zero, so
        storage-level noise never becomes a training target.
        """
        z = (x - self.mean[..., None, None]) / self.std[..., None, None]
        if self.clamped is not None and self.clamped.any():
            z = np.where(self.clamped[..., None, None], 0.0, z)
        return z.astype(x.dtype)

    def invert(self, x):
        """Inverse transform; clamped slots return their stored mean
        regardless of the network output."""
        if self.clamped is not None and self.clamped.any():
            x = np.where(self.clamped[..., None, None], 0.0, x)
        return (x * self.std[..., None, None] +
                self.mean[..., None, None]).astype(np.asarray(x).dtype)

    def to_dict(self):
        out = {"mean": self.mean.tolist(), "std": self.std.tolist()}
        if self.clamped is not None:
            out["clamped"] = self.clamped.tolist()
        return out

    @classmethod
    def from_dict(cls, d):
        clamped = d.get("clamped")
        return cls(mean=np.asarray(d["mean"], np.float32),
                   std=np.asarray(d["std"], np.float32),
                   clamped=None if clamped is None else np.asarray(clamped, bool))


def compute_normalization(tensors, warn_degenerate=True):
    """Statistics over samples and grid nodes of (n, C, P, R, T) data.

    Standard deviations below the floor (constant channels) clamp to one,
    so those channels normalize to zero.
    """
    t = np.asarray(tensors)
    if t.ndim != 5 or t.shape[0] < 2:
        raise ConfigError("compute_normalization needs at least two samples")
    mean = t.mean(axis=(0, 3, 4), dtype=np.float64)
    std = t.std(axis=(0, 3, 4), dtype=np.float64)
    degenerate = std < STD_FLOOR
    if np.any(degenerate):
        if warn_degenerate:
            warnings.warn(f"{int(degenerate.sum())} constant (channel, plane) "
                          "slots; their std clamps to 1")
        std = np.where(degenerate, 1.0, std)
    return NormStats(mean=mean.astype(np.float32), std=std.astype(np.float32),
                     clamped=degenerate)


def residual_normalization(train_fields):
    """Reference field plus statistics of the residuals against it.

    The reference is the per-node training-mean field; training on
    residuals concentrates the normalized targets on build-to-build
    variation instead of the static flow structure.  Slots whose residual
    scatter sits at float32 quantization level relative to the raw field
    are clamped so storage noise is not amplified into targets.
    """
    ref = train_fields.mean(axis=0, dtype=np.float64).astype(np.float32)
    resid = train_fields - ref[None]
    stats = compute_normalization(resid, warn_degenerate=False)
    raw_rms = np.sqrt((train_fields.astype(np.float64) ** 2).mean(axis=(0, 3, 4)))
    noise = stats.std < 1e-5 * np.maximum(raw_rms, 1e-3)
    stats.std = np.where(noise, 1.0, stats.std).astype(np.float32)
    stats.mean = np.where(noise, 0.0, stats.mean).astype(np.float32)
    stats.clamped = stats.clamped | noise
    return ref, stats
