"""Stratified train/validation/holdout split on overall efficiency."""

import warnings
from dataclasses import dataclass

import numpy as np

from ..errors import ConfigError

SPLIT_NAMES = ("train", "validation", "holdout")


@dataclass
class SplitAssignment:
    labels: np.ndarray      # (n,) int index into SPLIT_NAMES
    bin_index: np.ndarray   # (n,)
    seed: int

    def indices(self, name):
        return np.flatnonzero(self.labels == SPLIT_NAMES.index(name))


def _target_counts(n, fractions):
    raw = np.asarray(fractions, float) * n
    counts = np.floor(raw).astype(int)
    # largest remainder keeps every split within one sample of its target
    for _ in range(n - counts.sum()):
        counts[int(np.argmax(raw - counts))] += 1
    return counts


def stratified_split(eta, fractions=(0.7, 0.2, 0.1), n_bins=10, seed=0):
    """Quantile-bin `eta` and assign splits bin by bin.

    Deterministic for a fixed seed; global fractions hold within one sample
    and every bin feeds each split roughly proportionally.
    """
    eta = np.asarray(eta, float)
    n = eta.size
    if n < n_bins:
        raise ConfigError(f"need at least {n_bins} samples to stratify, got {n}")
    if abs(sum(fractions) - 1.0) > 1e-9:
        raise ConfigError("split fractions must sum to 1")

    edges = np.quantile(eta, np.linspace(0, 1, n_bins + 1))
    edges = np.unique(edges)
    if len(edges) < n_bins + 1:
        warnings.warn("duplicate efficiency values collapsed quantile bins; "
                      f"continuing with {len(edges) - 1} bins")
    bins = np.clip(np.searchsorted(edges, eta, side="right") - 1,
                   0, len(edges) - 2)

    rng = np.random.default_rng(seed)
    deficit = _target_counts(n, fractions)
    labels = np.empty(n, int)
    for b in np.unique(bins):
        members = np.flatnonzero(bins == b)
        rng.shuffle(members)
        want = _target_counts(len(members), fractions)
        want = np.minimum(want, deficit)
        while want.sum() < len(members):
            want[int(np.argmax(deficit - want))] += 1
        pos = 0
        for split, count in enumerate(want):
            labels[members[pos:pos + count]] = split
            pos += count
        deficit -= want
    return SplitAssignment(labels=labels, bin_index=bins, seed=seed)
