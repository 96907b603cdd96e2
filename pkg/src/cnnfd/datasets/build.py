"""Per-build manufacturing inputs and the experiment design."""

from dataclasses import dataclass

import numpy as np
from scipy.stats import qmc

from ..errors import ConfigError
from ..oracle.geometry import N_GEOM_PARAMS, N_GEOM_SECTIONS, N_ROWS

CLEARANCE_BOUNDS = (0.25, 2.5)
DEFAULT_RANGE = (0.5, 1.5)


@dataclass
class BuildInput:
    """Clearance fractions (of design), absolute roughness Ra in micrometres,
    and the blade geometry parameters at 8 radial sections."""

    clearance: np.ndarray   # (22,)
    roughness: np.ndarray   # (22,)
    geometry: np.ndarray    # (5, 22, 8)

    def __post_init__(self):
        self.clearance = np.asarray(self.clearance, np.float64)
        self.roughness = np.asarray(self.roughness, np.float64)
        self.geometry = np.asarray(self.geometry, np.float64)
        if self.clearance.shape != (N_ROWS,) or self.roughness.shape != (N_ROWS,):
            raise ConfigError("clearance/roughness must have one value per row")
        if self.geometry.shape != (N_GEOM_PARAMS, N_ROWS, N_GEOM_SECTIONS):
            raise ConfigError(
                f"geometry must be {(N_GEOM_PARAMS, N_ROWS, N_GEOM_SECTIONS)}, "
                f"got {self.geometry.shape}")
        lo, hi = CLEARANCE_BOUNDS
        if np.any(self.clearance < lo) or np.any(self.clearance > hi):
            raise ConfigError(f"clearance fractions must lie in [{lo}, {hi}]")
        if np.any(self.roughness <= 0):
            raise ConfigError("roughness must be positive")
        if not np.all(np.isfinite(self.geometry)):
            raise ConfigError("geometry must be finite")

    def to_array(self):
        return np.concatenate([self.clearance, self.roughness,
                               self.geometry.ravel()]).astype(np.float32)

    @classmethod
    def from_array(cls, arr):
        arr = np.asarray(arr, np.float64)
        return cls(clearance=arr[:N_ROWS], roughness=arr[N_ROWS:2 * N_ROWS],
                   geometry=arr[2 * N_ROWS:].reshape(
                       N_GEOM_PARAMS, N_ROWS, N_GEOM_SECTIONS))

    @classmethod
    def array_length(cls):
        return 2 * N_ROWS + N_GEOM_PARAMS * N_ROWS * N_GEOM_SECTIONS


def design_build(spec):
    return BuildInput(clearance=np.ones(N_ROWS),
                      roughness=np.array([r.roughness_um for r in spec.rows]),
                      geometry=spec.design_geometry.copy())


def lhs_sample(spec, n, seed, clearance_range=DEFAULT_RANGE,
               roughness_range=DEFAULT_RANGE):
    """Latin hypercube over the 44 clearance/roughness axes.

    Each axis is split into n equal strata, every stratum used exactly once;
    geometry parameters stay at the design values.
    """
    if n < 1:
        raise ConfigError("lhs_sample: need at least one sample")
    sampler = qmc.LatinHypercube(d=2 * N_ROWS, seed=seed)
    u = sampler.random(n)
    ra_design = np.array([r.roughness_um for r in spec.rows])
    clo, chi = clearance_range
    rlo, rhi = roughness_range
    builds = []
    for k in range(n):
        builds.append(BuildInput(
            clearance=clo + u[k, :N_ROWS] * (chi - clo),
            roughness=ra_design * (rlo + u[k, N_ROWS:] * (rhi - rlo)),
            geometry=spec.design_geometry.copy()))
    return builds
