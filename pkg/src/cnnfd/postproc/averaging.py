"""Mass-flow averaging: 2D contours -> radial profiles -> 1D plane values.

The weight is the local mass flux rho*Vx*dA.  Density itself is averaged
with area weights (weighting it by rho*Vx would be self-weighting); the
radial pass reuses the profile-level mass flux rho_bar*Vx_bar*dA as its
weight.  Accumulation is 64-bit.
"""

import numpy as np

from ..errors import NumericError
from ..oracle.geometry import VARIABLES

IDX = {name: i for i, name in enumerate(VARIABLES)}


def massflow_average_circ(field, grid):
    """Circumferential pass: (6, P, R, T) -> (6, P, R) profiles."""
    f = np.asarray(field, np.float64)
    nvar, planes, nr, nt = f.shape
    profiles = np.empty((nvar, planes, nr))
    for p in range(planes):
        area = grid.cell_areas(p)
        w = f[IDX["rho"], p] * f[IDX["Vx"], p] * area
        wsum = w.sum(axis=1)
        if np.any(wsum <= 0.0):
            r_bad = int(np.argmax(wsum <= 0.0))
            raise NumericError(
                f"massflow_average_circ: non-positive mass flux at plane {p}, "
                f"radius index {r_bad}")
        for v in range(nvar):
            if v == IDX["rho"]:
                profiles[v, p] = (f[v, p] * area).sum(axis=1) / area.sum(axis=1)
            else:
                profiles[v, p] = (f[v, p] * w).sum(axis=1) / wsum
    return profiles


def massflow_average_radial(profiles, grid):
    """Radial pass: (6, P, R) -> (6, P) plane averages."""
    prof = np.asarray(profiles, np.float64)
    nvar, planes, nr = prof.shape
    out = np.empty((nvar, planes))
    for p in range(planes):
        ring = grid.cell_areas(p).sum(axis=1)
        w = prof[IDX["rho"], p] * prof[IDX["Vx"], p] * ring
        wsum = w.sum()
        if wsum <= 0.0:
            raise NumericError(
                f"massflow_average_radial: non-positive mass flux at plane {p}")
        for v in range(nvar):
            if v == IDX["rho"]:
                out[v, p] = (prof[v, p] * ring).sum() / ring.sum()
            else:
                out[v, p] = (prof[v, p] * w).sum() / wsum
    return out


def average_1d(field, grid):
    """Both passes: (6, P, R, T) -> (6, P)."""
    return massflow_average_radial(massflow_average_circ(field, grid), grid)


def plane_massflow(field, grid, plane):
    """Full-annulus mass flow through `plane`, kg/s."""
    f = np.asarray(field, np.float64)
    area = grid.cell_areas(plane)
    passage = (f[IDX["rho"], plane] * f[IDX["Vx"], plane] * area).sum()
    return float(passage * grid.blade_count[plane])


def all_plane_massflows(field, grid):
    return np.array([plane_massflow(field, grid, p) for p in range(grid.n_planes)])
