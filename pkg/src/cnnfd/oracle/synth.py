"""Structured 2D flow-field synthesis on top of the meanline solution.

Each plane/variable is the 1D value shaped by a power-law endwall layer, a
Gaussian wake per passage whose depth scales with the upstream row's loss,
and a Gaussian low-momentum region near the casing (rotor planes) or hub
(stator planes) whose amplitude is proportional to clearance/span.  After
shaping, axial velocity and density are jointly rescaled so the discrete
plane mass flow matches the meanline value exactly, and Pt/Tt are rescaled
so their two-step mass-flow averages land on the meanline state.
"""

from dataclasses import dataclass

import numpy as np

from ..errors import NumericError
from ..postproc.averaging import IDX, massflow_average_circ, massflow_average_radial
from ..postproc.grid import AnnulusGrid
from ..postproc.performance import stage_and_overall
from .geometry import N_PLANES, VARIABLES
from .meanline import meanline_solve

WAKE_CENTER = 0.5
BLOB_THETA = 0.30


def tip_blob_amplitude(spec, coeffs, build, row_index):
    """Low-momentum blob amplitude at the row's outlet plane."""
    span = spec.spans[row_index + 1]
    clearance = build.clearance[row_index] * spec.rows[row_index].clearance_mm * 1e-3
    return coeffs.blob_gain * clearance / span


def _endwall_shape(spans, coeffs):
    if coeffs.endwall_delta <= 0:
        return np.ones_like(spans)
    wall = np.minimum(spans, 1.0 - spans) / coeffs.endwall_delta
    return np.minimum(wall, 1.0) ** coeffs.endwall_exponent


def _wake_profile(thetas, coeffs):
    if coeffs.wake_width <= 0:
        return np.zeros_like(thetas)
    return np.exp(-0.5 * ((thetas - WAKE_CENTER) / coeffs.wake_width) ** 2)


def _plane_wake_depth(spec, coeffs, states, plane):
    """Wake depth on `plane` from its upstream row's relative loss."""
    if plane == 0:
        return 0.0
    row_index = min(plane - 1, len(spec.rows) - 1)
    row = spec.rows[row_index]
    if row.kind == "rotor":
        rel = (1.0 - states.row_eta[row_index]) / (1.0 - coeffs.eta_base)
    else:
        rel = states.row_loss[row_index] / max(row.loss_coeff, 1e-12)
    depth = coeffs.wake_depth * rel
    if plane == N_PLANES - 1:
        depth *= 0.3  # partly mixed out in the exit duct
    return depth


def synthesize_flowfield(states, spec, build, coeffs, grid=None):
    """(6, 24, R, T) float64 flow field consistent with the meanline state."""
    grid = grid or AnnulusGrid.from_spec(spec)
    nr, nt = grid.n_radial, grid.n_tangential
    spans = grid.span_fractions
    thetas = grid.theta_fractions
    f_bl = _endwall_shape(spans, coeffs)[:, None]
    wake_g = _wake_profile(thetas, coeffs)[None, :]

    field = np.empty((len(VARIABLES), N_PLANES, nr, nt))
    gamma_term = states.p_static / states.pt  # static over total pressure
    for p in range(N_PLANES):
        dq = 1.0 - gamma_term[p]  # dynamic-head fraction of Pt
        depth = _plane_wake_depth(spec, coeffs, states, p)
        wake = depth * wake_g
        row_index = min(p - 1, len(spec.rows) - 1) if p > 0 else None
        if row_index is not None and p < N_PLANES - 1:
            amp = tip_blob_amplitude(spec, coeffs, build, row_index)
            near_casing = spec.rows[row_index].kind == "rotor"
            s_c = 0.93 if near_casing else 0.07
            blob = amp * np.exp(
                -0.5 * ((spans[:, None] - s_c) / coeffs.blob_extent_span) ** 2
                - 0.5 * ((thetas[None, :] - BLOB_THETA) / coeffs.blob_extent_theta) ** 2)
        else:
            blob = np.zeros((nr, nt))

        vx = states.vx[p] * f_bl * (1.0 - wake) * (1.0 - blob)
        vt = states.vt[p] * f_bl * (1.0 - wake) * (1.0 + 0.5 * blob)
        vr = (coeffs.radial_velocity_gain * states.vx[p]
              * (blob - blob.mean()))
        pt = states.pt[p] * (1.0 - dq * (0.9 * (1.0 - f_bl)
                                         + 0.8 * wake + 0.7 * blob))
        tt = states.tt[p] * (1.0 + dq * (0.10 * (1.0 - f_bl) + 0.30 * wake))
        rho = states.rho[p] * (1.0 - dq * (0.2 * (1.0 - f_bl) + 0.2 * wake))

        field[IDX["Pt"], p] = pt
        field[IDX["Tt"], p] = tt
        field[IDX["Vx"], p] = vx
        field[IDX["Vt"], p] = vt
        field[IDX["Vr"], p] = vr
        field[IDX["rho"], p] = rho

    # joint Vx/rho rescale: exact discrete mass flow per plane
    for p in range(N_PLANES):
        area = grid.cell_areas(p)
        flux = (field[IDX["rho"], p] * field[IDX["Vx"], p] * area).sum()
        mdot_plane = flux * grid.blade_count[p]
        if mdot_plane <= 0:
            raise NumericError(f"plane {p}: non-positive synthesized mass flow")
        alpha = np.sqrt(states.mdot / mdot_plane)
        field[IDX["rho"], p] *= alpha
        field[IDX["Vx"], p] *= alpha

    # Pt/Tt rescale: the two-step mass-flow average must recover the
    # meanline state (weights are fixed by rho/Vx, so one factor is exact)
    profiles = massflow_average_circ(field, grid)
    averages = massflow_average_radial(profiles, grid)
    for name in ("Pt", "Tt"):
        target = states.pt if name == "Pt" else states.tt
        factors = target / averages[IDX[name]]
        field[IDX[name]] *= factors[:, None, None]

    for name in ("Pt", "Tt", "rho"):
        if np.any(field[IDX[name]] <= 0):
            raise NumericError(f"synthesized {name} not strictly positive")
    return field


@dataclass
class Sample:
    build: object
    field: np.ndarray
    breakdown: object


def generate_case(spec, gas, coeffs, build, grid=None, baseline=None):
    """BuildInput -> (field, reference performance) through the full chain."""
    grid = grid or AnnulusGrid.from_spec(spec)
    states = meanline_solve(spec, gas, coeffs, build)
    field = synthesize_flowfield(states, spec, build, coeffs, grid)
    breakdown = stage_and_overall(field, grid, gas, baseline=baseline)
    return Sample(build=build, field=field, breakdown=breakdown)
