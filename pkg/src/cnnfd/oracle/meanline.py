"""Row-by-row 1D compressor model.

Rotors raise total temperature by psi*U^2/cp and total pressure through the
polytropic relation at a row efficiency penalized by clearance and
roughness excess over design; stators and vanes keep Tt and lose a
clearance/roughness-dependent fraction of the inlet dynamic head.  Density
closes through a fixed per-plane design Mach schedule and axial velocity
through continuity, so every plane carries the same mass flow by
construction.
"""

from dataclasses import dataclass

import numpy as np

from ..errors import NumericError
from .geometry import N_PLANES, N_ROWS

CLEARANCE_ENVELOPE = (0.25, 2.5)


@dataclass
class PlaneStates:
    pt: np.ndarray       # (24,)
    tt: np.ndarray
    vx: np.ndarray
    vt: np.ndarray
    vr: np.ndarray
    rho: np.ndarray
    p_static: np.ndarray
    row_eta: np.ndarray      # (22,) rotor efficiency, nan elsewhere
    row_loss: np.ndarray     # (22,) stator/vane loss coefficient, nan elsewhere
    mdot: float


def validate_build(spec, build):
    cl = np.asarray(build.clearance, float)
    ra = np.asarray(build.roughness, float)
    if cl.shape != (N_ROWS,) or ra.shape != (N_ROWS,):
        raise NumericError("build must carry 22 clearance and 22 roughness values")
    lo, hi = CLEARANCE_ENVELOPE
    if np.any(cl < lo) or np.any(cl > hi):
        bad = int(np.argmax((cl < lo) | (cl > hi)))
        raise NumericError(
            f"clearance fraction {cl[bad]:.3f} on row {bad} outside [{lo}, {hi}]")
    ra_design = np.array([r.roughness_um for r in spec.rows])
    ratio = ra / ra_design
    if np.any(ratio < lo) or np.any(ratio > hi):
        bad = int(np.argmax((ratio < lo) | (ratio > hi)))
        raise NumericError(
            f"roughness {ra[bad]:.3f} um on row {bad} outside "
            f"[{lo}, {hi}] x design")


def row_efficiency(spec, coeffs, row_index, clearance_frac, roughness_um):
    """Rotor efficiency after tip-clearance and roughness penalties."""
    row = spec.rows[row_index]
    ratio_des = spec.design_clearance_ratio(row_index)
    d_ratio = (clearance_frac - 1.0) * ratio_des
    eta = (coeffs.eta_base
           - coeffs.tip_penalty * d_ratio
           - coeffs.rough_penalty * np.log10(roughness_um / row.roughness_um))
    return float(np.clip(eta, 0.5, 0.999))


def row_loss_coefficient(spec, coeffs, row_index, clearance_frac, roughness_um):
    """Stator/vane loss coefficient with the same penalty terms."""
    row = spec.rows[row_index]
    ratio_des = spec.design_clearance_ratio(row_index)
    d_ratio = (clearance_frac - 1.0) * ratio_des
    extra = coeffs.stator_gain * (
        coeffs.tip_penalty * d_ratio
        + coeffs.rough_penalty * np.log10(roughness_um / row.roughness_um))
    return float(max(row.loss_coeff + extra, coeffs.loss_floor * row.loss_coeff))


def meanline_solve(spec, gas, coeffs, build, inlet=None):
    """Solve the 24-plane 1D state for a build.

    `inlet` may override {pt, tt, mdot}; defaults come from the spec.
    """
    validate_build(spec, build)
    inlet = inlet or {}
    pt0 = float(inlet.get("pt", spec.pt_inlet))
    tt0 = float(inlet.get("tt", spec.tt_inlet))
    mdot = float(inlet.get("mdot", spec.mdot_design))

    pt = np.empty(N_PLANES)
    tt = np.empty(N_PLANES)
    vt = np.zeros(N_PLANES)
    row_eta = np.full(N_ROWS, np.nan)
    row_loss = np.full(N_ROWS, np.nan)
    pt[0], tt[0] = pt0, tt0

    for i, row in enumerate(spec.rows):
        p = i + 1
        cl = float(build.clearance[i])
        ra = float(build.roughness[i])
        if row.kind == "rotor":
            dtt = row.work_coeff * row.blade_speed ** 2 / gas.cp
            tt[p] = tt[p - 1] + dtt
            if tt[p] <= tt[p - 1]:
                raise NumericError(f"rotor {row.name}: total temperature not rising")
            eta = row_efficiency(spec, coeffs, i, cl, ra)
            row_eta[i] = eta
            pt[p] = pt[p - 1] * (tt[p] / tt[p - 1]) ** (
                gas.gamma * eta / (gas.gamma - 1.0))
            if pt[p] <= pt[p - 1]:
                raise NumericError(f"rotor {row.name}: total pressure not rising")
            vt[p] = vt[p - 1] + row.work_coeff * row.blade_speed
        else:
            tt[p] = tt[p - 1]
            omega = row_loss_coefficient(spec, coeffs, i, cl, ra)
            row_loss[i] = omega
            ps_in, _, _ = gas.static_from_total(pt[p - 1], tt[p - 1],
                                                spec.mach_schedule[p - 1])
            pt[p] = pt[p - 1] - omega * (pt[p - 1] - ps_in)
            if pt[p] <= 0:
                raise NumericError(f"row {row.name}: total pressure collapsed")
            if row.name == "EGV":
                vt[p] = 0.0
            else:
                # vane/stator turns the flow back to the design preswirl of
                # the downstream rotor
                nxt = next((r for r in spec.rows[i + 1:] if r.kind == "rotor"), None)
                vt[p] = spec.preswirl * nxt.blade_speed if nxt else 0.0

    # short exit duct: compressor-outlet plane carries the EGV-outlet state
    pt[N_PLANES - 1] = pt[N_PLANES - 2]
    tt[N_PLANES - 1] = tt[N_PLANES - 2]
    vt[N_PLANES - 1] = 0.0

    # exit-nozzle coupling: losses shift the operating point, so the swallowed
    # flow follows the delivered pressure ratio
    pr = pt[-1] / pt[0]
    mdot = mdot * (pr / spec.design_pr) ** coeffs.flow_coupling

    areas = spec.areas()
    rho = np.empty(N_PLANES)
    p_static = np.empty(N_PLANES)
    vx = np.empty(N_PLANES)
    for p in range(N_PLANES):
        ps, _, rho_p = gas.static_from_total(pt[p], tt[p], spec.mach_schedule[p])
        if rho_p <= 0:
            raise NumericError(f"plane {p}: non-physical density")
        rho[p] = rho_p
        p_static[p] = ps
        vx[p] = mdot / (rho_p * areas[p])

    return PlaneStates(pt=pt, tt=tt, vx=vx, vt=vt, vr=np.zeros(N_PLANES),
                       rho=rho, p_static=p_static, row_eta=row_eta,
                       row_loss=row_loss, mdot=mdot)
