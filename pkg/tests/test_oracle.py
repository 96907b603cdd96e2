"""Synthetic ground-truth model: recurrence, synthesis, and closures."""

import numpy as np
import pytest

from cnnfd.datasets import design_build, lhs_sample
from cnnfd.errors import NumericError
from cnnfd.oracle import (
    GasProperties,
    OracleCoefficients,
    default_compressor,
    generate_case,
    meanline_solve,
    stage_plane_bounds,
    synthesize_flowfield,
    tip_blob_amplitude,
)
from cnnfd.postproc import (
    AnnulusGrid,
    IDX,
    all_plane_massflows,
    average_1d,
    polytropic_efficiency,
    stage_and_overall,
)

GAS = GasProperties()
SPEC = default_compressor(GAS)
COEFFS = OracleCoefficients()
GRID = AnnulusGrid.from_spec(SPEC, 32, 32)


def perturbed(clearance_scale=None, roughness_scale=None):
    b = design_build(SPEC)
    if clearance_scale is not None:
        b.clearance = b.clearance * clearance_scale
    if roughness_scale is not None:
        b.roughness = b.roughness * roughness_scale
    return b


def test_design_build_restores_base_efficiency():
    states = meanline_solve(SPEC, GAS, COEFFS, design_build(SPEC))
    rotor_eta = states.row_eta[~np.isnan(states.row_eta)]
    np.testing.assert_allclose(rotor_eta, COEFFS.eta_base, rtol=0, atol=1e-12)
    assert states.mdot == pytest.approx(SPEC.mdot_design, rel=1e-12)


def test_single_row_clearance_lowers_stage_one_only():
    scale = np.ones(22)
    scale[1] = 1.5  # R1
    base = meanline_solve(SPEC, GAS, COEFFS, design_build(SPEC))
    off = meanline_solve(SPEC, GAS, COEFFS, perturbed(clearance_scale=scale))

    def stage_eta(states, s):
        lo, hi = stage_plane_bounds(s)
        return polytropic_efficiency(states.pt[hi] / states.pt[lo],
                                     states.tt[hi] / states.tt[lo], GAS.gamma)

    assert stage_eta(off, 1) < stage_eta(base, 1) - 1e-5
    for s in range(2, 11):
        assert stage_eta(off, s) == pytest.approx(stage_eta(base, s), abs=1e-9)


def test_meanline_continuity_exact():
    states = meanline_solve(SPEC, GAS, COEFFS, perturbed(clearance_scale=1.2))
    areas = SPEC.areas()
    mdots = states.rho * states.vx * areas
    np.testing.assert_allclose(mdots, states.mdot, rtol=1e-12)


def test_meanline_rejects_out_of_envelope():
    scale = np.ones(22)
    scale[3] = 3.0
    with pytest.raises(NumericError):
        meanline_solve(SPEC, GAS, COEFFS, perturbed(clearance_scale=scale))


def test_zero_shaping_gives_uniform_planes():
    coeffs = OracleCoefficients(wake_depth=0.0, blob_gain=0.0,
                                endwall_delta=0.0, radial_velocity_gain=0.0)
    states = meanline_solve(SPEC, GAS, coeffs, design_build(SPEC))
    field = synthesize_flowfield(states, SPEC, design_build(SPEC), coeffs, GRID)
    for v in range(6):
        for p in range(24):
            plane = field[v, p]
            assert np.ptp(plane) <= 1e-9 * max(abs(plane).max(), 1.0)
    np.testing.assert_allclose(field[IDX["Pt"], :, 0, 0], states.pt, rtol=1e-12)


def test_doubling_clearance_doubles_blob_amplitude():
    b1 = perturbed()
    b2 = perturbed(clearance_scale=2.0)
    a1 = tip_blob_amplitude(SPEC, COEFFS, b1, 1)
    a2 = tip_blob_amplitude(SPEC, COEFFS, b2, 1)
    assert a2 == pytest.approx(2.0 * a1, rel=1e-12)


def test_plane_massflows_match_meanline():
    build = perturbed(clearance_scale=1.3, roughness_scale=0.8)
    states = meanline_solve(SPEC, GAS, COEFFS, build)
    field = synthesize_flowfield(states, SPEC, build, COEFFS, GRID)
    mdots = all_plane_massflows(field, GRID)
    np.testing.assert_allclose(mdots, states.mdot, rtol=1e-10)


def test_averaging_recovers_meanline_state():
    build = perturbed(clearance_scale=0.7, roughness_scale=1.4)
    states = meanline_solve(SPEC, GAS, COEFFS, build)
    field = synthesize_flowfield(states, SPEC, build, COEFFS, GRID)
    avg = average_1d(field, GRID)
    np.testing.assert_allclose(avg[IDX["Pt"]], states.pt, rtol=1e-6)
    np.testing.assert_allclose(avg[IDX["Tt"]], states.tt, rtol=1e-6)


def test_stage_eta_closure_between_modules():
    build = perturbed(clearance_scale=1.25)
    states = meanline_solve(SPEC, GAS, COEFFS, build)
    sample = generate_case(SPEC, GAS, COEFFS, build, GRID)
    for s in range(1, 11):
        lo, hi = stage_plane_bounds(s)
        eta_ml = polytropic_efficiency(states.pt[hi] / states.pt[lo],
                                       states.tt[hi] / states.tt[lo], GAS.gamma)
        assert sample.breakdown.stages[s - 1].eta_p == pytest.approx(
            eta_ml, rel=1e-6)


def test_design_case_deltas_zero():
    base = generate_case(SPEC, GAS, COEFFS, design_build(SPEC), GRID)
    again = generate_case(SPEC, GAS, COEFFS, design_build(SPEC), GRID,
                          baseline=base.breakdown)
    for key in ("mdot_pct", "pr_pct", "eta_p_pts"):
        assert again.breakdown.deltas[key] == pytest.approx(0.0, abs=1e-9)


def test_generation_is_deterministic():
    build = lhs_sample(SPEC, 3, seed=11)[1]
    f1 = generate_case(SPEC, GAS, COEFFS, build, GRID).field
    f2 = generate_case(SPEC, GAS, COEFFS, build, GRID).field
    np.testing.assert_array_equal(f1, f2)


def test_monotone_total_pressure_through_machine():
    rng = np.random.default_rng(5)
    for _ in range(20):
        b = perturbed(clearance_scale=rng.uniform(0.6, 1.4, 22),
                      roughness_scale=rng.uniform(0.6, 1.4, 22))
        states = meanline_solve(SPEC, GAS, COEFFS, b)
        for i, row in enumerate(SPEC.rows):
            p = i + 1
            if row.kind == "rotor":
                rise = states.pt[p] - states.pt[p - 1]
                assert rise > 0
            else:
                drop = states.pt[p - 1] - states.pt[p]
                assert 0 <= drop < states.pt[p - 1] * 0.02


@pytest.mark.parametrize("channel", ["clearance", "roughness"])
def test_single_variable_increase_never_raises_efficiency(channel):
    rng = np.random.default_rng(9)
    base = perturbed(clearance_scale=rng.uniform(0.8, 1.2, 22),
                     roughness_scale=rng.uniform(0.8, 1.2, 22))
    eta0 = stage_and_overall(
        synthesize_flowfield(meanline_solve(SPEC, GAS, COEFFS, base), SPEC,
                             base, COEFFS, GRID), GRID, GAS).eta_p
    for row in range(0, 22, 5):
        b = perturbed()
        b.clearance = base.clearance.copy()
        b.roughness = base.roughness.copy()
        getattr(b, channel)[row] *= 1.3
        states = meanline_solve(SPEC, GAS, COEFFS, b)
        eta = stage_and_overall(
            synthesize_flowfield(states, SPEC, b, COEFFS, GRID), GRID, GAS).eta_p
        assert eta <= eta0 + 1e-12
