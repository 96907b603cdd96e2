"""Input assembly: axial extension, radial interpolation, broadcasting."""

import numpy as np
import pytest

from cnnfd.datasets import design_build
from cnnfd.errors import ShapeMismatchError
from cnnfd.features import assemble_input, extend_axial, interp_radial, input_stem
from cnnfd.oracle import GasProperties, default_compressor

SPEC = default_compressor(GasProperties())


def test_extend_axial_duplicates_ends():
    row = np.arange(22.0)
    out = extend_axial(row)
    assert out.shape == (24,)
    assert out[0] == out[1] == 0.0
    assert out[23] == out[22] == 21.0
    np.testing.assert_array_equal(out[1:23], row)


def test_extend_axial_constant_stays_constant():
    out = extend_axial(np.full(22, 3.5))
    np.testing.assert_array_equal(out, np.full(24, 3.5))


def test_extend_axial_wrong_count():
    with pytest.raises(ShapeMismatchError):
        extend_axial(np.ones(21))


def test_interp_radial_constant():
    geom = np.full((5, 24, 8), 2.0)
    out = interp_radial(geom, 64)
    assert out.shape == (5, 24, 64)
    np.testing.assert_allclose(out, 2.0)


def test_interp_radial_linear_exact():
    sections = np.linspace(0, 1, 8)
    geom = np.broadcast_to(3.0 + 2.0 * sections, (5, 24, 8)).copy()
    out = interp_radial(geom, 64)
    spans = (np.arange(64) + 0.5) / 64
    np.testing.assert_allclose(out[0, 0], 3.0 + 2.0 * spans, rtol=1e-12)


def test_interp_two_station_hand_case():
    # values (0, 1) at spans (0, 1): the node at span 0.25 reads 0.25
    vals = np.interp([0.25], [0.0, 1.0], [0.0, 1.0])
    assert vals[0] == pytest.approx(0.25)
    geom = np.zeros((5, 24, 8))
    geom[..., :] = np.linspace(0, 1, 8)
    out = interp_radial(geom, 4)  # spans 0.125, 0.375, 0.625, 0.875
    np.testing.assert_allclose(out[0, 0], [0.125, 0.375, 0.625, 0.875],
                               rtol=1e-12)


def test_assemble_shape_and_broadcast():
    build = design_build(SPEC)
    x = assemble_input(build, 64, 64)
    assert x.shape == (7, 24, 64, 64)
    # clearance channel constant over the plane, equal to the extended value
    ext = extend_axial(build.clearance)
    for p in (0, 5, 23):
        plane = x[0, p]
        assert np.ptp(plane) == 0.0
        assert plane[0, 0] == pytest.approx(ext[p], rel=1e-6)
    # geometry channels do not depend on the tangential index
    assert np.ptp(x[4, 3], axis=1).max() == 0.0
    # all tangential slices equal (broadcast invariance)
    np.testing.assert_array_equal(x[..., 0], x[..., 17])


def test_row_change_touches_single_plane():
    b1 = design_build(SPEC)
    b2 = design_build(SPEC)
    b2.clearance = b2.clearance.copy()
    b2.clearance[4] *= 1.2
    x1 = assemble_input(b1, 16, 16)
    x2 = assemble_input(b2, 16, 16)
    diff = np.abs(x1 - x2).max(axis=(2, 3))
    changed = np.argwhere(diff > 0)
    assert changed.tolist() == [[0, 5]]  # channel 0, plane k+1


def test_boundary_row_change_touches_duplicate_plane():
    b1 = design_build(SPEC)
    b2 = design_build(SPEC)
    b2.clearance = b2.clearance.copy()
    b2.clearance[0] *= 1.3
    diff = np.abs(assemble_input(b1, 8, 8) - assemble_input(b2, 8, 8)).max(axis=(2, 3))
    assert sorted(np.argwhere(diff > 0).tolist()) == [[0, 0], [0, 1]]


def test_input_stem_projects_channels():
    rng = np.random.default_rng(0)
    x = rng.standard_normal((1, 7, 4, 8, 8)).astype(np.float32)
    w = np.zeros((6, 7, 1, 1, 1), np.float32)
    for c in range(6):
        w[c, c, 0, 0, 0] = 1.0  # copy first six channels, drop the seventh
    y = input_stem(x, w)
    assert y.shape == (1, 6, 4, 8, 8)
    np.testing.assert_allclose(y, x[:, :6], rtol=1e-6)
