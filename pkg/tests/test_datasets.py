"""Experiment design, container round-trips, splits, normalization."""

import json
import os

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cnnfd.datasets import (
    BuildInput,
    compute_normalization,
    design_build,
    generate_dataset,
    lhs_sample,
    read_dataset,
    stratified_split,
    write_dataset,
)
from cnnfd.errors import ConfigError, DataError, IntegrityError
from cnnfd.oracle import GasProperties, OracleCoefficients, default_compressor

GAS = GasProperties()
SPEC = default_compressor(GAS)
COEFFS = OracleCoefficients()


@pytest.fixture(scope="module")
def small_dataset():
    return generate_dataset(SPEC, GAS, COEFFS, 12, seed=3, n_radial=8,
                            n_tangential=8)


def test_lhs_marginal_coverage():
    n = 40
    builds = lhs_sample(SPEC, n, seed=5)
    cl = np.stack([b.clearance for b in builds])
    ra = np.stack([b.roughness for b in builds])
    ra_design = np.array([r.roughness_um for r in SPEC.rows])
    u = np.concatenate([(cl - 0.5) / 1.0, (ra / ra_design - 0.5) / 1.0], axis=1)
    # every axis uses each of the n strata exactly once (pigeonhole)
    strata = np.floor(u * n).astype(int)
    for axis in range(44):
        assert sorted(strata[:, axis]) == list(range(n))


def test_lhs_single_sample():
    builds = lhs_sample(SPEC, 1, seed=0)
    assert len(builds) == 1
    assert np.all((builds[0].clearance >= 0.5) & (builds[0].clearance <= 1.5))


def test_lhs_rejects_zero_samples():
    with pytest.raises(ConfigError):
        lhs_sample(SPEC, 0, seed=0)


def test_lhs_geometry_fixed_at_design():
    builds = lhs_sample(SPEC, 3, seed=1)
    for b in builds:
        np.testing.assert_array_equal(b.geometry, SPEC.design_geometry)


def test_build_validation():
    with pytest.raises(ConfigError):
        BuildInput(clearance=np.full(22, 3.0), roughness=np.ones(22),
                   geometry=SPEC.design_geometry)
    with pytest.raises(ConfigError):
        BuildInput(clearance=np.ones(21), roughness=np.ones(21),
                   geometry=SPEC.design_geometry)


def test_build_array_roundtrip():
    b = design_build(SPEC)
    b2 = BuildInput.from_array(b.to_array())
    np.testing.assert_allclose(b2.clearance, b.clearance, rtol=1e-6)
    np.testing.assert_allclose(b2.geometry, b.geometry, rtol=1e-6)


def test_split_counts_400():
    rng = np.random.default_rng(0)
    eta = rng.normal(0.9, 0.001, 400)
    sp = stratified_split(eta, seed=1)
    counts = [len(sp.indices(n)) for n in ("train", "validation", "holdout")]
    assert counts == [280, 80, 40]


def test_split_deterministic():
    rng = np.random.default_rng(1)
    eta = rng.normal(0.9, 0.001, 57)
    a = stratified_split(eta, seed=9)
    b = stratified_split(eta, seed=9)
    np.testing.assert_array_equal(a.labels, b.labels)
    c = stratified_split(eta, seed=10)
    assert not np.array_equal(a.labels, c.labels)


@settings(max_examples=25, deadline=None)
@given(n=st.integers(10, 300), seed=st.integers(0, 10_000))
def test_split_fraction_bounds(n, seed):
    rng = np.random.default_rng(seed)
    eta = rng.normal(0.9, 0.001, n)
    sp = stratified_split(eta, seed=seed)
    for frac, name in zip((0.7, 0.2, 0.1), ("train", "validation", "holdout")):
        assert abs(len(sp.indices(name)) - frac * n) <= 1.0


def test_split_bins_feed_each_split_proportionally():
    rng = np.random.default_rng(4)
    eta = rng.normal(0.9, 0.001, 200)
    sp = stratified_split(eta, seed=2)
    for b in range(10):
        members = sp.bin_index == b
        n_b = members.sum()
        for frac, name in zip((0.7, 0.2, 0.1),
                              ("train", "validation", "holdout")):
            got = (members & (sp.labels == ("train", "validation",
                                            "holdout").index(name))).sum()
            assert abs(got - frac * n_b) <= 2.0


def test_split_duplicate_eta_merges_bins():
    eta = np.concatenate([np.full(30, 0.9), np.full(10, 0.91)])
    with pytest.warns(UserWarning, match="collapsed"):
        sp = stratified_split(eta, seed=0)
    counts = [len(sp.indices(n)) for n in ("train", "validation", "holdout")]
    assert sum(counts) == 40 and abs(counts[0] - 28) <= 1


def test_normalization_statistics(small_dataset):
    stats = compute_normalization(small_dataset.fields)
    z = stats.apply(small_dataset.fields)
    mean = z.mean(axis=(0, 3, 4))
    std = z.std(axis=(0, 3, 4))
    assert np.abs(mean).max() < 1e-4
    varying = ~stats.clamped
    assert np.abs(std[varying] - 1).max() < 1e-3


def test_normalization_constant_channel_clamps():
    data = np.ones((4, 2, 3, 5, 5), np.float32)
    data[:, 1] = np.random.default_rng(0).normal(5, 2, (4, 3, 5, 5))
    with pytest.warns(UserWarning, match="clamps"):
        stats = compute_normalization(data)
    z = stats.apply(data)
    assert np.abs(z[:, 0]).max() == 0.0


def test_normalization_roundtrip(small_dataset):
    stats = compute_normalization(small_dataset.fields)
    z = stats.apply(small_dataset.fields)
    back = stats.invert(z)
    denom = np.abs(small_dataset.fields).max()
    assert np.abs(back - small_dataset.fields).max() / denom < 1e-6


def test_container_roundtrip(tmp_path, small_dataset):
    write_dataset(small_dataset, tmp_path / "ds")
    ds2 = read_dataset(tmp_path / "ds")
    np.testing.assert_array_equal(ds2.fields, small_dataset.fields)
    np.testing.assert_allclose(ds2.overall_eta_p, small_dataset.overall_eta_p)
    assert ds2.oracle_hash == small_dataset.oracle_hash
    for b1, b2 in zip(small_dataset.builds, ds2.builds):
        np.testing.assert_allclose(b1.clearance, b2.clearance, rtol=1e-6)


def test_container_truncated_blob_names_file(tmp_path, small_dataset):
    path = tmp_path / "ds"
    write_dataset(small_dataset, path)
    blob = path / "fields.bin"
    blob.write_bytes(blob.read_bytes()[:-8])
    with pytest.raises(IntegrityError) as err:
        read_dataset(path)
    assert err.value.filename == "fields.bin"


def test_container_shape_tamper_detected(tmp_path, small_dataset):
    path = tmp_path / "ds"
    write_dataset(small_dataset, path)
    manifest = json.loads((path / "manifest.json").read_text())
    manifest["field_shape"] = [6, 24, 8, 4]
    (path / "manifest.json").write_text(json.dumps(manifest))
    with pytest.raises(DataError, match="fields.bin holds"):
        read_dataset(path)


def test_container_unknown_schema(tmp_path, small_dataset):
    path = tmp_path / "ds"
    write_dataset(small_dataset, path)
    manifest = json.loads((path / "manifest.json").read_text())
    manifest["schema_version"] = 99
    (path / "manifest.json").write_text(json.dumps(manifest))
    with pytest.raises(DataError, match="schema"):
        read_dataset(path)
