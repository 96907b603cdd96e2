"""Checkpoint-backed predictor shared by the CLI and the HTTP service.

Loads one checkpoint, reconstructs the compressor definition stored inside
it, and serves build predictions end to end: feature assembly,
normalization, network forward pass, denormalization, and the performance
chain.  The baseline for delta reporting is the model's own prediction of
the design build, so a design-build request returns exactly zero deltas.
"""

import time

import numpy as np

from ..datasets.build import BuildInput, design_build
from ..errors import NumericError, OutOfEnvelopeError
from ..features import assemble_input
from ..model.checkpoint import load_checkpoint
from ..oracle.gas import GasProperties
from ..oracle.geometry import CompressorSpec, N_ROWS, OracleCoefficients
from ..postproc.averaging import IDX, massflow_average_circ
from ..postproc.grid import AnnulusGrid
from ..postproc.performance import breakdown_deltas, stage_and_overall

ENVELOPE = (0.25, 2.5)


class Predictor:
    def __init__(self, checkpoint_path):
        model, arch, in_stats, out_stats, manifest = load_checkpoint(checkpoint_path)
        self.model = model
        self.arch = arch
        self.input_stats = in_stats
        self.output_stats = out_stats
        self.manifest = manifest
        self.model_id = manifest["model_id"]
        oracle_cfg = manifest["metadata"].get("oracle_config")
        if oracle_cfg is None:
            raise NumericError("checkpoint lacks the oracle configuration")
        self.spec = CompressorSpec.from_dict(oracle_cfg["compressor"])
        self.coeffs = OracleCoefficients.from_dict(oracle_cfg["coefficients"])
        self.gas = GasProperties.from_dict(oracle_cfg["gas"])
        _, self.n_planes, self.n_radial, self.n_tangential = (
            arch.out_channels, *arch.grid)
        self.grid = AnnulusGrid.from_spec(self.spec, self.n_radial,
                                          self.n_tangential)
        self.output_reference = manifest.get("extra_tensors", {}).get(
            "output_reference")
        self.design = design_build(self.spec)
        self.baseline_field = self._field_for(self.design)
        self.baseline = stage_and_overall(self.baseline_field, self.grid, self.gas)
        self.baseline.deltas = breakdown_deltas(self.baseline, self.baseline)

    def validate_build_values(self, clearance, roughness):
        clearance = np.asarray(clearance, float)
        roughness = np.asarray(roughness, float)
        for name, arr in (("clearance", clearance), ("roughness", roughness)):
            if arr.shape != (N_ROWS,):
                raise ValueError(f"{name} must list {N_ROWS} values")
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"{name} contains non-finite values")
        lo, hi = ENVELOPE
        bad = np.flatnonzero((clearance < lo) | (clearance > hi))
        if bad.size:
            raise OutOfEnvelopeError("clearance", int(bad[0]),
                                     float(clearance[bad[0]]), lo, hi)
        ra_design = np.array([r.roughness_um for r in self.spec.rows])
        ratio = roughness / ra_design
        bad = np.flatnonzero((ratio < lo) | (ratio > hi))
        if bad.size:
            raise OutOfEnvelopeError("roughness", int(bad[0]),
                                     float(roughness[bad[0]]), lo, hi)
        return clearance, roughness

    def _field_for(self, build):
        x = assemble_input(build, self.n_radial, self.n_tangential)[None]
        z = self.input_stats.apply(x)
        pred = self.model.forward(z, train=False)
        out = self.output_stats.invert(pred)[0]
        if self.output_reference is not None:
            out = out + self.output_reference
        return out.astype(np.float64)

    def predict(self, clearance, roughness):
        """Returns (field, breakdown-with-deltas, latency seconds)."""
        clearance, roughness = self.validate_build_values(clearance, roughness)
        start = time.perf_counter()
        build = BuildInput(clearance=clearance, roughness=roughness,
                           geometry=self.spec.design_geometry.copy())
        field = self._field_for(build)
        breakdown = stage_and_overall(field, self.grid, self.gas,
                                      baseline=self.baseline)
        return field, breakdown, time.perf_counter() - start

    def radial_profiles(self, field, planes):
        prof = massflow_average_circ(field, self.grid)
        out = {}
        for plane in planes:
            out[int(plane)] = {name: prof[IDX[name], plane].tolist()
                               for name in IDX}
        return out

    def contour_slices(self, field, planes, variables=None):
        variables = variables or list(IDX)
        slices = []
        for plane in planes:
            for name in variables:
                arr = np.ascontiguousarray(field[IDX[name], plane], "<f4")
                slices.append({"plane": int(plane), "variable": name,
                               "shape": list(arr.shape), "dtype": "<f4",
                               "data": arr})
        return slices
