"""Dataset generation: LHS designs evaluated through the synthetic oracle."""

import numpy as np

from ..oracle.geometry import oracle_config_hash
from ..oracle.synth import generate_case
from ..postproc.grid import AnnulusGrid
from .build import lhs_sample
from .container import Dataset


def generate_dataset(spec, gas, coeffs, n, seed, n_radial=64, n_tangential=64,
                     clearance_range=(0.5, 1.5), roughness_range=(0.5, 1.5)):
    grid = AnnulusGrid.from_spec(spec, n_radial, n_tangential)
    builds = lhs_sample(spec, n, seed, clearance_range, roughness_range)
    fields = np.empty((n, 6, grid.n_planes, n_radial, n_tangential), np.float32)
    eta = np.empty(n)
    mdot = np.empty(n)
    for k, build in enumerate(builds):
        sample = generate_case(spec, gas, coeffs, build, grid)
        fields[k] = sample.field.astype(np.float32)
        eta[k] = sample.breakdown.eta_p
        mdot[k] = sample.breakdown.mdot
    return Dataset(fields=fields, builds=builds, overall_eta_p=eta,
                   overall_mdot=mdot, seed=seed,
                   oracle_hash=oracle_config_hash(spec, coeffs, gas))
