"""Synthetic compressor ground truth: meanline recurrence plus structured
flow-field synthesis, standing in for CFD at desk scale."""

from .gas import GasProperties
from .geometry import (
    N_GEOM_PARAMS,
    N_GEOM_SECTIONS,
    N_PLANES,
    N_ROWS,
    N_STAGES,
    VARIABLES,
    CompressorSpec,
    OracleCoefficients,
    RowSpec,
    default_compressor,
    load_oracle_config,
    oracle_config_hash,
    plane_names,
    row_names,
    oracle_config_dict,
    save_oracle_config,
    stage_plane_bounds,
)
from .meanline import PlaneStates, meanline_solve, row_efficiency, row_loss_coefficient
from .synth import Sample, generate_case, synthesize_flowfield, tip_blob_amplitude

__all__ = [
    "CompressorSpec", "GasProperties", "OracleCoefficients", "PlaneStates",
    "RowSpec", "Sample", "VARIABLES", "N_GEOM_PARAMS", "N_GEOM_SECTIONS",
    "N_PLANES", "N_ROWS", "N_STAGES", "default_compressor", "generate_case",
    "load_oracle_config", "meanline_solve", "oracle_config_hash",
    "plane_names", "row_efficiency", "row_loss_coefficient", "row_names",
    "oracle_config_dict", "save_oracle_config", "stage_plane_bounds", "synthesize_flowfield",
    "tip_blob_amplitude",
]
