"""Layer graphs for the surrogate and the benchmark baselines."""

from .build import (
    ArchitectureConfig,
    build_cnnfd,
    build_double_conv,
    build_model,
    build_unet_baseline,
    cnnfd_config,
    doubleconv_config,
    reduced_cnnfd_config,
    unet_baseline_config,
)
from .checkpoint import load_checkpoint, save_checkpoint
from .graph import parameter_count, restore_state, snapshot_state

__all__ = [
    "ArchitectureConfig", "build_cnnfd", "build_double_conv", "build_model",
    "build_unet_baseline", "cnnfd_config", "doubleconv_config",
    "load_checkpoint", "parameter_count", "reduced_cnnfd_config",
    "restore_state", "save_checkpoint", "snapshot_state",
    "unet_baseline_config",
]
