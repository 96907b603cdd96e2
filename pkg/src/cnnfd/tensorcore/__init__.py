"""Tensor arithmetic: conv/batch-norm/activation layers with hand-rolled
backward passes, and the AdamW optimizer.  Correctness is pinned by the
finite-difference and naive-loop oracle tests rather than any external
framework."""

from .ops import (
    batchnorm3d_backward,
    batchnorm3d_forward,
    batchnorm3d_infer_backward,
    conv3d_backward,
    conv3d_forward,
    conv_output_extent,
    conv_transpose3d_backward,
    conv_transpose3d_forward,
    conv_transpose3d_output_shape,
    elu,
    elu_backward,
    elu_backward_,
    huber_loss,
    require_finite,
    require_shape,
)
from .optim import AdamWConfig, OptimizerState, adamw_step

__all__ = [
    "AdamWConfig",
    "OptimizerState",
    "adamw_step",
    "batchnorm3d_backward",
    "batchnorm3d_forward",
    "batchnorm3d_infer_backward",
    "conv3d_backward",
    "conv3d_forward",
    "conv_output_extent",
    "conv_transpose3d_backward",
    "conv_transpose3d_forward",
    "conv_transpose3d_output_shape",
    "elu",
    "elu_backward",
    "elu_backward_",
    "huber_loss",
    "require_finite",
    "require_shape",
]
