"""Network input assembly from a build.

Row-wise inputs map onto the 24 axial planes by duplicating the first and
last rows (the extra planes are the compressor inlet and outlet); geometry
sections interpolate linearly in span onto the radial grid; everything
broadcasts tangentially.  Channels are concatenated in the order clearance,
roughness, inlet angle, outlet angle, max thickness, chord, pitch.
"""

import numpy as np

from .errors import ShapeMismatchError
from .oracle.geometry import N_GEOM_SECTIONS, N_PLANES, N_ROWS
from .tensorcore import ops

INPUT_CHANNEL_NAMES = ("clearance", "roughness", "inlet_angle", "outlet_angle",
                       "max_thickness", "chord", "pitch")


def extend_axial(values):
    """(..., 22) row-wise values -> (..., 24) plane-wise values."""
    values = np.asarray(values)
    if values.shape[-1] != N_ROWS:
        raise ShapeMismatchError(
            f"extend_axial: expected {N_ROWS} rows, got {values.shape[-1]}",
            axis="rows")
    return np.concatenate([values[..., :1], values, values[..., -1:]], axis=-1)


def interp_radial(geometry, n_radial):
    """(5, 24, 8) section values -> (5, 24, n_radial) node values.

    Sections sit at uniform span fractions; interpolation is piecewise
    linear with clamped ends, at cell-centre node spans.
    """
    geometry = np.asarray(geometry, np.float64)
    if not np.all(np.isfinite(geometry)):
        raise ShapeMismatchError("interp_radial: geometry must be finite")
    sections = np.linspace(0.0, 1.0, N_GEOM_SECTIONS)
    spans = (np.arange(n_radial) + 0.5) / n_radial
    out = np.empty(geometry.shape[:-1] + (n_radial,))
    for i in range(geometry.shape[0]):
        for p in range(geometry.shape[1]):
            out[i, p] = np.interp(spans, sections, geometry[i, p])
    return out


def assemble_input(build, n_radial=64, n_tangential=64):
    """BuildInput -> (7, 24, n_radial, n_tangential) float32 network input."""
    scalars = extend_axial(np.stack([build.clearance, build.roughness]))  # (2,24)
    geom = interp_radial(extend_axial(np.moveaxis(build.geometry, 1, -1)
                                      ).transpose(0, 2, 1), n_radial)      # (5,24,R)
    out = np.empty((7, N_PLANES, n_radial, n_tangential), np.float32)
    out[:2] = scalars[:, :, None, None]
    out[2:] = geom[:, :, :, None]
    return out


def assemble_batch(builds, n_radial=64, n_tangential=64):
    return np.stack([assemble_input(b, n_radial, n_tangential) for b in builds])


def input_stem(x, weight, bias=None):
    """Pointwise channel projection: (N, 7, P, R, T) -> (N, 6, P, R, T)."""
    return ops.conv3d_forward(x, weight, bias, stride=(1, 1, 1),
                              padding=(0, 0, 0))
