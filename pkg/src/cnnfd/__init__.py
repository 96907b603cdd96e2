"""cnnfd: compressor flow-field surrogate toolkit.

Predicts the structured 3D flow field of a 10-stage axial compressor from
per-row tip clearance and surface roughness, then derives radial profiles,
stage-wise and overall performance.  Ground truth comes from a synthetic
meanline-plus-synthesis model; training and inference run on CPU.

Set CNNFD_THREADS to cap the compute worker threads (numba kernels and,
when set before the first numpy import, the BLAS pool).
"""

import os as _os
import sys as _sys

__version__ = "0.1.0"

# TBB in this environment is too old for numba; pick OpenMP before numba loads.
_os.environ.setdefault("NUMBA_THREADING_LAYER", "omp")
_os.environ.setdefault("OMP_WAIT_POLICY", "PASSIVE")
if "numpy" not in _sys.modules:
    _os.environ.setdefault("OPENBLAS_NUM_THREADS", "1")

_cap = _os.environ.get("CNNFD_THREADS")
if _cap and "numpy" not in _sys.modules:
    for _var in ("OPENBLAS_NUM_THREADS", "OMP_NUM_THREADS"):
        _os.environ.setdefault(_var, _cap)


def thread_cap():
    """Configured worker-thread cap, or None for the numba default."""
    cap = _os.environ.get("CNNFD_THREADS")
    return max(1, int(cap)) if cap else None


def apply_thread_cap():
    """Apply CNNFD_THREADS to the numba thread pool (idempotent)."""
    cap = thread_cap()
    if cap is None:
        return
    import numba

    numba.set_num_threads(min(cap, numba.config.NUMBA_NUM_THREADS))
