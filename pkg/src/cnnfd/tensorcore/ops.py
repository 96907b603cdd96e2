"""Dense 3D layer operations: forward and backward passes.

Activations use the channels-first layout (N, C, D, H, W), stored
contiguously in 32-bit floats; every op also accepts 64-bit inputs, which
the gradient checks rely on.  Reductions (weight gradients, batch-norm
statistics, losses) accumulate in 64 bits.

Convolutions follow cross-correlation semantics with zero padding.
Per-shape dispatch picks between the numba kernels (thin channels, large
planes) and an im2col/BLAS path (thick channels, small planes); both
produce bit-identical results for a fixed dispatch decision and thread
count.
"""

import numpy as np

from ..errors import NumericError, ShapeMismatchError
from . import conv_kernels as ck
from . import elem_kernels as ek

# im2col wins once the channel product dominates the gather cost; strided
# numba loops lose earlier because their loads do not stay contiguous.  Both
# crossovers were measured on the shapes used by the bundled networks.
_IM2COL_MIN_CHANNEL_PRODUCT = 2048
_IM2COL_MIN_CHANNEL_PRODUCT_STRIDED = 512

_AXES5 = ("samples", "channels", "axial", "radial", "tangential")


def require_shape(name, arr, shape):
    """Check `arr` against `shape` (None entries are free), naming the axis."""
    if arr.ndim != len(shape):
        raise ShapeMismatchError(
            f"{name}: expected {len(shape)} axes, got {arr.ndim} (shape {arr.shape})")
    for ax, want in enumerate(shape):
        if want is not None and arr.shape[ax] != want:
            axis = _AXES5[ax] if len(shape) == 5 else f"axis {ax}"
            raise ShapeMismatchError(
                f"{name}: {axis} extent {arr.shape[ax]} != expected {want}",
                axis=axis)


def require_finite(name, arr):
    if not np.all(np.isfinite(arr)):
        bad = int(np.size(arr) - np.count_nonzero(np.isfinite(arr)))
        raise NumericError(f"{name}: {bad} non-finite values")
    return arr


def conv_output_extent(size, k, stride, pad):
    return (size + 2 * pad - k) // stride + 1


def _check_conv_shapes(x, w, stride, padding):
    if x.ndim != 5 or w.ndim != 5:
        raise ShapeMismatchError(
            f"conv3d: need 5D input/weight, got {x.ndim}D/{w.ndim}D")
    if x.shape[1] != w.shape[1]:
        raise ShapeMismatchError(
            f"conv3d: input channels {x.shape[1]} != weight channels {w.shape[1]}",
            axis="channels")
    out_sp = []
    for ax, (k, s, p) in enumerate(zip(w.shape[2:], stride, padding)):
        e = conv_output_extent(x.shape[2 + ax], k, s, p)
        if e < 1:
            raise ShapeMismatchError(
                f"conv3d: {_AXES5[2 + ax]} extent {x.shape[2 + ax]} too small for "
                f"kernel {k} stride {s} pad {p}", axis=_AXES5[2 + ax])
        out_sp.append(e)
    return tuple(out_sp)


def _pad5(x, padding):
    pd, ph, pw = padding
    if pd == ph == pw == 0:
        return np.ascontiguousarray(x)
    return np.pad(x, ((0, 0), (0, 0), (pd, pd), (ph, ph), (pw, pw)))


def _use_im2col(ca, cb, stride):
    if stride == (1, 1, 1):
        return ca * cb >= _IM2COL_MIN_CHANNEL_PRODUCT
    return ca * cb >= _IM2COL_MIN_CHANNEL_PRODUCT_STRIDED


def _build_cols(xp, kshape, stride, out_spatial):
    ca = xp.shape[1]
    k_total = ca * kshape[0] * kshape[1] * kshape[2]
    m = xp.shape[0] * int(np.prod(out_spatial))
    cols = np.empty((k_total, m), dtype=xp.dtype)
    ck.im2col(xp, cols, *kshape, *stride, *out_spatial)
    return cols


def _small_mat(small):
    # (N,CB,D,H,W) -> (CB, M) with M ordered (n,d,h,w)
    cb = small.shape[1]
    return np.ascontiguousarray(small.transpose(1, 0, 2, 3, 4)).reshape(cb, -1)


def _parities(stride):
    # enumerate parity offsets for the axes that are strided by 2
    offs = [(0,) if s == 1 else (0, 1) for s in stride]
    for od in offs[0]:
        for oh in offs[1]:
            for ow in offs[2]:
                yield od, oh, ow


def _subtensor(xp, par, stride):
    od, oh, ow = par
    sd, sh, sw = stride
    return np.ascontiguousarray(xp[:, :, od::sd, oh::sh, ow::sw])


def _subkernel(w, par, stride):
    od, oh, ow = par
    sd, sh, sw = stride
    return np.ascontiguousarray(w[:, :, od::sd, oh::sh, ow::sw])


def _pure_stride2(stride):
    return all(s in (1, 2) for s in stride)


def _gather_unit(xp, w, out_spatial):
    out = np.empty((xp.shape[0], w.shape[0]) + out_spatial, dtype=xp.dtype)
    ck.gather_unit(xp, w, out)
    return out


def _scatter_unit(small, w, padded_spatial):
    # adjoint of the unit-stride gather as a full correlation: pad the small
    # side by k-1, flip the taps, swap the channel axes, and gather
    kd, kh, kw = w.shape[2:]
    gy = np.pad(small, ((0, 0), (0, 0), (kd - 1, kd - 1), (kh - 1, kh - 1),
                        (kw - 1, kw - 1)))
    wf = np.ascontiguousarray(w[:, :, ::-1, ::-1, ::-1].transpose(1, 0, 2, 3, 4))
    return _gather_unit(gy, wf, padded_spatial)


def _gather(xp, w, out_spatial, stride):
    """out[n,cb,q] = sum w[cb,ca,tap] * xp[n,ca,q*stride+tap]; xp pre-padded."""
    n, ca = xp.shape[0], xp.shape[1]
    cb = w.shape[0]
    if _use_im2col(ca, cb, stride):
        cols = _build_cols(xp, w.shape[2:], stride, out_spatial)
        y = w.reshape(cb, -1) @ cols
        return np.ascontiguousarray(
            y.reshape(cb, n, *out_spatial).transpose(1, 0, 2, 3, 4))
    if stride == (1, 1, 1):
        return _gather_unit(xp, w, out_spatial)
    if _pure_stride2(stride):
        # stride-2 axes split into parity sub-tensors, each convolved with
        # the matching sub-kernel at unit stride
        out = None
        for par in _parities(stride):
            wq = _subkernel(w, par, stride)
            if 0 in wq.shape:
                continue
            part = _gather_unit(_subtensor(xp, par, stride), wq, out_spatial)
            out = part if out is None else out + part
        return out
    out = np.empty((n, cb) + out_spatial, dtype=xp.dtype)
    ck.gather_strided(xp, w, out, *stride)
    return out


def _scatter(small, w, padded_shape, stride):
    """Adjoint of _gather: returns the padded big-side accumulation."""
    ca, cb = w.shape[1], w.shape[0]
    if _use_im2col(ca, cb, stride):
        xp = np.zeros(padded_shape, dtype=small.dtype)
        gcols = w.reshape(cb, -1).T @ _small_mat(small)
        ck.col2im(np.ascontiguousarray(gcols), xp, *w.shape[2:], *stride,
                  *small.shape[2:])
        return xp
    if stride == (1, 1, 1):
        return _scatter_unit(small, w, padded_shape[2:])
    if _pure_stride2(stride):
        xp = np.zeros(padded_shape, dtype=small.dtype)
        sd, sh, sw = stride
        for par in _parities(stride):
            wq = _subkernel(w, par, stride)
            if 0 in wq.shape:
                continue
            od, oh, ow = par
            # correlation support can be one short of the parity view; the
            # uncovered trailing positions stay zero
            ext = tuple(s + k - 1 for s, k in zip(small.shape[2:], wq.shape[2:]))
            view = xp[:, :, od::sd, oh::sh, ow::sw]
            view[:, :, :ext[0], :ext[1], :ext[2]] = _scatter_unit(small, wq, ext)
        return xp
    xp = np.zeros(padded_shape, dtype=small.dtype)
    ck.scatter_strided(small, w, xp, *stride)
    return xp


def _wgrad_unit(xp, small, kshape):
    gw = np.empty((small.shape[1], xp.shape[1]) + kshape, dtype=xp.dtype)
    exp = ck.expand_small(small, *xp.shape[2:])
    ck.wgrad_unit(xp, exp, gw)
    return gw


def _wgrad(xp, small, kshape, stride):
    ca, cb = xp.shape[1], small.shape[1]
    if _use_im2col(ca, cb, stride):
        cols = _build_cols(xp, kshape, stride, small.shape[2:])
        gw = _small_mat(small) @ cols.T
        return gw.reshape(cb, ca, *kshape)
    if stride == (1, 1, 1):
        return _wgrad_unit(xp, small, kshape)
    if _pure_stride2(stride):
        gw = np.zeros((cb, ca) + kshape, dtype=xp.dtype)
        sd, sh, sw = stride
        for par in _parities(stride):
            od, oh, ow = par
            ksub = gw[:, :, od::sd, oh::sh, ow::sw].shape[2:]
            if 0 in ksub:
                continue
            gw[:, :, od::sd, oh::sh, ow::sw] = _wgrad_unit(
                _subtensor(xp, par, stride), small, ksub)
        return gw
    gw = np.empty((cb, ca) + kshape, dtype=xp.dtype)
    ck.wgrad_strided(xp, small, gw, *stride)
    return gw


def _matmul_channels(mat, x):
    # (CB,CA) applied over the channel axis of (N,CA,D,H,W)
    n = x.shape[0]
    sp = x.shape[2:]
    y = np.matmul(mat[None], x.reshape(n, x.shape[1], -1))
    return y.reshape(n, mat.shape[0], *sp)


def conv3d_forward(x, w, b, stride=(1, 1, 1), padding=(1, 1, 1),
                   return_padded=False):
    """3D cross-correlation; w is (Cout, Cin, kd, kh, kw), b is (Cout,) or None.

    With return_padded=True also returns the padded input so a following
    backward pass can skip re-padding.
    """
    out_sp = _check_conv_shapes(x, w, stride, padding)
    if w.shape[2:] == (1, 1, 1) and stride == (1, 1, 1) and padding == (0, 0, 0):
        y = _matmul_channels(w.reshape(w.shape[0], w.shape[1]), x)
        xp = x
    else:
        xp = _pad5(x, padding)
        y = _gather(xp, w, out_sp, tuple(stride))
    if b is not None:
        y += b.reshape(1, -1, 1, 1, 1)
    return (y, xp) if return_padded else y


def conv3d_backward(gy, x, w, stride=(1, 1, 1), padding=(1, 1, 1),
                    with_bias=True, x_padded=None):
    """Gradients of conv3d_forward; returns (gx, gw, gb).

    Either `x` or the pre-padded `x_padded` from the forward pass must be
    given; passing the latter avoids a second padding copy.
    """
    pd, ph, pw = padding
    if x is None:
        x_shape = (x_padded.shape[0], x_padded.shape[1],
                   x_padded.shape[2] - 2 * pd, x_padded.shape[3] - 2 * ph,
                   x_padded.shape[4] - 2 * pw)
    else:
        x_shape = x.shape
    out_sp = tuple(conv_output_extent(x_shape[2 + i], w.shape[2 + i],
                                      stride[i], padding[i]) for i in range(3))
    require_shape("conv3d grad_out", gy, (x_shape[0], w.shape[0]) + out_sp)
    gy = np.ascontiguousarray(gy)
    gb = gy.sum(axis=(0, 2, 3, 4), dtype=np.float64).astype(gy.dtype) if with_bias else None
    if w.shape[2:] == (1, 1, 1) and stride == (1, 1, 1) and padding == (0, 0, 0):
        xs = x if x is not None else x_padded
        mat = w.reshape(w.shape[0], w.shape[1])
        gx = _matmul_channels(mat.T, gy)
        gym = np.ascontiguousarray(gy.transpose(1, 0, 2, 3, 4)).reshape(gy.shape[1], -1)
        xm = np.ascontiguousarray(xs.transpose(1, 0, 2, 3, 4)).reshape(xs.shape[1], -1)
        gw = gym @ xm.T
        return gx, gw.reshape(w.shape), gb
    xp = x_padded if x_padded is not None else _pad5(x, padding)
    gxp = _scatter(gy, w, xp.shape, tuple(stride))
    gx = gxp[:, :, pd:pd + x_shape[2], ph:ph + x_shape[3], pw:pw + x_shape[4]]
    gw = _wgrad(xp, gy, w.shape[2:], tuple(stride))
    return np.ascontiguousarray(gx), gw, gb


def conv_transpose3d_output_shape(x_shape, w, stride, padding):
    sp = []
    for ax, (k, s, p) in enumerate(zip(w.shape[2:], stride, padding)):
        sp.append((x_shape[2 + ax] - 1) * s - 2 * p + k)
    return tuple(sp)


def conv_transpose3d_forward(x, w, b, stride=(1, 2, 2), padding=(1, 1, 1)):
    """Transposed 3D convolution; w is (Cin, Cout, kd, kh, kw).

    Equals the data-gradient of a conv3d with the same stride/padding, so
    with the default kernel (3, 4, 4), stride (1, 2, 2), pad (1, 1, 1) the
    radial/tangential extents exactly double and the axial extent is kept.
    """
    if x.shape[1] != w.shape[0]:
        raise ShapeMismatchError(
            f"conv_transpose3d: input channels {x.shape[1]} != weight {w.shape[0]}",
            axis="channels")
    out_sp = conv_transpose3d_output_shape(x.shape, w, stride, padding)
    pd, ph, pw = padding
    padded = (x.shape[0], w.shape[1], out_sp[0] + 2 * pd, out_sp[1] + 2 * ph,
              out_sp[2] + 2 * pw)
    yp = _scatter(np.ascontiguousarray(x), w, padded, tuple(stride))
    y = np.ascontiguousarray(
        yp[:, :, pd:pd + out_sp[0], ph:ph + out_sp[1], pw:pw + out_sp[2]])
    if b is not None:
        y += b.reshape(1, -1, 1, 1, 1)
    return y


def conv_transpose3d_backward(gy, x, w, stride=(1, 2, 2), padding=(1, 1, 1),
                              with_bias=True):
    out_sp = conv_transpose3d_output_shape(x.shape, w, stride, padding)
    require_shape("conv_transpose3d grad_out", gy,
                  (x.shape[0], w.shape[1]) + out_sp)
    gy = np.ascontiguousarray(gy)
    gb = gy.sum(axis=(0, 2, 3, 4), dtype=np.float64).astype(gy.dtype) if with_bias else None
    gyp = _pad5(gy, padding)
    gx = _gather(gyp, w, x.shape[2:], tuple(stride))
    gw = _wgrad(gyp, np.ascontiguousarray(x), w.shape[2:], tuple(stride))
    return gx, gw, gb


def elu(x):
    """ELU with alpha=1: x for x>0, exp(x)-1 otherwise."""
    return ek.elu_fwd(np.ascontiguousarray(x))


def elu_backward(gy, y):
    """Derivative from the cached output: 1 for y>0, y+1 otherwise."""
    g = np.ascontiguousarray(gy).copy()
    ek.elu_bwd_inplace(g, y)
    return g


def elu_backward_(gy, y):
    """In-place variant: scales contiguous `gy` by the ELU derivative."""
    ek.elu_bwd_inplace(gy, y)
    return gy


def batchnorm3d_forward(x, scale, shift, running_mean, running_var,
                        train, momentum=0.1, eps=1e-5):
    """Per-channel batch normalization over (N, D, H, W).

    Train mode normalizes with biased batch statistics and updates the
    running estimates in place (running variance uses the unbiased form).
    Returns (y, cache); cache is None in inference mode.
    """
    c = x.shape[1]
    m = x.size // c
    x3 = np.ascontiguousarray(x).reshape(x.shape[0], c, -1)
    y3 = np.empty_like(x3)
    if train:
        if m < 2:
            raise NumericError("batchnorm3d: train mode needs population >= 2 per channel")
        xhat3 = np.empty_like(x3)
        mean = np.empty(c, np.float64)
        var = np.empty(c, np.float64)
        ek.bn_train_fwd(x3, scale, shift, eps, y3, xhat3, mean, var)
        if eps == 0.0 and np.any(var == 0.0):
            raise NumericError("batchnorm3d: zero variance with eps=0")
        running_mean *= 1.0 - momentum
        running_mean += momentum * mean.astype(running_mean.dtype)
        running_var *= 1.0 - momentum
        running_var += momentum * (var * m / (m - 1)).astype(running_var.dtype)
        cache = (xhat3, 1.0 / np.sqrt(var + eps), x.shape)
    else:
        ek.bn_infer_fwd(x3, scale, shift, running_mean, running_var, eps, y3)
        cache = None
    return y3.reshape(x.shape), cache


def batchnorm3d_backward(gy, cache, scale):
    """Gradients for train-mode batch norm: returns (gx, gscale, gshift)."""
    xhat3, inv_std, x_shape = cache
    c = gy.shape[1]
    gy3 = np.ascontiguousarray(gy).reshape(gy.shape[0], c, -1)
    gx3 = np.empty_like(gy3)
    gscale = np.empty(c, np.float64)
    gshift = np.empty(c, np.float64)
    ek.bn_train_bwd(gy3, xhat3, scale.astype(np.float64), inv_std,
                    gx3, gscale, gshift)
    return (gx3.reshape(x_shape), gscale.astype(scale.dtype),
            gshift.astype(scale.dtype))


def batchnorm3d_infer_backward(gy, scale, running_var, eps=1e-5):
    """Data gradient when normalizing with fixed running statistics."""
    inv_std = 1.0 / np.sqrt(running_var.astype(np.float64) + eps)
    k = (scale.astype(np.float64) * inv_std).astype(gy.dtype)
    return gy * k.reshape(1, -1, 1, 1, 1)


def huber_loss(pred, target, delta=1.0):
    """Mean Huber loss and its gradient with respect to pred."""
    if pred.shape != target.shape:
        raise ShapeMismatchError(
            f"huber_loss: pred {pred.shape} != target {target.shape}")
    if delta <= 0:
        raise ValueError("huber_loss: delta must be positive")
    pred = np.ascontiguousarray(pred)
    grad = np.empty_like(pred)
    total = ek.huber(pred, np.ascontiguousarray(target), float(delta), grad)
    n = pred.size
    grad *= 1.0 / n
    return float(total / n), grad
