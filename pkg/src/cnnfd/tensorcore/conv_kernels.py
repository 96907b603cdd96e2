"""Numba kernels for 3D convolution forward/adjoint/weight-gradient passes.

All kernels operate on pre-padded inputs so the hot loops carry no boundary
branches.  Three primitives cover every convolution-family operation in the
package:

  gather  : out[n,cb,q] = sum_ca,tap  w[cb,ca,tap] * big[n,ca, q*stride+tap]
  scatter : big[n,ca, q*stride+tap] += w[cb,ca,tap] * small[n,cb,q]   (adjoint)
  wgrad   : gw[cb,ca,tap] = sum_n,q  big[n,ca, q*stride+tap] * small[n,cb,q]

A convolution uses (big=input, small=output, w=(Cout,Cin,k)); a transposed
convolution uses the same primitives with the input/output roles swapped
and w=(Cin,Cout,k).

Layout tricks, all chosen so the innermost loops run over contiguous
pre-sliced 1D views (which LLVM vectorizes):

  * unit stride: the padded volume is linearised; a kernel tap becomes one
    constant offset and each tap pass is a fused multiply-add sweep.  A
    fraction of positions near plane boundaries is computed and thrown
    away; `expand_small` zero-fills those positions on the small side so
    adjoint/wgrad sums are unaffected.
  * stride 2 (every strided layer in the bundled networks) is handled in
    ops.py by splitting the strided axes into parity sub-tensors, each of
    which convolves at unit stride; the adjoint is a gather over the
    zero-extended small side with flipped taps.
  * thick channel counts: ops.py switches to im2col + BLAS; the column
    matrix is built here so the copy runs row-wise, not elementwise.

Weight-gradient taps accumulate in 64-bit (the im2col path accumulates
inside BLAS).

Determinism: every prange index writes a disjoint output slice and inner
loops run in a fixed order, so results are bit-identical regardless of the
thread count.
"""

import numpy as np
from numba import njit, prange

_JIT = dict(parallel=True, fastmath=True, cache=True)


# ---------------------------------------------------------------- unit stride

@njit(**_JIT)
def gather_unit(xp, w, out):
    # xp (N,CA,Dp,Hp,Wp) padded, w (CB,CA,kd,kh,kw), out (N,CB,Do,Ho,Wo)
    N, CA, Dp, Hp, Wp = xp.shape
    CB = w.shape[0]
    kd, kh, kw = w.shape[2], w.shape[3], w.shape[4]
    Do, Ho, Wo = out.shape[2], out.shape[3], out.shape[4]
    plane = Hp * Wp
    L = (Do - 1) * plane + (Ho - 1) * Wp + Wo
    for nb in prange(N * CB):
        n = nb // CB
        cb = nb % CB
        acc = np.zeros(L, dtype=xp.dtype)
        for ca in range(CA):
            xv = xp[n, ca].reshape(-1)
            for zd in range(kd):
                for zh in range(kh):
                    base = zd * plane + zh * Wp
                    if kw == 3:
                        a0 = xv[base:base + L]
                        a1 = xv[base + 1:base + 1 + L]
                        a2 = xv[base + 2:base + 2 + L]
                        c0 = w[cb, ca, zd, zh, 0]
                        c1 = w[cb, ca, zd, zh, 1]
                        c2 = w[cb, ca, zd, zh, 2]
                        for i in range(L):
                            acc[i] += c0 * a0[i] + c1 * a1[i] + c2 * a2[i]
                    else:
                        for zw in range(kw):
                            c = w[cb, ca, zd, zh, zw]
                            a = xv[base + zw:base + zw + L]
                            for i in range(L):
                                acc[i] += c * a[i]
        for d in range(Do):
            for h in range(Ho):
                p = d * plane + h * Wp
                row = out[n, cb, d, h]
                for i in range(Wo):
                    row[i] = acc[p + i]


@njit(**_JIT)
def expand_small(small, Dp, Hp, Wp):
    # Lay the small grid out on the padded-volume linear index, zero elsewhere.
    N, CB, Do, Ho, Wo = small.shape
    plane = Hp * Wp
    L = (Do - 1) * plane + (Ho - 1) * Wp + Wo
    out = np.zeros((N, CB, L), dtype=small.dtype)
    for nb in prange(N * CB):
        n = nb // CB
        cb = nb % CB
        for d in range(Do):
            for h in range(Ho):
                p = d * plane + h * Wp
                row = small[n, cb, d, h]
                for i in range(Wo):
                    out[n, cb, p + i] = row[i]
    return out


@njit(**_JIT)
def scatter_unit(small_exp, w, xp):
    # small_exp (N,CB,L) from expand_small; accumulates into padded xp.
    N, CA, Dp, Hp, Wp = xp.shape
    CB = w.shape[0]
    kd, kh, kw = w.shape[2], w.shape[3], w.shape[4]
    plane = Hp * Wp
    L = small_exp.shape[2]
    for na in prange(N * CA):
        n = na // CA
        ca = na % CA
        xv = xp[n, ca].reshape(-1)
        for cb in range(CB):
            g = small_exp[n, cb]
            for zd in range(kd):
                for zh in range(kh):
                    base = zd * plane + zh * Wp
                    for zw in range(kw):
                        c = w[cb, ca, zd, zh, zw]
                        t = xv[base + zw:base + zw + L]
                        for i in range(L):
                            t[i] += c * g[i]


@njit(**_JIT)
def wgrad_unit(xp, small_exp, gw):
    # per-sample partial dots in the input dtype, combined in 64-bit
    N, CA, Dp, Hp, Wp = xp.shape
    CB = gw.shape[0]
    kd, kh, kw = gw.shape[2], gw.shape[3], gw.shape[4]
    plane = Hp * Wp
    L = small_exp.shape[2]
    for ba in prange(CB * CA):
        cb = ba // CA
        ca = ba % CA
        part = np.zeros(1, dtype=xp.dtype)
        for zd in range(kd):
            for zh in range(kh):
                for zw in range(kw):
                    off = zd * plane + zh * Wp + zw
                    s = 0.0
                    for n in range(N):
                        xv = xp[n, ca].reshape(-1)
                        a = xv[off:off + L]
                        g = small_exp[n, cb]
                        t = part[0] - part[0]
                        for i in range(L):
                            t += a[i] * g[i]
                        s += t
                    gw[cb, ca, zd, zh, zw] = s


# -------------------------------------------------------- generic stride path

@njit(**_JIT)
def gather_strided(xp, w, out, sd, sh, sw):
    N, CA, Dp, Hp, Wp = xp.shape
    CB = w.shape[0]
    kd, kh, kw = w.shape[2], w.shape[3], w.shape[4]
    Do, Ho, Wo = out.shape[2], out.shape[3], out.shape[4]
    span = (Wo - 1) * sw + 1
    for nb in prange(N * CB):
        n = nb // CB
        cb = nb % CB
        for d in range(Do):
            for h in range(Ho):
                acc = np.zeros(Wo, dtype=xp.dtype)
                for ca in range(CA):
                    for zd in range(kd):
                        for zh in range(kh):
                            xrow = xp[n, ca, d * sd + zd, h * sh + zh]
                            for zw in range(kw):
                                c = w[cb, ca, zd, zh, zw]
                                a = xrow[zw:zw + span:sw]
                                for i in range(Wo):
                                    acc[i] += c * a[i]
                row = out[n, cb, d, h]
                for i in range(Wo):
                    row[i] = acc[i]


@njit(**_JIT)
def scatter_strided(small, w, xp, sd, sh, sw):
    N, CA, Dp, Hp, Wp = xp.shape
    CB = w.shape[0]
    kd, kh, kw = w.shape[2], w.shape[3], w.shape[4]
    Do, Ho, Wo = small.shape[2], small.shape[3], small.shape[4]
    span = (Wo - 1) * sw + 1
    for na in prange(N * CA):
        n = na // CA
        ca = na % CA
        for cb in range(CB):
            for d in range(Do):
                for h in range(Ho):
                    g = small[n, cb, d, h]
                    for zd in range(kd):
                        for zh in range(kh):
                            xrow = xp[n, ca, d * sd + zd, h * sh + zh]
                            for zw in range(kw):
                                c = w[cb, ca, zd, zh, zw]
                                t = xrow[zw:zw + span:sw]
                                for i in range(Wo):
                                    t[i] += c * g[i]


@njit(**_JIT)
def wgrad_strided(xp, small, gw, sd, sh, sw):
    N, CA, Dp, Hp, Wp = xp.shape
    CB = gw.shape[0]
    kd, kh, kw = gw.shape[2], gw.shape[3], gw.shape[4]
    Do, Ho, Wo = small.shape[2], small.shape[3], small.shape[4]
    span = (Wo - 1) * sw + 1
    for ba in prange(CB * CA):
        cb = ba // CA
        ca = ba % CA
        part = np.zeros(1, dtype=xp.dtype)
        for zd in range(kd):
            for zh in range(kh):
                for zw in range(kw):
                    s = 0.0
                    for n in range(N):
                        t = part[0] - part[0]
                        for d in range(Do):
                            for h in range(Ho):
                                xrow = xp[n, ca, d * sd + zd, h * sh + zh]
                                a = xrow[zw:zw + span:sw]
                                g = small[n, cb, d, h]
                                for i in range(Wo):
                                    t += a[i] * g[i]
                        s += t
                    gw[cb, ca, zd, zh, zw] = s


# -------------------------------------------------------------- im2col bridge
# cols is (K, M) with K = (ca, zd, zh, zw) and M = (n, d, h, w); for unit
# tangential stride every (k; n,d,h) cell is one contiguous run of length Wo.

@njit(**_JIT)
def im2col(xp, cols, kd, kh, kw, sd, sh, sw, Do, Ho, Wo):
    N, CA, Dp, Hp, Wp = xp.shape
    K = CA * kd * kh * kw
    for k in prange(K):
        ca = k // (kd * kh * kw)
        r = k % (kd * kh * kw)
        zd = r // (kh * kw)
        zh = (r % (kh * kw)) // kw
        zw = r % kw
        dst = cols[k]
        m = 0
        for n in range(N):
            for d in range(Do):
                for h in range(Ho):
                    xrow = xp[n, ca, d * sd + zd, h * sh + zh]
                    if sw == 1:
                        a = xrow[zw:zw + Wo]
                        for i in range(Wo):
                            dst[m + i] = a[i]
                    else:
                        for i in range(Wo):
                            dst[m + i] = xrow[zw + i * sw]
                    m += Wo


@njit(**_JIT)
def col2im(cols, xp, kd, kh, kw, sd, sh, sw, Do, Ho, Wo):
    # adjoint of im2col; parallel over n so accumulation never races
    N, CA, Dp, Hp, Wp = xp.shape
    taps = kd * kh * kw
    for n in prange(N):
        for ca in range(CA):
            for r in range(taps):
                zd = r // (kh * kw)
                zh = (r % (kh * kw)) // kw
                zw = r % kw
                src = cols[ca * taps + r]
                m = n * Do * Ho * Wo
                for d in range(Do):
                    for h in range(Ho):
                        xrow = xp[n, ca, d * sd + zd, h * sh + zh]
                        if sw == 1:
                            t = xrow[zw:zw + Wo]
                            for i in range(Wo):
                                t[i] += src[m + i]
                        else:
                            for i in range(Wo):
                                xrow[zw + i * sw] += src[m + i]
                        m += Wo


def warmup(dtype=np.float32):
    """Compile the kernels for the given dtype on toy shapes."""
    x = np.zeros((1, 1, 3, 4, 5), dtype=dtype)
    w = np.zeros((1, 1, 3, 3, 3), dtype=dtype)
    y = np.zeros((1, 1, 1, 2, 3), dtype=dtype)
    gather_unit(x, w, y)
    gather_strided(x, w, np.zeros((1, 1, 1, 1, 2), dtype=dtype), 1, 2, 2)
    e = expand_small(y, 3, 4, 5)
    scatter_unit(e, w, x)
    scatter_strided(y, w, x, 1, 1, 1)
    wgrad_unit(x, e, w)
    wgrad_strided(x, y, w, 1, 1, 1)
    cols = np.zeros((27, 6), dtype=dtype)
    im2col(x, cols, 3, 3, 3, 1, 1, 1, 1, 2, 3)
    col2im(cols, x, 3, 3, 3, 1, 1, 1, 1, 2, 3)
