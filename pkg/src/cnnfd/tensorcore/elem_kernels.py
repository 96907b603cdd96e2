"""Fused elementwise/reduction kernels: activation, batch norm, Huber, AdamW.

These replace chains of numpy temporaries on the multi-megabyte activation
tensors.  They are memory-bound, so inner arithmetic runs in 64-bit and is
narrowed on store; statistics and loss sums stay 64-bit throughout.  All
loops are deterministic for any thread count (prange over disjoint slices;
reductions are sequential per channel).
"""

import numpy as np
from numba import njit, prange

_JIT = dict(parallel=True, fastmath=True, cache=True)


@njit(**_JIT)
def elu_fwd(x):
    xf = x.reshape(-1)
    y = np.empty_like(xf)
    for i in prange(xf.size):
        v = xf[i]
        y[i] = v if v > 0 else np.expm1(v)
    return y.reshape(x.shape)


@njit(**_JIT)
def elu_bwd_inplace(g, y):
    gf = g.reshape(-1)
    yf = y.reshape(-1)
    for i in prange(gf.size):
        v = yf[i]
        if v <= 0:
            gf[i] *= v + 1.0


@njit(fastmath=True, cache=True)
def huber(pred, target, delta, grad):
    # grad is written in place (unnormalized); returns the loss sum in f64
    p = pred.reshape(-1)
    t = target.reshape(-1)
    g = grad.reshape(-1)
    total = 0.0
    for i in range(p.size):
        e = np.float64(p[i]) - np.float64(t[i])
        a = abs(e)
        if a <= delta:
            total += 0.5 * e * e
            g[i] = e
        else:
            total += delta * (a - 0.5 * delta)
            g[i] = delta if e > 0 else -delta
    return total


@njit(**_JIT)
def bn_train_fwd(x3, scale, shift, eps, y3, xhat3, mean, var):
    # x3 (N,C,S); mean/var are f64 out-params of length C
    N, C, S = x3.shape
    for c in prange(C):
        s1 = 0.0
        s2 = 0.0
        for n in range(N):
            row = x3[n, c]
            for i in range(S):
                v = np.float64(row[i])
                s1 += v
                s2 += v * v
        m = s1 / (N * S)
        va = max(s2 / (N * S) - m * m, 0.0)
        mean[c] = m
        var[c] = va
        inv = 1.0 / np.sqrt(va + eps)
        sc = np.float64(scale[c])
        sh = np.float64(shift[c])
        for n in range(N):
            row = x3[n, c]
            xh = xhat3[n, c]
            yo = y3[n, c]
            for i in range(S):
                h = (row[i] - m) * inv
                xh[i] = h
                yo[i] = sc * h + sh


@njit(**_JIT)
def bn_infer_fwd(x3, scale, shift, rmean, rvar, eps, y3):
    N, C, S = x3.shape
    for c in prange(C):
        inv = 1.0 / np.sqrt(np.float64(rvar[c]) + eps)
        m = np.float64(rmean[c])
        sc = np.float64(scale[c])
        sh = np.float64(shift[c])
        for n in range(N):
            row = x3[n, c]
            yo = y3[n, c]
            for i in range(S):
                yo[i] = sc * (row[i] - m) * inv + sh


@njit(**_JIT)
def bn_train_bwd(gy3, xhat3, scale, inv_std, gx3, gscale, gshift):
    # inv_std per channel f64; gscale/gshift f64 out-params
    N, C, S = gy3.shape
    m = N * S
    for c in prange(C):
        sg = 0.0
        sgx = 0.0
        for n in range(N):
            g = gy3[n, c]
            xh = xhat3[n, c]
            for i in range(S):
                gi = np.float64(g[i])
                sg += gi
                sgx += gi * np.float64(xh[i])
        gscale[c] = sgx
        gshift[c] = sg
        k = np.float64(scale[c]) * inv_std[c]
        a = sg / m
        b = sgx / m
        for n in range(N):
            g = gy3[n, c]
            xh = xhat3[n, c]
            go = gx3[n, c]
            for i in range(S):
                go[i] = k * (g[i] - a - xh[i] * b)


@njit(**_JIT)
def adamw_update(p, g, m, v, lr, b1, b2, eps, decay, bc1, bc2):
    pf = p.reshape(-1)
    gf = g.reshape(-1)
    mf = m.reshape(-1)
    vf = v.reshape(-1)
    for i in prange(pf.size):
        gi = np.float64(gf[i])
        mi = b1 * mf[i] + (1.0 - b1) * gi
        vi = b2 * vf[i] + (1.0 - b2) * gi * gi
        mf[i] = mi
        vf[i] = vi
        upd = (mi / bc1) / (np.sqrt(vi / bc2) + eps)
        pf[i] -= lr * decay * pf[i] + lr * upd
