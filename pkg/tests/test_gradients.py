"""Central finite-difference checks (64-bit) for every differentiable op."""

import numpy as np
import pytest

from cnnfd.tensorcore import (
    batchnorm3d_backward,
    batchnorm3d_forward,
    conv3d_backward,
    conv3d_forward,
    conv_transpose3d_backward,
    conv_transpose3d_forward,
    elu,
    elu_backward,
    huber_loss,
)

from conftest import central_diff_grad, rel_err

EPS = 1e-4
TOL = 1e-4


def check(analytic, numeric):
    assert rel_err(analytic, numeric) <= TOL


@pytest.mark.parametrize("stride,pad,shape,cico", [
    ((1, 1, 1), (1, 1, 1), (2, 4, 4, 4), (3, 2)),
    ((1, 2, 2), (1, 1, 1), (2, 4, 6, 6), (2, 3)),
    ((2, 2, 2), (1, 1, 1), (2, 4, 4, 8), (2, 2)),
    ((1, 1, 1), (0, 0, 0), (2, 3, 4, 4), (2, 2)),
])
def test_conv3d_gradients(stride, pad, shape, cico):
    rng = np.random.default_rng(7)
    ci, co = cico
    n, d, h, w = shape
    x = rng.standard_normal((n, ci, d, h, w))
    wt = rng.standard_normal((co, ci, 3, 3, 3))
    b = rng.standard_normal(co)
    y = conv3d_forward(x, wt, b, stride=stride, padding=pad)
    proj = rng.standard_normal(y.shape)

    def loss_x(xv):
        return np.vdot(proj, conv3d_forward(xv, wt, b, stride=stride, padding=pad))

    def loss_w(wv):
        return np.vdot(proj, conv3d_forward(x, wv, b, stride=stride, padding=pad))

    def loss_b(bv):
        return np.vdot(proj, conv3d_forward(x, wt, bv, stride=stride, padding=pad))

    gx, gw, gb = conv3d_backward(proj, x, wt, stride=stride, padding=pad)
    check(gx, central_diff_grad(loss_x, x, EPS))
    check(gw, central_diff_grad(loss_w, wt, EPS))
    check(gb, central_diff_grad(loss_b, b, EPS))


@pytest.mark.parametrize("kernel,stride", [
    ((3, 4, 4), (1, 2, 2)),
    ((4, 4, 4), (2, 2, 2)),
])
def test_conv_transpose3d_gradients(kernel, stride):
    rng = np.random.default_rng(11)
    ci, co = 2, 3
    x = rng.standard_normal((2, ci, 3, 3, 4))
    wt = rng.standard_normal((ci, co) + kernel)
    b = rng.standard_normal(co)
    pad = (1, 1, 1)
    y = conv_transpose3d_forward(x, wt, b, stride=stride, padding=pad)
    proj = rng.standard_normal(y.shape)

    def loss_x(xv):
        return np.vdot(proj, conv_transpose3d_forward(xv, wt, b, stride=stride, padding=pad))

    def loss_w(wv):
        return np.vdot(proj, conv_transpose3d_forward(x, wv, b, stride=stride, padding=pad))

    gx, gw, gb = conv_transpose3d_backward(proj, x, wt, stride=stride, padding=pad)
    check(gx, central_diff_grad(loss_x, x, EPS))
    check(gw, central_diff_grad(loss_w, wt, EPS))
    np.testing.assert_allclose(gb, proj.sum(axis=(0, 2, 3, 4)), rtol=1e-12)


def test_batchnorm_gradients():
    rng = np.random.default_rng(13)
    x = rng.standard_normal((2, 3, 2, 4, 4))
    scale = rng.standard_normal(3) + 1.5
    shift = rng.standard_normal(3)
    proj = rng.standard_normal(x.shape)

    def run(xv, sv, bv):
        rm, rv = np.zeros(3), np.ones(3)
        y, _ = batchnorm3d_forward(xv, sv, bv, rm, rv, train=True)
        return np.vdot(proj, y)

    rm, rv = np.zeros(3), np.ones(3)
    y, cache = batchnorm3d_forward(x, scale, shift, rm, rv, train=True)
    gx, gscale, gshift = batchnorm3d_backward(proj, cache, scale)
    check(gx, central_diff_grad(lambda xv: run(xv, scale, shift), x, EPS))
    check(gscale, central_diff_grad(lambda sv: run(x, sv, shift), scale, EPS))
    check(gshift, central_diff_grad(lambda bv: run(x, scale, bv), shift, EPS))


def test_elu_gradient():
    rng = np.random.default_rng(17)
    x = rng.standard_normal((2, 2, 3, 4, 4))
    proj = rng.standard_normal(x.shape)
    y = elu(x)
    g = elu_backward(proj, y)
    check(g, central_diff_grad(lambda xv: np.vdot(proj, elu(xv)), x, EPS))


def test_elu_gradient_at_minus_one():
    x = np.array([-1.0])
    y = elu(x)
    g = elu_backward(np.ones(1), y)
    assert abs(g[0] - 0.36788) < 1e-5
    num = central_diff_grad(lambda xv: elu(xv).sum(), x, EPS)
    assert abs(g[0] - num[0]) < 1e-6


def test_huber_gradient():
    rng = np.random.default_rng(19)
    pred = rng.standard_normal((3, 4)) * 2
    target = rng.standard_normal((3, 4))
    _, grad = huber_loss(pred, target, delta=1.0)
    num = central_diff_grad(lambda p: huber_loss(p, target, 1.0)[0], pred, EPS)
    check(grad, num)
