"""Explicit layer graphs built on the tensorcore ops.

Layers cache what their backward pass needs during forward; a graph is used
single-writer during training (forward then backward), while inference-mode
forwards are read-only and safe to run concurrently.
"""

import numpy as np

from ..errors import ConfigError
from ..tensorcore import ops


class Param:
    """A trainable array with its gradient buffer."""

    __slots__ = ("name", "data", "grad", "decay")

    def __init__(self, name, data, decay=True):
        self.name = name
        self.data = data
        self.grad = np.zeros_like(data)
        self.decay = decay


def he_uniform(rng, shape, fan_in, dtype=np.float32):
    bound = np.sqrt(6.0 / fan_in)
    return rng.uniform(-bound, bound, size=shape).astype(dtype)


class Conv3d:
    def __init__(self, rng, name, cin, cout, kernel=(3, 3, 3), stride=(1, 1, 1),
                 padding=(1, 1, 1), bias=True):
        self.name = name
        self.stride = tuple(stride)
        self.padding = tuple(padding)
        fan_in = cin * int(np.prod(kernel))
        self.w = Param(f"{name}.w", he_uniform(rng, (cout, cin) + tuple(kernel), fan_in))
        self.b = Param(f"{name}.b", np.zeros(cout, np.float32), decay=False) if bias else None
        self._xp = None

    def forward(self, x, train=False):
        y, xp = ops.conv3d_forward(x, self.w.data,
                                   None if self.b is None else self.b.data,
                                   stride=self.stride, padding=self.padding,
                                   return_padded=True)
        if train:
            self._xp = xp
        return y

    def backward(self, gy):
        gx, gw, gb = ops.conv3d_backward(gy, None, self.w.data,
                                         stride=self.stride, padding=self.padding,
                                         with_bias=self.b is not None,
                                         x_padded=self._xp)
        self.w.grad = gw
        if self.b is not None:
            self.b.grad = gb
        self._xp = None
        return gx

    def params(self):
        return [self.w] if self.b is None else [self.w, self.b]

    def buffers(self):
        return []


class ConvTranspose3d:
    def __init__(self, rng, name, cin, cout, kernel=(3, 4, 4), stride=(1, 2, 2),
                 padding=(1, 1, 1), bias=True):
        self.name = name
        self.stride = tuple(stride)
        self.padding = tuple(padding)
        fan_in = max(1, cin * int(np.prod(kernel)) // int(np.prod(stride)))
        self.w = Param(f"{name}.w", he_uniform(rng, (cin, cout) + tuple(kernel), fan_in))
        self.b = Param(f"{name}.b", np.zeros(cout, np.float32), decay=False) if bias else None
        self._x = None

    def forward(self, x, train=False):
        if train:
            self._x = x
        return ops.conv_transpose3d_forward(
            x, self.w.data, None if self.b is None else self.b.data,
            stride=self.stride, padding=self.padding)

    def backward(self, gy):
        gx, gw, gb = ops.conv_transpose3d_backward(
            gy, self._x, self.w.data, stride=self.stride, padding=self.padding,
            with_bias=self.b is not None)
        self.w.grad = gw
        if self.b is not None:
            self.b.grad = gb
        self._x = None
        return gx

    def params(self):
        return [self.w] if self.b is None else [self.w, self.b]

    def buffers(self):
        return []


class BatchNorm3d:
    def __init__(self, name, channels, momentum=0.1, eps=1e-5):
        self.name = name
        self.momentum = momentum
        self.eps = eps
        self.scale = Param(f"{name}.scale", np.ones(channels, np.float32), decay=False)
        self.shift = Param(f"{name}.shift", np.zeros(channels, np.float32), decay=False)
        self.running_mean = np.zeros(channels, np.float32)
        self.running_var = np.ones(channels, np.float32)
        self._cache = None

    def forward(self, x, train=False):
        y, cache = ops.batchnorm3d_forward(
            x, self.scale.data, self.shift.data, self.running_mean,
            self.running_var, train=train, momentum=self.momentum, eps=self.eps)
        self._cache = cache
        return y

    def backward(self, gy):
        gx, gscale, gshift = ops.batchnorm3d_backward(gy, self._cache, self.scale.data)
        self.scale.grad = gscale
        self.shift.grad = gshift
        self._cache = None
        return gx

    def params(self):
        return [self.scale, self.shift]

    def buffers(self):
        return [(f"{self.name}.running_mean", self.running_mean),
                (f"{self.name}.running_var", self.running_var)]


class ELU:
    def __init__(self):
        self._y = None

    def forward(self, x, train=False):
        y = ops.elu(x)
        if train:
            self._y = y
        return y

    def backward(self, gy):
        # gy is owned by the backward pass here, so scale it in place
        gx = ops.elu_backward_(np.ascontiguousarray(gy), self._y)
        self._y = None
        return gx

    def params(self):
        return []

    def buffers(self):
        return []


class DoubleBlock:
    """conv-BN-ELU-conv-BN(-residual add)-ELU.

    The shortcut taps the first convolution's normalized output and joins
    after the second batch norm, ahead of the closing activation.  Tapping
    the normalized signal keeps activation variance bounded with depth
    (a raw-convolution tap compounds variance block after block and
    saturates the activations in six-level stacks).  Both shortcut ends
    carry the block's output channel count, so it is always an identity.
    """

    def __init__(self, rng, name, cin, cout, residual=True):
        self.name = name
        self.residual = residual
        self.conv1 = Conv3d(rng, f"{name}.conv1", cin, cout)
        self.bn1 = BatchNorm3d(f"{name}.bn1", cout)
        self.act1 = ELU()
        self.conv2 = Conv3d(rng, f"{name}.conv2", cout, cout)
        self.bn2 = BatchNorm3d(f"{name}.bn2", cout)
        self.act2 = ELU()

    def forward(self, x, train=False):
        tap = self.bn1.forward(self.conv1.forward(x, train), train)
        h = self.act1.forward(tap, train)
        h = self.bn2.forward(self.conv2.forward(h, train), train)
        if self.residual:
            h = h + tap
        return self.act2.forward(h, train)

    def backward(self, gy):
        g = self.act2.backward(gy)
        g_tap = g if self.residual else None
        g = self.act1.backward(
            self.conv2.backward(self.bn2.backward(g)))
        if self.residual:
            g = g + g_tap
        return self.conv1.backward(self.bn1.backward(g))

    def params(self):
        out = []
        for layer in (self.conv1, self.bn1, self.conv2, self.bn2):
            out.extend(layer.params())
        return out

    def buffers(self):
        return self.bn1.buffers() + self.bn2.buffers()

    def layers(self):
        return [self.conv1, self.bn1, self.act1, self.conv2, self.bn2, self.act2]


class Sequential:
    def __init__(self, layers):
        self._layers = layers

    def forward(self, x, train=False):
        for layer in self._layers:
            x = layer.forward(x, train)
        return x

    def backward(self, gy):
        for layer in reversed(self._layers):
            gy = layer.backward(gy)
        return gy

    def params(self):
        out = []
        for layer in self._layers:
            out.extend(layer.params())
        return out

    def buffers(self):
        out = []
        for layer in self._layers:
            out.extend(layer.buffers())
        return out


class UNet:
    """Encoder-decoder with strided-conv downsampling and skip concatenation.

    `stem` is an optional pointwise channel projection ahead of the first
    block.  Downsample/upsample convolutions are linear; the double blocks
    carry the normalization and activations.
    """

    def __init__(self, stem, enc_blocks, downs, ups, dec_blocks, head):
        if len(downs) != len(ups) or len(enc_blocks) != len(downs) + 1:
            raise ConfigError("UNet: inconsistent encoder/decoder layer counts")
        self.stem = stem
        self.enc_blocks = enc_blocks
        self.downs = downs
        self.ups = ups
        self.dec_blocks = dec_blocks
        self.head = head
        self.bottleneck_shape = None

    def forward(self, x, train=False):
        if self.stem is not None:
            x = self.stem.forward(x, train)
        skips = []
        h = self.enc_blocks[0].forward(x, train)
        for down, block in zip(self.downs, self.enc_blocks[1:]):
            skips.append(h)
            h = block.forward(down.forward(h, train), train)
        self.bottleneck_shape = h.shape
        self._skip_channels = [s.shape[1] for s in skips]
        for up, block, skip in zip(self.ups, self.dec_blocks, reversed(skips)):
            h = up.forward(h, train)
            h = block.forward(np.concatenate([skip, h], axis=1), train)
        return self.head.forward(h, train)

    def backward(self, gy):
        g = self.head.backward(gy)
        # reversed(ups) walks shallow-to-deep, so skip grads come out in
        # encoder-level order L0..L(depth-1)
        skip_grads = []
        for up, block, c in zip(reversed(self.ups), reversed(self.dec_blocks),
                                self._skip_channels):
            g = block.backward(g)
            skip_grads.append(g[:, :c])
            g = up.backward(np.ascontiguousarray(g[:, c:]))
        for down, block, gskip in zip(reversed(self.downs),
                                      reversed(self.enc_blocks[1:]),
                                      reversed(skip_grads)):
            g = down.backward(block.backward(g)) + gskip
        g = self.enc_blocks[0].backward(g)
        if self.stem is not None:
            g = self.stem.backward(g)
        return g

    def params(self):
        out = []
        for g in self._groups():
            out.extend(g.params())
        return out

    def buffers(self):
        out = []
        for g in self._groups():
            out.extend(g.buffers())
        return out

    def _groups(self):
        groups = [self.stem] if self.stem is not None else []
        groups.append(self.enc_blocks[0])
        for down, block in zip(self.downs, self.enc_blocks[1:]):
            groups.extend([down, block])
        for up, block in zip(self.ups, self.dec_blocks):
            groups.extend([up, block])
        groups.append(self.head)
        return groups


def snapshot_state(graph):
    """Copy of all trainable parameters and running statistics."""
    state = {p.name: p.data.copy() for p in graph.params()}
    state.update({name: arr.copy() for name, arr in graph.buffers()})
    return state


def restore_state(graph, state):
    for p in graph.params():
        np.copyto(p.data, state[p.name])
    for name, arr in graph.buffers():
        np.copyto(arr, state[name])


def parameter_count(graph):
    """Total trainable element count (running statistics excluded)."""
    return int(sum(p.data.size for p in graph.params()))
