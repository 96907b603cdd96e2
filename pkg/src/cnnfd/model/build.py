"""Network construction for the three benchmarked architectures.

The main network keeps the axial extent fixed by downsampling with stride
(1, 2, 2) and doubles channels in every encoder block, reaching a
(384, 24, 1, 1) bottleneck after six levels on the default grid.  The
baseline U-Net uses the standard (2, 2, 2) stride, which the 24-plane axial
extent limits to three levels.  The double-convolution baseline is the
smallest plausible architecture for the task.
"""

from dataclasses import dataclass

import numpy as np

from ..errors import ConfigError
from .graph import Conv3d, ConvTranspose3d, DoubleBlock, Sequential, UNet
from .graph import BatchNorm3d, ELU, parameter_count  # noqa: F401  re-exported

FIELD_VARIABLES = 6
INPUT_CHANNELS = 7


@dataclass(frozen=True)
class ArchitectureConfig:
    arch: str = "cnnfd"
    grid: tuple = (24, 64, 64)
    depth: int = 6
    channels: tuple = (6, 12, 24, 48, 96, 192, 384)
    residual: bool = True
    stride: tuple = (1, 2, 2)
    in_channels: int = INPUT_CHANNELS
    out_channels: int = FIELD_VARIABLES

    def validate(self):
        if self.arch not in ("cnnfd", "unet", "doubleconv"):
            raise ConfigError(f"unknown architecture {self.arch!r}")
        if self.arch == "doubleconv":
            return self
        if len(self.channels) != self.depth + 1:
            raise ConfigError(
                f"channel schedule length {len(self.channels)} != depth+1 "
                f"({self.depth + 1})")
        d, h, w = self.grid
        sd, sh, sw = self.stride
        for name, size, s in (("axial", d, sd), ("radial", h, sh),
                              ("tangential", w, sw)):
            if size % (s ** self.depth):
                raise ConfigError(
                    f"grid {name} extent {size} not divisible by "
                    f"{s}^{self.depth}")
        return self

    def to_dict(self):
        return {
            "arch": self.arch, "grid": list(self.grid), "depth": self.depth,
            "channels": list(self.channels), "residual": self.residual,
            "stride": list(self.stride), "in_channels": self.in_channels,
            "out_channels": self.out_channels,
        }

    @classmethod
    def from_dict(cls, d):
        return cls(arch=d["arch"], grid=tuple(d["grid"]), depth=d["depth"],
                   channels=tuple(d["channels"]), residual=d["residual"],
                   stride=tuple(d["stride"]), in_channels=d["in_channels"],
                   out_channels=d["out_channels"]).validate()


def cnnfd_config(grid=(24, 64, 64), depth=6, base=6, cap=None):
    """Doubling schedule from `base`, optionally capped (reduced variants)."""
    chans = []
    c = base
    for _ in range(depth + 1):
        chans.append(c if cap is None else min(c, cap))
        c *= 2
    return ArchitectureConfig(arch="cnnfd", grid=grid, depth=depth,
                              channels=tuple(chans)).validate()


def reduced_cnnfd_config():
    """Desk-scale variant: 24x32x32 grid, five levels, schedule capped at 96."""
    return cnnfd_config(grid=(24, 32, 32), depth=5, cap=96)


def unet_baseline_config(grid=(24, 64, 64)):
    return ArchitectureConfig(arch="unet", grid=grid, depth=3,
                              channels=(6, 12, 24, 48), residual=False,
                              stride=(2, 2, 2)).validate()


def doubleconv_config(grid=(24, 64, 64)):
    return ArchitectureConfig(arch="doubleconv", grid=grid, depth=0,
                              channels=(16,), residual=False,
                              stride=(1, 1, 1)).validate()


def _tconv_kernel(stride):
    # kernel = stride doubled where stride is 2, 3 where stride is 1: exact
    # inverse of the downsample extents under padding 1
    return tuple(3 if s == 1 else 2 * s for s in stride)


def _build_unet(config, rng):
    ch = config.channels
    stride = config.stride
    stem = None
    cin = config.in_channels
    if config.arch == "cnnfd":
        stem = Conv3d(rng, "stem", config.in_channels, ch[0], kernel=(1, 1, 1),
                      stride=(1, 1, 1), padding=(0, 0, 0))
        cin = ch[0]
    enc_blocks = [DoubleBlock(rng, "enc0", cin, ch[0], residual=config.residual)]
    downs, ups, dec_blocks = [], [], []
    for lvl in range(1, config.depth + 1):
        downs.append(Conv3d(rng, f"down{lvl}", ch[lvl - 1], ch[lvl - 1],
                            stride=stride))
        enc_blocks.append(DoubleBlock(rng, f"enc{lvl}", ch[lvl - 1], ch[lvl],
                                      residual=config.residual))
    for lvl in range(config.depth, 0, -1):
        ups.append(ConvTranspose3d(rng, f"up{lvl}", ch[lvl], ch[lvl - 1],
                                   kernel=_tconv_kernel(stride), stride=stride))
        dec_blocks.append(DoubleBlock(rng, f"dec{lvl - 1}", 2 * ch[lvl - 1],
                                      ch[lvl - 1], residual=config.residual))
    head = Conv3d(rng, "head", ch[0], config.out_channels, kernel=(1, 1, 1),
                  stride=(1, 1, 1), padding=(0, 0, 0))
    net = UNet(stem, enc_blocks, downs, ups, dec_blocks, head)
    net.config = config
    return net


def _build_doubleconv(config, rng):
    width = config.channels[0]
    net = Sequential([
        Conv3d(rng, "conv1", config.in_channels, width),
        BatchNorm3d("bn1", width),
        ELU(),
        Conv3d(rng, "conv2", width, config.out_channels),
        BatchNorm3d("bn2", config.out_channels),
        ELU(),
    ])
    net.config = config
    return net


def build_model(config, seed=0):
    """Construct the layer graph for `config` with He-uniform initialization."""
    config.validate()
    rng = np.random.default_rng(seed)
    if config.arch == "doubleconv":
        return _build_doubleconv(config, rng)
    return _build_unet(config, rng)


def build_cnnfd(grid=(24, 64, 64), seed=0, **kw):
    return build_model(cnnfd_config(grid=grid, **kw), seed=seed)


def build_unet_baseline(grid=(24, 64, 64), seed=0):
    return build_model(unet_baseline_config(grid=grid), seed=seed)


def build_double_conv(grid=(24, 64, 64), seed=0):
    return build_model(doubleconv_config(grid=grid), seed=seed)
