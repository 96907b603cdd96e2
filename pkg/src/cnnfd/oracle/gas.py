"""Perfect-gas relations used by the meanline model and post-processing."""

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class GasProperties:
    gamma: float = 1.4
    r_gas: float = 287.0

    def __post_init__(self):
        if self.gamma <= 1.0:
            raise ValueError(f"gamma must exceed 1, got {self.gamma}")
        if self.r_gas <= 0.0:
            raise ValueError(f"r_gas must be positive, got {self.r_gas}")

    @property
    def cp(self):
        return self.gamma * self.r_gas / (self.gamma - 1.0)

    def static_from_total(self, pt, tt, mach):
        """Static (p, T, rho) behind total conditions at the given Mach number."""
        f = 1.0 + 0.5 * (self.gamma - 1.0) * mach * mach
        t = tt / f
        p = pt * f ** (-self.gamma / (self.gamma - 1.0))
        rho = p / (self.r_gas * t)
        return p, t, rho

    def to_dict(self):
        return {"gamma": self.gamma, "r_gas": self.r_gas}

    @classmethod
    def from_dict(cls, d):
        return cls(gamma=float(d["gamma"]), r_gas=float(d["r_gas"]))


def speed_of_sound(gas, t_static):
    return np.sqrt(gas.gamma * gas.r_gas * t_static)
