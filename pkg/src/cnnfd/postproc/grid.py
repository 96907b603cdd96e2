"""Structured annulus grid: node coordinates and quadrature areas.

Each of the 24 axial planes carries a (radial x tangential) node grid over
one blade passage.  Nodes sit at cell centres, uniformly in span and in
passage fraction; cell areas are r * dr * dtheta.  The midpoint placement
makes the discrete passage area exact (the integrand is linear in r), so
uniform fields conserve mass to round-off.
"""

from dataclasses import dataclass

import numpy as np


@dataclass
class AnnulusGrid:
    r_hub: np.ndarray        # (P,)
    r_casing: np.ndarray     # (P,)
    blade_count: np.ndarray  # (P,) pitch-defining row per plane
    n_radial: int
    n_tangential: int

    @classmethod
    def from_spec(cls, spec, n_radial=64, n_tangential=64):
        counts = np.array([spec.plane_blade_count(p) for p in range(len(spec.r_hub))])
        return cls(r_hub=np.asarray(spec.r_hub, float),
                   r_casing=np.asarray(spec.r_casing, float),
                   blade_count=counts, n_radial=n_radial,
                   n_tangential=n_tangential)

    @property
    def n_planes(self):
        return len(self.r_hub)

    @property
    def span_fractions(self):
        return (np.arange(self.n_radial) + 0.5) / self.n_radial

    @property
    def theta_fractions(self):
        return (np.arange(self.n_tangential) + 0.5) / self.n_tangential

    def pitch(self, plane):
        return 2.0 * np.pi / self.blade_count[plane]

    def radii(self, plane):
        return self.r_hub[plane] + self.span_fractions * (
            self.r_casing[plane] - self.r_hub[plane])

    def cell_areas(self, plane):
        """(n_radial, n_tangential) areas of one passage, m^2."""
        dr = (self.r_casing[plane] - self.r_hub[plane]) / self.n_radial
        dth = self.pitch(plane) / self.n_tangential
        return np.repeat((self.radii(plane) * dr * dth)[:, None],
                         self.n_tangential, axis=1)

    def passage_area(self, plane):
        return float(self.cell_areas(plane).sum())

    def annulus_area(self, plane):
        return self.passage_area(plane) * self.blade_count[plane]
