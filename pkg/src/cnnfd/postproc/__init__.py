"""Derived-variable chain: mass-flow averaging, stage/overall performance,
prediction metrics, and report rendering."""

from .averaging import (
    IDX,
    all_plane_massflows,
    average_1d,
    massflow_average_circ,
    massflow_average_radial,
    plane_massflow,
)
from .grid import AnnulusGrid
from .performance import (
    PerformanceBreakdown,
    StagePerformance,
    breakdown_deltas,
    polytropic_efficiency,
    stage_and_overall,
)

__all__ = [
    "AnnulusGrid", "IDX", "PerformanceBreakdown", "StagePerformance",
    "all_plane_massflows", "average_1d", "breakdown_deltas",
    "massflow_average_circ", "massflow_average_radial", "plane_massflow",
    "polytropic_efficiency", "stage_and_overall",
]
