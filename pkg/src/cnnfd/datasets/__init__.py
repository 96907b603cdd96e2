"""Experiment design, dataset container I/O, normalization, and splits."""

from .build import BuildInput, design_build, lhs_sample
from .container import Dataset, read_dataset, write_dataset
from .generate import generate_dataset
from .normalize import NormStats, compute_normalization
from .split import SPLIT_NAMES, SplitAssignment, stratified_split

__all__ = [
    "BuildInput", "Dataset", "NormStats", "SPLIT_NAMES", "SplitAssignment",
    "compute_normalization", "design_build", "generate_dataset", "lhs_sample",
    "read_dataset", "stratified_split", "write_dataset",
]
