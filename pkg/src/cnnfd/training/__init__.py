"""Training recipes: loop, schedules, multi-seed statistics, benchmarks."""

from .loop import RunReport, TrainConfig, evaluate_loss, train
from .run import (
    memorize,
    TrainedModel,
    benchmark_models,
    multi_seed,
    prepare_inputs,
    run_training,
    summarize_losses,
)

__all__ = [
    "RunReport", "TrainConfig", "TrainedModel", "benchmark_models", "memorize",
    "evaluate_loss", "multi_seed", "prepare_inputs", "run_training",
    "summarize_losses", "train",
]
