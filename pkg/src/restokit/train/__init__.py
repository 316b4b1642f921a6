"""Training loops, optimizer, and evaluation metrics."""

from .adam import AdamState, adam_step, init_adam
from .loop import (NumericAbort, TrainConfig, generate_surrogates,
                   make_discriminator, train_multistage, train_stage1,
                   train_stage2)
from .metrics import (METRICS_HEADER, MetricsRow, evaluate, psnr,
                      read_metrics, write_metrics)

__all__ = [
    "AdamState", "adam_step", "init_adam",
    "NumericAbort", "TrainConfig", "generate_surrogates",
    "make_discriminator", "train_multistage", "train_stage1", "train_stage2",
    "METRICS_HEADER", "MetricsRow", "evaluate", "psnr",
    "read_metrics", "write_metrics",
]
