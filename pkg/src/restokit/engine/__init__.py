"""Differentiable tensor core: layer ops, losses, graphs, gradient checks."""

from .ops import (
    SIGMOID_EPS,
    ShapeError,
    avg_downsample,
    conv2d,
    dense,
    global_avg_pool,
    leaky_relu,
    nearest_upsample,
    relu,
    sigmoid,
)
from .graph import LAYER_KINDS, GradTape, GraphError, LayerNode, NetworkSpec, backward, forward
from .losses import adversarial_loss, discriminator_loss, mse_loss
from .gradcheck import GradCheckResult, run_probe, run_suite

__all__ = [
    "SIGMOID_EPS", "ShapeError", "avg_downsample", "conv2d", "dense",
    "global_avg_pool", "leaky_relu", "nearest_upsample", "relu", "sigmoid",
    "LAYER_KINDS", "GradTape", "GraphError", "LayerNode", "NetworkSpec",
    "backward", "forward", "adversarial_loss", "discriminator_loss",
    "mse_loss", "GradCheckResult", "run_probe", "run_suite",
]
