"""Image restoration training kit.

A self-contained numpy implementation of two-stage restoration
training: a generator is first fitted on synthetically degraded pairs,
then retrained on real degraded inputs paired with its own surrogate
targets under an adversarial regularizer.  Includes degradation
simulators (bicubic, pseudo-real camera, screen-photo moire), a small
tensor engine with verified gradients, and a CLI gluing it together.
"""

from .checkpoint import load_checkpoint, read_checkpoint, save_checkpoint
from .config import ConfigError, echo_config, load_config
from .data import (DatasetManifest, PatchSpec, build_manifest,
                   extract_patches, gen_scenes, read_image, write_image)
from .degrade import (DegradationSpec, MoireParams, bicubic_resample,
                      pseudo_real_degrade, sample_moire_params, synth_moire)
from .models import (build_discriminator, build_generator, build_network,
                     forward, init_weights)
from .train import (TrainConfig, evaluate, generate_surrogates, psnr,
                    train_multistage, train_stage1, train_stage2)

__version__ = "0.1.0"

__all__ = [
    "load_checkpoint", "read_checkpoint", "save_checkpoint",
    "ConfigError", "echo_config", "load_config",
    "DatasetManifest", "PatchSpec", "build_manifest", "extract_patches",
    "gen_scenes", "read_image", "write_image",
    "DegradationSpec", "MoireParams", "bicubic_resample",
    "pseudo_real_degrade", "sample_moire_params", "synth_moire",
    "build_discriminator", "build_generator", "build_network", "forward",
    "init_weights",
    "TrainConfig", "evaluate", "generate_surrogates", "psnr",
    "train_multistage", "train_stage1", "train_stage2",
    "__version__",
]
