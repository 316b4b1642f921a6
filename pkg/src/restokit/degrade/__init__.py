"""Degradation operators: bicubic, pseudo-real capture, moire synthesis."""

from .bicubic import bicubic_resample, cubic_kernel, resample_matrix
from .cfa import BAYER_PHASES, bayer_mosaic, demosaic_bilinear
from .moire import (
    MoireParams,
    gamma_decode,
    gamma_encode,
    lcd_render,
    sample_moire_params,
    synth_moire,
)
from .pseudo_real import gaussian_blur, pseudo_real_degrade, quantize_8bit
from .specs import DEFAULT_PSEUDO_REAL, DegradationSpec, derive_seed
from .warp import (
    WarpError,
    apply_homography_points,
    corner_perturbation_homography,
    lens_distort,
    projective_warp,
    solve_homography,
)

__all__ = [
    "bicubic_resample", "cubic_kernel", "resample_matrix",
    "BAYER_PHASES", "bayer_mosaic", "demosaic_bilinear",
    "MoireParams", "gamma_decode", "gamma_encode", "lcd_render",
    "sample_moire_params", "synth_moire",
    "gaussian_blur", "pseudo_real_degrade", "quantize_8bit",
    "DEFAULT_PSEUDO_REAL", "DegradationSpec", "derive_seed",
    "WarpError", "apply_homography_points", "corner_perturbation_homography",
    "lens_distort", "projective_warp", "solve_homography",
]
