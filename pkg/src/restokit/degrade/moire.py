"""Screen-photo moire synthesis: LCD subpixel rendering followed by a
simulated camera pipeline (projective warp, lens distortion, sensor
area sampling, Bayer CFA and demosaicking).

The clean counterpart of a synthesized image goes through the *same*
geometry (warp, distortion, scaling) but none of the display/sensor
resampling, so each pair is pixel-aligned.
"""

from dataclasses import dataclass, field

import numpy as np

from ..engine.ops import ShapeError, avg_downsample, check_image_tensor
from .cfa import BAYER_PHASES, bayer_mosaic, demosaic_bilinear
from .pseudo_real import quantize_8bit
from .warp import corner_perturbation_homography, lens_distort, projective_warp

GAMMA = 2.2


@dataclass
class MoireParams:
    supersample: int = 6                 # LCD subpixel rendering multiplier
    homography: np.ndarray = field(default_factory=lambda: np.eye(3))
    radial_k1: float = 0.0
    radial_k2: float = 0.0
    bayer_phase: str = "RGGB"
    exposure_gain: float = 1.0
    output_scale: float = 1.0            # sensor resolution / screen resolution

    def validate(self):
        if self.supersample < 3 or self.supersample % 3:
            raise ValueError(
                f"supersample must be >=3 and divisible by 3, got {self.supersample}")
        hmat = np.asarray(self.homography, dtype=np.float64)
        if hmat.shape != (3, 3) or not np.isclose(hmat[2, 2], 1.0):
            raise ValueError("homography must be 3x3 with [2][2] == 1")
        if self.bayer_phase not in BAYER_PHASES:
            raise ValueError(f"unknown Bayer phase {self.bayer_phase!r}")


def gamma_decode(image):
    return np.clip(image, 0.0, None) ** GAMMA


def gamma_encode(image):
    return np.clip(image, 0.0, None) ** (1.0 / GAMMA)


def lcd_cell_masks(supersample):
    """(3, s, s) per-channel subpixel masks of one LCD pixel cell.

    The cell splits into vertical R/G/B stripes of width s/3; the last
    row and column are the black matrix gap between cells.
    """
    s = supersample
    masks = np.zeros((3, s, s), dtype=np.float64)
    third = s // 3
    for chan in range(3):
        masks[chan, :, chan * third:(chan + 1) * third] = 1.0
    masks[:, :, s - 1] = 0.0
    masks[:, s - 1, :] = 0.0
    return masks


def lcd_render(screenshot, supersample):
    """Expand each pixel into its subpixel cell at supersample resolution."""
    screenshot = check_image_tensor(screenshot, "screenshot")
    if screenshot.shape[1] != 3:
        raise ShapeError("LCD rendering needs a 3-channel image")
    if supersample < 3 or supersample % 3:
        raise ValueError(f"supersample must be >=3 and divisible by 3, got {supersample}")
    s = supersample
    n, c, h, w = screenshot.shape
    masks = lcd_cell_masks(s)
    big = np.repeat(np.repeat(screenshot.astype(np.float64), s, axis=2), s, axis=3)
    tiled = np.tile(masks, (1, h, w))
    return (big * tiled[None]).astype(np.float64)


def _scaled_homography(hmat, scale):
    """Re-express a homography given at unit scale for a scaled pixel grid.

    Pixel centers of the two grids relate by x' = s*x + (s-1)/2, so the
    conjugation includes that half-pixel offset; otherwise the warp of
    the supersampled image would be displaced against the ground truth.
    """
    off = (scale - 1) / 2.0
    t = np.array([[scale, 0.0, off], [0.0, scale, off], [0.0, 0.0, 1.0]])
    return t @ np.asarray(hmat, dtype=np.float64) @ np.linalg.inv(t)


def _geometry(image, hmat_unit, k1, k2, scale):
    """The shared geometric part: warp and distort at native resolution."""
    out = projective_warp(image, _scaled_homography(hmat_unit, scale))
    return lens_distort(out, k1, k2)


def synth_moire(screenshot, params, seed=0):
    """Returns (degraded, ground_truth), both float32 in [0,1].

    The degraded image is the full display-and-capture simulation; the
    ground truth is the screenshot passed through the same geometry and
    scaling only.  `seed` is accepted for interface uniformity; the
    pipeline itself is deterministic.
    """
    params.validate()
    screenshot = check_image_tensor(screenshot, "screenshot").astype(np.float32)
    n, c, h, w = screenshot.shape
    s = params.supersample
    out_h = int(round(h * params.output_scale))
    out_w = int(round(w * params.output_scale))
    if out_h % 2 or out_w % 2:
        raise ShapeError(f"sensor dims ({out_h},{out_w}) must be even for the CFA")
    sensor_factor = (h * s) / out_h
    if abs(sensor_factor - round(sensor_factor)) > 1e-9:
        raise ShapeError(
            f"supersample {s} / output_scale {params.output_scale} does not "
            f"give an integer sensor averaging factor")
    sensor_factor = int(round(sensor_factor))

    hmat = np.asarray(params.homography, dtype=np.float64)

    # display + capture chain (linear light)
    linear = gamma_decode(screenshot.astype(np.float64))
    lcd = lcd_render(linear, s)
    lcd = _geometry(lcd, hmat, params.radial_k1, params.radial_k2, scale=s)
    sensor = avg_downsample(lcd, sensor_factor)
    # compensate the per-channel LCD aperture (fill factor), like the camera's
    # exposure/white balance would
    fill = lcd_cell_masks(s).mean(axis=(1, 2))
    sensor = sensor / fill[None, :, None, None]
    sensor = np.clip(sensor * params.exposure_gain, 0.0, 1.0)
    mosaic = bayer_mosaic(sensor, params.bayer_phase)
    rgb = demosaic_bilinear(mosaic, params.bayer_phase)
    degraded = quantize_8bit(gamma_encode(rgb))

    # aligned clean counterpart: geometry and scaling only
    gt = _geometry(screenshot.astype(np.float64), hmat,
                   params.radial_k1, params.radial_k2, scale=1.0)
    gt_factor = h / out_h
    if abs(gt_factor - round(gt_factor)) > 1e-9:
        raise ShapeError("output_scale must divide the screen size evenly")
    if int(round(gt_factor)) > 1:
        gt = avg_downsample(gt, int(round(gt_factor)))
    ground_truth = np.clip(gt, 0.0, 1.0).astype(np.float32)
    return degraded, ground_truth


def sample_moire_params(rng, h, w, supersample=6, output_scale=1.0):
    """Random capture geometry emulating varied shooting distances/angles."""
    hmat = corner_perturbation_homography(h, w, rng, max_frac=0.03)
    hmat = hmat / hmat[2, 2]
    return MoireParams(
        supersample=supersample,
        homography=hmat,
        radial_k1=float(rng.uniform(-0.05, 0.05)),
        radial_k2=0.0,
        bayer_phase=str(rng.choice(list(BAYER_PHASES))),
        exposure_gain=float(rng.uniform(0.9, 1.1)),
        output_scale=output_scale,
    )
