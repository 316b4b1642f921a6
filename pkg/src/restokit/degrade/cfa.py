"""Bayer color-filter-array mosaicking and bilinear demosaicking."""

import numpy as np

from ..engine.ops import ShapeError, check_image_tensor

# 2x2 channel layout per phase, row-major: (r0c0, r0c1, r1c0, r1c1)
BAYER_PHASES = {
    "RGGB": (0, 1, 1, 2),
    "GRBG": (1, 0, 2, 1),
    "GBRG": (1, 2, 0, 1),
    "BGGR": (2, 1, 1, 0),
}


def _phase_masks(phase, h, w):
    if phase not in BAYER_PHASES:
        raise ValueError(f"unknown Bayer phase {phase!r}")
    layout = BAYER_PHASES[phase]
    masks = np.zeros((3, h, w), dtype=np.float32)
    for cell, chan in enumerate(layout):
        r, c = divmod(cell, 2)
        masks[chan, r::2, c::2] = 1.0
    return masks


def bayer_mosaic(image, phase):
    """Sample one channel per pixel; returns a single-channel tensor."""
    image = check_image_tensor(image, "image")
    n, c, h, w = image.shape
    if c != 3:
        raise ShapeError(f"mosaic input must have 3 channels, got {c}")
    if h % 2 or w % 2:
        raise ShapeError(f"mosaic needs even dims, got ({h},{w})")
    masks = _phase_masks(phase, h, w)
    out = (image * masks[None]).sum(axis=1, keepdims=True)
    return out.astype(image.dtype)


def demosaic_bilinear(mosaic, phase):
    """Bilinear interpolation of the missing CFA samples, per channel.

    Border pixels interpolate over the replicated-edge neighborhood; the
    normalization by the locally available sample count makes constant
    inputs reconstruct exactly everywhere.
    """
    mosaic = check_image_tensor(mosaic, "mosaic")
    n, c, h, w = mosaic.shape
    if c != 1:
        raise ShapeError(f"mosaic must be single-channel, got {c}")
    masks = _phase_masks(phase, h, w)
    kern_g = np.array([[0, 1, 0], [1, 4, 1], [0, 1, 0]], dtype=np.float64) / 4.0
    kern_rb = np.array([[1, 2, 1], [2, 4, 2], [1, 2, 1]], dtype=np.float64) / 4.0
    out = np.empty((n, 3, h, w), dtype=np.float64)
    for chan in range(3):
        kern = kern_g if chan == 1 else kern_rb
        mask = masks[chan].astype(np.float64)
        vals = mosaic[:, 0].astype(np.float64) * mask
        vp = np.pad(vals, ((0, 0), (1, 1), (1, 1)), mode="edge")
        mp = np.pad(mask, ((1, 1), (1, 1)), mode="edge")
        num = np.zeros_like(vals)
        den = np.zeros((h, w), dtype=np.float64)
        for i in range(3):
            for j in range(3):
                num += kern[i, j] * vp[:, i:i + h, j:j + w]
                den += kern[i, j] * mp[i:i + h, j:j + w]
        out[:, chan] = num / den
    return out.astype(mosaic.dtype)
