"""Procedural ground-truth scenes for self-contained experiments.

Each scene is a smooth background gradient with a handful (possibly
zero) of softly anti-aliased ellipses and rectangles, compressed to a
low-contrast band around mid-gray.  The design keeps scene structure
dominated by content a restorer can recover from a 4x-downsampled
observation, so restoration error reflects what the degradation
destroyed rather than an irrecoverable texture floor; the low contrast
keeps fixed-amplitude corruptions (sensor noise, quantization) from
vanishing relative to scene detail.  Scenes are deterministic in
(seed, index) and scheduling-independent.
"""

import numpy as np

from ..degrade.specs import derive_seed

# Edge transition width in pixels: wide enough that shape outlines are
# band-limited at the ground-truth grid.
_EDGE_SOFT = 1.0

# Scenes keep this fraction of their raw dynamic range around mid-gray.
_CONTRAST = 0.2


def _smoothstep(t):
    t = np.clip(t, 0.0, 1.0)
    return t * t * (3.0 - 2.0 * t)


def _background(rng, size):
    ys, xs = np.mgrid[0:size, 0:size] / max(size - 1, 1)
    angle = rng.uniform(0, 2 * np.pi)
    ramp = xs * np.cos(angle) + ys * np.sin(angle)
    ramp = (ramp - ramp.min()) / max(np.ptp(ramp), 1e-9)
    lo = rng.uniform(0.1, 0.4, size=3)
    hi = rng.uniform(0.6, 0.9, size=3)
    return lo[:, None, None] + (hi - lo)[:, None, None] * ramp[None]


def _add_ellipse(img, rng, size):
    ys, xs = np.mgrid[0:img.shape[1], 0:img.shape[2]].astype(np.float64)
    cy, cx = rng.uniform(0.15, 0.85, 2) * size
    ry, rx = rng.uniform(0.08, 0.3, 2) * size
    theta = rng.uniform(0, np.pi)
    dy, dx = ys - cy, xs - cx
    u = dx * np.cos(theta) + dy * np.sin(theta)
    v = -dx * np.sin(theta) + dy * np.cos(theta)
    dist = np.sqrt((u / rx) ** 2 + (v / ry) ** 2)
    edge = (1.0 - dist) * min(rx, ry)  # approx signed distance in pixels
    alpha = _smoothstep(edge / _EDGE_SOFT + 0.5)
    color = rng.uniform(0.0, 1.0, 3)
    img += alpha[None] * (color[:, None, None] - img)


def _add_rectangle(img, rng, size):
    ys, xs = np.mgrid[0:img.shape[1], 0:img.shape[2]].astype(np.float64)
    y0, x0 = rng.uniform(0.1, 0.6, 2) * size
    hgt, wid = rng.uniform(0.1, 0.35, 2) * size
    ay = _smoothstep((ys - y0) / _EDGE_SOFT) * _smoothstep((y0 + hgt - ys) / _EDGE_SOFT)
    ax = _smoothstep((xs - x0) / _EDGE_SOFT) * _smoothstep((x0 + wid - xs) / _EDGE_SOFT)
    alpha = ay * ax
    color = rng.uniform(0.0, 1.0, 3)
    img += alpha[None] * (color[:, None, None] - img)


def gen_scene(size, seed, index):
    """One procedural (3, size, size) scene, float32 in [0,1]."""
    if size % 4:
        raise ValueError(f"scene size must be a multiple of 4, got {size}")
    rng = np.random.default_rng(derive_seed(seed, index))
    img = _background(rng, size)
    for _ in range(rng.integers(0, 5)):
        if rng.random() < 0.5:
            _add_ellipse(img, rng, size)
        else:
            _add_rectangle(img, rng, size)
    img = 0.5 + _CONTRAST * (img - 0.5)
    return np.clip(img, 0.0, 1.0).astype(np.float32)


def gen_scenes(count, size, seed):
    """Stack of `count` scenes as (count, 3, size, size)."""
    return np.stack([gen_scene(size, seed, i) for i in range(count)])
