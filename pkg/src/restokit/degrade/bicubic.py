"""Separable cubic-convolution resampling (Catmull-Rom, a = -0.5).

Downsampling widens the kernel by the scale factor (anti-aliasing) and
the tap weights at every output position are renormalized to sum to 1,
so constants are reproduced exactly.  Boundaries are mirror-reflected.
"""

import numpy as np

from ..engine.ops import ShapeError, check_image_tensor, reflect_index

CUBIC_A = -0.5


def cubic_kernel(t):
    """Keys' cubic interpolation kernel with a = -0.5."""
    t = np.abs(np.asarray(t, dtype=np.float64))
    a = CUBIC_A
    out = np.zeros_like(t)
    near = t <= 1.0
    far = (t > 1.0) & (t < 2.0)
    out[near] = (a + 2) * t[near] ** 3 - (a + 3) * t[near] ** 2 + 1
    out[far] = a * t[far] ** 3 - 5 * a * t[far] ** 2 + 8 * a * t[far] - 4 * a
    return out


def resample_matrix(n_in, n_out):
    """Dense (n_out, n_in) weight matrix for 1-D cubic resampling."""
    scale = n_in / n_out
    support = 2.0 * max(scale, 1.0)
    mat = np.zeros((n_out, n_in), dtype=np.float64)
    for i in range(n_out):
        center = (i + 0.5) * scale - 0.5
        lo = int(np.floor(center - support)) + 1
        hi = int(np.floor(center + support)) + 1
        taps = np.arange(lo, hi)
        if scale > 1.0:
            w = cubic_kernel((center - taps) / scale)
        else:
            w = cubic_kernel(center - taps)
        w = w / w.sum()
        idx = reflect_index(taps, n_in)
        np.add.at(mat[i], idx, w)
    return mat


def bicubic_resample(image, factor, direction):
    """Scale a (n,c,h,w) tensor down or up by an integer factor."""
    image = check_image_tensor(image, "image")
    if factor not in (2, 4):
        raise ShapeError(f"factor must be 2 or 4, got {factor}")
    if direction not in ("down", "up"):
        raise ValueError(f"direction must be 'down' or 'up', got {direction!r}")
    n, c, h, w = image.shape
    if direction == "down":
        if h % factor or w % factor:
            raise ShapeError(
                f"spatial dims ({h},{w}) not divisible by factor {factor}")
        oh, ow = h // factor, w // factor
    else:
        oh, ow = h * factor, w * factor
    mh = resample_matrix(h, oh)
    mw = resample_matrix(w, ow)
    out = np.einsum("oh,nchw,pw->ncop", mh, image.astype(np.float64), mw,
                    optimize=True)
    return out.astype(image.dtype)
