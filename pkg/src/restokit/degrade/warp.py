"""Geometric warps: projective transform and radial lens distortion.

Both use inverse mapping with bilinear sampling.  Samples that fall
outside the source image are black (zero).
"""

import numpy as np

from ..engine.ops import check_image_tensor


class WarpError(ValueError):
    pass


def apply_homography_points(hmat, xy):
    """Map (..., 2) pixel points through a 3x3 homography."""
    xy = np.asarray(xy, dtype=np.float64)
    ones = np.ones(xy.shape[:-1] + (1,))
    p = np.concatenate([xy, ones], axis=-1) @ np.asarray(hmat, dtype=np.float64).T
    return p[..., :2] / p[..., 2:3]


def bilinear_sample(image, xs, ys):
    """Sample a (n,c,h,w) tensor at float pixel coords; outside -> 0."""
    n, c, h, w = image.shape
    x0 = np.floor(xs).astype(np.int64)
    y0 = np.floor(ys).astype(np.int64)
    fx = (xs - x0).astype(np.float64)
    fy = (ys - y0).astype(np.float64)

    def fetch(yy, xx):
        valid = (yy >= 0) & (yy < h) & (xx >= 0) & (xx < w)
        yc = np.clip(yy, 0, h - 1)
        xc = np.clip(xx, 0, w - 1)
        vals = image[:, :, yc, xc].astype(np.float64)
        return vals * valid[None, None]

    v00 = fetch(y0, x0)
    v01 = fetch(y0, x0 + 1)
    v10 = fetch(y0 + 1, x0)
    v11 = fetch(y0 + 1, x0 + 1)
    top = v00 * (1 - fx) + v01 * fx
    bot = v10 * (1 - fx) + v11 * fx
    return (top * (1 - fy) + bot * fy).astype(image.dtype)


def projective_warp(image, homography):
    """Warp so that source pixel p maps to homography @ p in the output."""
    image = check_image_tensor(image, "image")
    hmat = np.asarray(homography, dtype=np.float64)
    if hmat.shape != (3, 3):
        raise WarpError(f"homography must be 3x3, got {hmat.shape}")
    if abs(np.linalg.det(hmat)) < 1e-12:
        raise WarpError("homography is singular")
    hinv = np.linalg.inv(hmat)
    n, c, h, w = image.shape
    ys, xs = np.mgrid[0:h, 0:w].astype(np.float64)
    src = apply_homography_points(hinv, np.stack([xs, ys], axis=-1))
    return bilinear_sample(image, src[..., 0], src[..., 1])


def lens_distort(image, k1, k2):
    """Radial distortion r' = r (1 + k1 r^2 + k2 r^4) about the center.

    Radii are normalized so the half-diagonal is r = 1; the output pixel
    at radius r samples the source at radius r'.
    """
    image = check_image_tensor(image, "image")
    if k1 == 0 and k2 == 0:
        return image.copy()
    n, c, h, w = image.shape
    cy = (h - 1) / 2.0
    cx = (w - 1) / 2.0
    half_diag = np.sqrt(cx ** 2 + cy ** 2)
    ys, xs = np.mgrid[0:h, 0:w].astype(np.float64)
    dx = (xs - cx) / half_diag
    dy = (ys - cy) / half_diag
    r2 = dx ** 2 + dy ** 2
    scale = 1.0 + k1 * r2 + k2 * r2 ** 2
    sx = cx + dx * scale * half_diag
    sy = cy + dy * scale * half_diag
    return bilinear_sample(image, sx, sy)


def corner_perturbation_homography(h, w, rng, max_frac=0.03):
    """Homography moving each image corner by up to +-max_frac of width."""
    src = np.array([[0, 0], [w - 1, 0], [w - 1, h - 1], [0, h - 1]], dtype=np.float64)
    dst = src + rng.uniform(-max_frac * w, max_frac * w, size=(4, 2))
    return solve_homography(src, dst)


def solve_homography(src, dst):
    """Direct linear transform from 4 point correspondences."""
    a = np.zeros((8, 8))
    b = np.zeros(8)
    for i in range(4):
        x, y = src[i]
        u, v = dst[i]
        a[2 * i] = [x, y, 1, 0, 0, 0, -u * x, -u * y]
        b[2 * i] = u
        a[2 * i + 1] = [0, 0, 0, x, y, 1, -v * x, -v * y]
        b[2 * i + 1] = v
    sol = np.linalg.solve(a, b)
    return np.append(sol, 1.0).reshape(3, 3)
