"""A degradation deliberately different from bicubic downsampling.

Gaussian blur, box downsample, additive Gaussian noise and optional
8-bit quantization: a stand-in for an unknown real capture process when
running self-contained experiments.
"""

import numpy as np

from ..engine.ops import avg_downsample, check_image_tensor


def gaussian_kernel1d(sigma):
    """Normalized 1-D Gaussian, truncated at 3 sigma.  sigma=0 -> [1]."""
    if sigma <= 0:
        return np.ones(1, dtype=np.float64)
    radius = int(np.ceil(3.0 * sigma))
    t = np.arange(-radius, radius + 1, dtype=np.float64)
    k = np.exp(-0.5 * (t / sigma) ** 2)
    return k / k.sum()


def gaussian_blur(image, sigma):
    """Separable Gaussian blur with reflect boundary, per channel."""
    image = check_image_tensor(image, "image")
    k = gaussian_kernel1d(sigma)
    if k.size == 1:
        return image.copy()
    radius = k.size // 2
    x = image.astype(np.float64)
    for axis in (2, 3):
        padw = [(0, 0)] * 4
        padw[axis] = (radius, radius)
        xp = np.pad(x, padw, mode="reflect")
        acc = np.zeros_like(x)
        for i, wi in enumerate(k):
            sl = [slice(None)] * 4
            sl[axis] = slice(i, i + x.shape[axis])
            acc += wi * xp[tuple(sl)]
        x = acc
    return x.astype(image.dtype)


def quantize_8bit(image):
    """Clamp to [0,1] and round to 256 levels, half away from zero."""
    x = np.clip(image, 0.0, 1.0)
    return (np.floor(x * 255.0 + 0.5) / np.float32(255.0)).astype(np.float32)


def pseudo_real_degrade(image, blur_sigma, factor, noise_sigma, quantize, seed):
    """Blur -> box downsample -> seeded noise -> optional quantization."""
    image = check_image_tensor(image, "image")
    out = gaussian_blur(image, blur_sigma)
    out = avg_downsample(out, factor)
    if noise_sigma > 0:
        rng = np.random.default_rng(np.uint64(seed))
        noise = rng.standard_normal(out.shape).astype(np.float32) * np.float32(noise_sigma)
        out = out + noise
    if quantize:
        out = quantize_8bit(out)
    return out.astype(np.float32)
