"""Low-level array operations on (n, c, h, w) image tensors.

Everything here is a pure function of its inputs: no global state, no
hidden RNG.  Arrays are float32 by convention; the functions preserve
whatever float dtype they are given so the gradient checker can run the
same code paths in float64.
"""

import numpy as np

# Sigmoid outputs are clamped into [SIGMOID_EPS, 1 - SIGMOID_EPS] so the
# log-based GAN losses stay finite.
SIGMOID_EPS = 1e-7


class ShapeError(ValueError):
    """Raised when tensor shapes are incompatible with an operation."""


def check_image_tensor(x, name="tensor"):
    x = np.asarray(x)
    if x.ndim != 4:
        raise ShapeError(f"{name} must be rank-4 (n,c,h,w), got shape {x.shape}")
    return x


def reflect_index(idx, n):
    """Map (possibly out-of-range) indices into [0, n) by mirror reflection.

    Uses the no-edge-repeat convention of ``np.pad(mode='reflect')``.
    """
    idx = np.asarray(idx)
    if n == 1:
        return np.zeros_like(idx)
    period = 2 * (n - 1)
    idx = np.abs(idx) % period
    return np.where(idx >= n, period - idx, idx)


def pad2d(x, pad, mode):
    """Pad the two spatial axes by `pad` on each side."""
    if pad == 0:
        return x
    if mode == "zero":
        return np.pad(x, ((0, 0), (0, 0), (pad, pad), (pad, pad)))
    if mode == "reflect":
        return np.pad(x, ((0, 0), (0, 0), (pad, pad), (pad, pad)), mode="reflect")
    raise ValueError(f"unknown padding mode {mode!r}")


def unpad2d_adjoint(gpad, pad, mode, h, w):
    """Adjoint of :func:`pad2d`: fold gradients on padded pixels back."""
    if pad == 0:
        return gpad
    if mode == "zero":
        return gpad[:, :, pad:pad + h, pad:pad + w]
    rows = reflect_index(np.arange(h + 2 * pad) - pad, h)
    cols = reflect_index(np.arange(w + 2 * pad) - pad, w)
    out = np.zeros(gpad.shape[:2] + (h, w), dtype=gpad.dtype)
    np.add.at(out, (slice(None), slice(None), rows[:, None], cols[None, :]), gpad)
    return out


def _im2col(x, k, stride):
    n, c, h, w = x.shape
    oh = (h - k) // stride + 1
    ow = (w - k) // stride + 1
    cols = np.empty((n, c, k, k, oh, ow), dtype=x.dtype)
    for i in range(k):
        for j in range(k):
            cols[:, :, i, j] = x[:, :, i:i + stride * oh:stride, j:j + stride * ow:stride]
    return cols.reshape(n, c * k * k, oh * ow), oh, ow


def _col2im(gcols, n, c, hp, wp, k, stride, oh, ow, dtype):
    gx = np.zeros((n, c, hp, wp), dtype=dtype)
    g6 = gcols.reshape(n, c, k, k, oh, ow)
    for i in range(k):
        for j in range(k):
            gx[:, :, i:i + stride * oh:stride, j:j + stride * ow:stride] += g6[:, :, i, j]
    return gx


def conv2d(x, weight, bias, stride=1, padding="zero"):
    """2-D cross-correlation with same-style padding.

    weight: (f_out, f_in, k, k), bias: (f_out,).  Output spatial size is
    floor((h + 2*pad - k) / stride) + 1 with pad = (k - 1) // 2.
    """
    x = check_image_tensor(x, "input")
    f_out, f_in, k, k2 = weight.shape
    if k != k2 or k % 2 == 0:
        raise ShapeError(f"kernel must be square with odd size, got {k}x{k2}")
    if x.shape[1] != f_in:
        raise ShapeError(
            f"input has {x.shape[1]} channels but weight expects {f_in}")
    if bias.shape != (f_out,):
        raise ShapeError(f"bias shape {bias.shape} != ({f_out},)")
    if stride < 1:
        raise ShapeError(f"stride must be >= 1, got {stride}")
    pad = (k - 1) // 2
    xp = pad2d(x, pad, padding)
    cols, oh, ow = _im2col(xp, k, stride)
    wmat = weight.reshape(f_out, f_in * k * k)
    out = wmat @ cols          # (f,k) @ (n,k,l) -> (n,f,l), BLAS-backed
    out += bias[None, :, None]
    return out.reshape(x.shape[0], f_out, oh, ow)


def conv2d_backward(x, weight, upstream, stride=1, padding="zero"):
    """Gradients of :func:`conv2d` w.r.t. input, weight and bias."""
    n, c, h, w = x.shape
    f_out, f_in, k, _ = weight.shape
    pad = (k - 1) // 2
    xp = pad2d(x, pad, padding)
    cols, oh, ow = _im2col(xp, k, stride)
    up = upstream.reshape(n, f_out, oh * ow)
    gw = np.einsum("nfl,nkl->fk", up, cols, optimize=True).reshape(weight.shape)
    gb = up.sum(axis=(0, 2))
    wmat = weight.reshape(f_out, f_in * k * k)
    gcols = wmat.T @ up        # (k,f) @ (n,f,l) -> (n,k,l)
    gpad = _col2im(gcols, n, c, xp.shape[2], xp.shape[3], k, stride, oh, ow, x.dtype)
    gx = unpad2d_adjoint(gpad, pad, padding, h, w)
    return gx, gw, gb


def relu(x):
    return np.maximum(x, 0)


def relu_backward(x, upstream):
    return upstream * (x > 0)


def leaky_relu(x, slope):
    return np.where(x > 0, x, x * np.asarray(slope, dtype=x.dtype))


def leaky_relu_backward(x, upstream, slope):
    return upstream * np.where(x > 0, x.dtype.type(1), x.dtype.type(slope))


def sigmoid(x):
    """Numerically stable sigmoid, clamped to [eps, 1-eps]."""
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return np.clip(out, SIGMOID_EPS, 1.0 - SIGMOID_EPS)


def sigmoid_backward(y, upstream):
    # y is the (clamped) forward output; near the clamp the derivative is
    # vanishingly small anyway.
    return upstream * y * (1.0 - y)


def nearest_upsample(x, factor):
    x = check_image_tensor(x, "input")
    return np.repeat(np.repeat(x, factor, axis=2), factor, axis=3)


def nearest_upsample_backward(upstream, factor):
    n, c, h, w = upstream.shape
    g = upstream.reshape(n, c, h // factor, factor, w // factor, factor)
    return g.sum(axis=(3, 5))


def avg_downsample(x, factor):
    x = check_image_tensor(x, "input")
    n, c, h, w = x.shape
    if h % factor or w % factor:
        raise ShapeError(
            f"spatial dims ({h},{w}) not divisible by factor {factor}")
    return x.reshape(n, c, h // factor, factor, w // factor, factor).mean(axis=(3, 5))


def avg_downsample_backward(upstream, factor):
    g = nearest_upsample(upstream, factor)
    return g / np.asarray(factor * factor, dtype=upstream.dtype)


def global_avg_pool(x):
    return x.mean(axis=(2, 3), keepdims=True)


def global_avg_pool_backward(upstream, h, w):
    scale = np.asarray(h * w, dtype=upstream.dtype)
    return np.broadcast_to(upstream / scale, upstream.shape[:2] + (h, w)).copy()


def dense(x, weight, bias):
    """Fully connected layer over the flattened (c,h,w) features.

    weight: (f_out, f_in), output shape (n, f_out, 1, 1).
    """
    n = x.shape[0]
    flat = x.reshape(n, -1)
    if flat.shape[1] != weight.shape[1]:
        raise ShapeError(
            f"dense input features {flat.shape[1]} != weight in-dim {weight.shape[1]}")
    out = flat @ weight.T + bias
    return out.reshape(n, weight.shape[0], 1, 1)


def dense_backward(x, weight, upstream):
    n = x.shape[0]
    flat = x.reshape(n, -1)
    up = upstream.reshape(n, -1)
    gw = up.T @ flat
    gb = up.sum(axis=0)
    gx = (up @ weight).reshape(x.shape)
    return gx, gw, gb
