"""Training losses and their analytic gradients.

Conventions:
  * mse_loss sums squared error over channels and pixels, normalized by
    n*h*w (batch mean of the per-pixel, channel-summed squared error).
  * The GAN losses average over the batch and assume their probability
    inputs were produced by the clamped sigmoid, so logs stay finite.
"""

import numpy as np

from .ops import ShapeError


def mse_loss(a, b):
    """Returns (loss, grad wrt a).  grad wrt b is the negation."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise ShapeError(f"mse_loss shape mismatch: {a.shape} vs {b.shape}")
    n, c, h, w = a.shape
    diff = a - b
    norm = np.asarray(n * h * w, dtype=a.dtype)
    loss = float(np.sum(diff.astype(np.float64) ** 2) / float(norm))
    grad = 2.0 * diff / norm
    return loss, grad


def adversarial_loss(d_out):
    """Generator-side GAN penalty: batch mean of -log D(G(Y)).

    Accepts a scalar probability or an array of them; returns
    (loss, grad wrt d_out).
    """
    d = np.asarray(d_out, dtype=np.float64)
    scalar = d.ndim == 0
    if scalar:
        d = d.reshape(1)
    loss = float(np.mean(-np.log(d)))
    grad = -1.0 / (d * d.size)
    if scalar:
        return loss, float(grad[0])
    return loss, grad.reshape(np.shape(d_out)).astype(np.asarray(d_out).dtype)


def discriminator_loss(d_real, d_fake):
    """Binary cross entropy for the discriminator.

    Batch mean of -[log D(X) + log(1 - D(G(Y)))].  Returns
    (loss, grad wrt d_real, grad wrt d_fake).
    """
    dr = np.asarray(d_real, dtype=np.float64)
    df = np.asarray(d_fake, dtype=np.float64)
    scalar = dr.ndim == 0
    if scalar:
        dr = dr.reshape(1)
        df = df.reshape(1)
    loss = float(np.mean(-np.log(dr)) + np.mean(-np.log(1.0 - df)))
    g_real = -1.0 / (dr * dr.size)
    g_fake = 1.0 / ((1.0 - df) * df.size)
    if scalar:
        return loss, float(g_real[0]), float(g_fake[0])
    g_real = g_real.reshape(np.shape(d_real)).astype(np.asarray(d_real).dtype)
    g_fake = g_fake.reshape(np.shape(d_fake)).astype(np.asarray(d_fake).dtype)
    return loss, g_real, g_fake
