import numpy as np
import pytest

from restokit.degrade.bicubic import bicubic_resample, cubic_kernel, resample_matrix
from restokit.engine.ops import ShapeError


def scalar_downsample_1d(signal, factor):
    """Independent scalar reference for 1-D cubic downsampling."""
    n_in = len(signal)
    n_out = n_in // factor
    out = np.zeros(n_out)
    for i in range(n_out):
        center = (i + 0.5) * factor - 0.5
        lo = int(np.floor(center - 2 * factor)) + 1
        hi = int(np.floor(center + 2 * factor)) + 1
        wsum = 0.0
        acc = 0.0
        for m in range(lo, hi):
            wgt = float(cubic_kernel(np.array([(center - m) / factor]))[0])
            idx = m
            while idx < 0 or idx >= n_in:
                idx = -idx if idx < 0 else 2 * (n_in - 1) - idx
            acc += wgt * signal[idx]
            wsum += wgt
        out[i] = acc / wsum
    return out


def test_kernel_interpolating_property():
    assert cubic_kernel(0.0) == pytest.approx(1.0)
    for t in (1.0, -1.0, 2.0, -2.0):
        assert cubic_kernel(t) == pytest.approx(0.0, abs=1e-12)


def test_kernel_partition_of_unity_dense_grid():
    phases = np.linspace(0.0, 1.0, 1000, endpoint=False)
    taps = np.arange(-2, 3)
    sums = cubic_kernel(phases[:, None] - taps[None, :]).sum(axis=1)
    np.testing.assert_allclose(sums, 1.0, atol=1e-6)


@pytest.mark.parametrize("factor", [2, 4])
@pytest.mark.parametrize("direction", ["down", "up"])
def test_constant_preserved(factor, direction):
    img = np.full((1, 3, 8, 8), 0.5, np.float32)
    out = bicubic_resample(img, factor, direction)
    np.testing.assert_allclose(out, 0.5, atol=1e-6)


def test_matrix_rows_sum_to_one():
    for n_in, n_out in [(48, 12), (12, 48), (16, 8), (9, 18)]:
        mat = resample_matrix(n_in, n_out)
        np.testing.assert_allclose(mat.sum(axis=1), 1.0, atol=1e-12)


def test_downsample_ramp_matches_scalar_oracle():
    ramp = np.linspace(0.0, 1.0, 16)
    img = np.tile(ramp[None, None, None, :], (1, 1, 8, 1)).astype(np.float32)
    out = bicubic_resample(img, 4, "down")
    ref = scalar_downsample_1d(ramp, 4)
    for row in range(out.shape[2]):
        np.testing.assert_allclose(out[0, 0, row], ref, atol=1e-5)


def test_random_downsample_matches_scalar_oracle():
    rng = np.random.default_rng(31)
    sig = rng.random(24)
    img = np.tile(sig[None, None, None, :], (1, 1, 4, 1)).astype(np.float32)
    out = bicubic_resample(img, 2, "down")
    ref = scalar_downsample_1d(sig, 2)
    np.testing.assert_allclose(out[0, 0, 0], ref, atol=1e-5)


def test_non_divisible_raises():
    with pytest.raises(ShapeError):
        bicubic_resample(np.zeros((1, 1, 6, 6), np.float32), 4, "down")


def test_bad_factor_raises():
    with pytest.raises(ShapeError):
        bicubic_resample(np.zeros((1, 1, 8, 8), np.float32), 3, "down")
