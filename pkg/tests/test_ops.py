import numpy as np
import pytest

from restokit.engine import ops
from restokit.engine.ops import ShapeError


def brute_force_conv2d(x, weight, bias, stride=1, padding="zero"):
    """Direct quadruple-loop convolution, the independent oracle."""
    n, c, h, w = x.shape
    f_out, f_in, k, _ = weight.shape
    pad = (k - 1) // 2
    if padding == "zero":
        xp = np.pad(x, ((0, 0), (0, 0), (pad, pad), (pad, pad)))
    else:
        xp = np.pad(x, ((0, 0), (0, 0), (pad, pad), (pad, pad)), mode="reflect")
    oh = (h + 2 * pad - k) // stride + 1
    ow = (w + 2 * pad - k) // stride + 1
    out = np.zeros((n, f_out, oh, ow), dtype=np.float64)
    for b in range(n):
        for f in range(f_out):
            for i in range(oh):
                for j in range(ow):
                    acc = 0.0
                    for ci in range(f_in):
                        for ki in range(k):
                            for kj in range(k):
                                acc += (xp[b, ci, i * stride + ki, j * stride + kj]
                                        * weight[f, ci, ki, kj])
                    out[b, f, i, j] = acc + bias[f]
    return out


class TestConv2d:
    def test_all_ones_center(self):
        x = np.ones((1, 1, 3, 3), np.float32)
        w = np.ones((1, 1, 3, 3), np.float32)
        b = np.zeros(1, np.float32)
        out = ops.conv2d(x, w, b)
        assert out[0, 0, 1, 1] == pytest.approx(9.0)

    def test_delta_kernel_is_identity(self):
        rng = np.random.default_rng(3)
        x = rng.random((2, 3, 5, 5)).astype(np.float32)
        w = np.zeros((3, 3, 3, 3), np.float32)
        for c in range(3):
            w[c, c, 1, 1] = 1.0
        out = ops.conv2d(x, w, np.zeros(3, np.float32))
        np.testing.assert_allclose(out, x, rtol=1e-6)

    def test_matches_brute_force(self):
        rng = np.random.default_rng(7)
        x = rng.standard_normal((1, 2, 5, 5)).astype(np.float32)
        w = rng.standard_normal((3, 2, 3, 3)).astype(np.float32)
        b = rng.standard_normal(3).astype(np.float32)
        out = ops.conv2d(x, w, b)
        ref = brute_force_conv2d(x, w, b)
        np.testing.assert_allclose(out, ref, atol=1e-5)

    @pytest.mark.parametrize("stride", [1, 2])
    @pytest.mark.parametrize("padding", ["zero", "reflect"])
    @pytest.mark.parametrize("shape", [(1, 1, 4, 4), (2, 2, 7, 7), (2, 4, 9, 9)])
    def test_brute_force_sweep(self, stride, padding, shape):
        rng = np.random.default_rng(hash((stride, padding, shape)) % 2**32)
        x = rng.standard_normal(shape).astype(np.float32)
        w = rng.standard_normal((3, shape[1], 3, 3)).astype(np.float32)
        b = rng.standard_normal(3).astype(np.float32)
        out = ops.conv2d(x, w, b, stride=stride, padding=padding)
        ref = brute_force_conv2d(x, w, b, stride=stride, padding=padding)
        np.testing.assert_allclose(out, ref, atol=1e-4)

    def test_output_dims(self):
        x = np.zeros((1, 1, 9, 9), np.float32)
        w = np.zeros((1, 1, 3, 3), np.float32)
        out = ops.conv2d(x, w, np.zeros(1, np.float32), stride=2)
        assert out.shape == (1, 1, 5, 5)

    def test_channel_mismatch_raises(self):
        x = np.zeros((1, 2, 4, 4), np.float32)
        w = np.zeros((1, 3, 3, 3), np.float32)
        with pytest.raises(ShapeError, match="channels"):
            ops.conv2d(x, w, np.zeros(1, np.float32))

    def test_even_kernel_rejected(self):
        x = np.zeros((1, 1, 4, 4), np.float32)
        w = np.zeros((1, 1, 2, 2), np.float32)
        with pytest.raises(ShapeError):
            ops.conv2d(x, w, np.zeros(1, np.float32))


class TestActivations:
    def test_relu(self):
        x = np.array([[[[-3.0, 3.0]]]], np.float32)
        np.testing.assert_array_equal(ops.relu(x), [[[[0.0, 3.0]]]])

    def test_leaky_relu(self):
        x = np.array([[[[-2.0]]]], np.float32)
        assert ops.leaky_relu(x, 0.2)[0, 0, 0, 0] == pytest.approx(-0.4)

    def test_sigmoid_zero(self):
        x = np.zeros((1, 1, 1, 1), np.float32)
        assert ops.sigmoid(x)[0, 0, 0, 0] == pytest.approx(0.5)

    def test_sigmoid_clamped(self):
        x = np.array([[[[-100.0, 100.0]]]], np.float32)
        y = ops.sigmoid(x)
        assert y[0, 0, 0, 0] == pytest.approx(ops.SIGMOID_EPS)
        assert y[0, 0, 0, 1] == pytest.approx(1.0 - ops.SIGMOID_EPS)

    def test_relu_backward_dead_unit(self):
        x = np.array([[[[-1.0]]]], np.float32)
        g = np.ones_like(x)
        assert ops.relu_backward(x, g)[0, 0, 0, 0] == 0.0

    def test_sigmoid_backward_at_zero(self):
        y = ops.sigmoid(np.zeros((1, 1, 1, 1), np.float32))
        g = np.ones_like(y)
        assert ops.sigmoid_backward(y, g)[0, 0, 0, 0] == pytest.approx(0.25)


class TestResampling:
    def test_avg_down_constant(self):
        x = np.full((1, 3, 8, 8), 0.5, np.float32)
        out = ops.avg_downsample(x, 4)
        np.testing.assert_allclose(out, 0.5)

    @pytest.mark.parametrize("factor", [2, 4])
    def test_up_then_down_is_identity(self, factor):
        rng = np.random.default_rng(11)
        x = rng.random((2, 3, 4, 4)).astype(np.float32)
        out = ops.avg_downsample(ops.nearest_upsample(x, factor), factor)
        np.testing.assert_allclose(out, x, rtol=1e-6)

    def test_avg_down_hand_computed(self):
        x = np.arange(1, 17, dtype=np.float32).reshape(1, 1, 4, 4)
        out = ops.avg_downsample(x, 2)
        np.testing.assert_allclose(out[0, 0], [[3.5, 5.5], [11.5, 13.5]])

    def test_avg_down_preserves_mean(self):
        rng = np.random.default_rng(13)
        x = rng.random((1, 1, 8, 8)).astype(np.float32)
        out = ops.avg_downsample(x, 2)
        assert float(out.mean()) == pytest.approx(float(x.mean()), abs=1e-6)

    def test_non_divisible_raises(self):
        x = np.zeros((1, 1, 5, 5), np.float32)
        with pytest.raises(ShapeError):
            ops.avg_downsample(x, 2)

    def test_nearest_up_repeats(self):
        x = np.array([[[[1.0, 2.0], [3.0, 4.0]]]], np.float32)
        out = ops.nearest_upsample(x, 2)
        np.testing.assert_array_equal(out[0, 0, :2, :2], 1.0)
        np.testing.assert_array_equal(out[0, 0, 2:, 2:], 4.0)


def test_ops_are_pure():
    rng = np.random.default_rng(5)
    x = rng.standard_normal((1, 2, 6, 6)).astype(np.float32)
    w = rng.standard_normal((2, 2, 3, 3)).astype(np.float32)
    b = rng.standard_normal(2).astype(np.float32)
    a1 = ops.conv2d(x, w, b)
    a2 = ops.conv2d(x, w, b)
    assert a1.tobytes() == a2.tobytes()
