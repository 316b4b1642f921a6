import numpy as np
import pytest

from restokit.degrade import (
    MoireParams,
    bayer_mosaic,
    demosaic_bilinear,
    lcd_render,
    sample_moire_params,
    synth_moire,
)
from restokit.degrade.moire import lcd_cell_masks
from restokit.engine.ops import ShapeError


def scalar_demosaic(mosaic2d, phase_layout):
    """Independent per-pixel reference interpolation (same neighborhood
    weights, explicit loops)."""
    h, w = mosaic2d.shape
    masks = np.zeros((3, h, w))
    for cell, chan in enumerate(phase_layout):
        r, c = divmod(cell, 2)
        masks[chan, r::2, c::2] = 1.0
    kern_g = np.array([[0, 1, 0], [1, 4, 1], [0, 1, 0]]) / 4.0
    kern_rb = np.array([[1, 2, 1], [2, 4, 2], [1, 2, 1]]) / 4.0
    out = np.zeros((3, h, w))
    for chan in range(3):
        kern = kern_g if chan == 1 else kern_rb
        for i in range(h):
            for j in range(w):
                num = den = 0.0
                for di in (-1, 0, 1):
                    for dj in (-1, 0, 1):
                        ii = min(max(i + di, 0), h - 1)
                        jj = min(max(j + dj, 0), w - 1)
                        wgt = kern[di + 1, dj + 1]
                        num += wgt * mosaic2d[ii, jj] * masks[chan, ii, jj]
                        den += wgt * masks[chan, ii, jj]
                out[chan, i, j] = num / den
    return out


class TestBayer:
    def test_pure_red_rggb(self):
        img = np.zeros((1, 3, 4, 4), np.float32)
        img[:, 0] = 0.8
        out = bayer_mosaic(img, "RGGB")
        np.testing.assert_allclose(out[0, 0, 0::2, 0::2], 0.8)
        mask = np.zeros((4, 4), bool)
        mask[0::2, 0::2] = True
        np.testing.assert_array_equal(out[0, 0][~mask], 0.0)

    def test_gray_input_passthrough(self):
        rng = np.random.default_rng(2)
        gray = rng.random((1, 1, 6, 6)).astype(np.float32)
        img = np.repeat(gray, 3, axis=1)
        for phase in ("RGGB", "GRBG", "GBRG", "BGGR"):
            out = bayer_mosaic(img, phase)
            np.testing.assert_allclose(out, gray, atol=1e-7)

    def test_odd_dims_rejected(self):
        with pytest.raises(ShapeError):
            bayer_mosaic(np.zeros((1, 3, 5, 4), np.float32), "RGGB")

    def test_constant_round_trip(self):
        img = np.full((1, 3, 6, 6), 0.0, np.float32)
        img[:, 0], img[:, 1], img[:, 2] = 0.2, 0.5, 0.7
        out = demosaic_bilinear(bayer_mosaic(img, "RGGB"), "RGGB")
        np.testing.assert_allclose(out, img, atol=1e-6)

    def test_gray_ramp_recovered_in_interior(self):
        ramp = np.linspace(0.0, 1.0, 8, dtype=np.float32)
        img = np.tile(ramp[None, None, None, :], (1, 3, 8, 1))
        out = demosaic_bilinear(bayer_mosaic(img, "RGGB"), "RGGB")
        np.testing.assert_allclose(out[:, :, 1:-1, 1:-1], img[:, :, 1:-1, 1:-1],
                                   atol=1e-6)

    def test_matches_scalar_oracle(self):
        rng = np.random.default_rng(11)
        mosaic = rng.random((1, 1, 8, 8)).astype(np.float32)
        out = demosaic_bilinear(mosaic, "GRBG")
        ref = scalar_demosaic(mosaic[0, 0].astype(np.float64), (1, 0, 2, 1))
        np.testing.assert_allclose(out[0], ref, atol=1e-6)


class TestLcdRender:
    def test_pure_red_stripe(self):
        img = np.zeros((1, 3, 1, 1), np.float32)
        img[0, 0] = 1.0
        out = lcd_render(img, 6)
        # left third (columns 0-1) carries R; everything else dark
        assert out[0, 0, :5, :2].min() == 1.0
        assert out[0, 0, :, 2:].max() == 0.0
        assert out[0, 1].max() == 0.0 and out[0, 2].max() == 0.0

    def test_white_pixel_fill_factors(self):
        img = np.ones((1, 3, 1, 1), np.float32)
        out = lcd_render(img, 6)
        masks = lcd_cell_masks(6)
        for chan in range(3):
            assert out[0, chan].mean() == pytest.approx(masks[chan].mean())

    def test_checkerboard_matches_hand_constructed_mask(self):
        img = np.zeros((1, 3, 2, 2), np.float32)
        img[0, :, 0, 0] = 1.0  # white pixel at (0,0)
        img[0, :, 1, 1] = 1.0  # white pixel at (1,1)
        out = lcd_render(img, 6)
        masks = lcd_cell_masks(6)
        expected = np.zeros((3, 12, 12))
        expected[:, 0:6, 0:6] = masks
        expected[:, 6:12, 6:12] = masks
        np.testing.assert_array_equal(out[0], expected)

    def test_supersample_must_be_multiple_of_three(self):
        with pytest.raises(ValueError):
            lcd_render(np.zeros((1, 3, 2, 2), np.float32), 4)


def textured_screenshot(size=32, seed=0):
    rng = np.random.default_rng(seed)
    img = rng.random((1, 3, size, size)).astype(np.float32)
    # horizontal stripes: strong high-frequency content that aliases
    img[:, :, ::2, :] *= 0.2
    return np.clip(img, 0.0, 1.0)


class TestSynthMoire:
    def test_bit_reproducible(self):
        img = textured_screenshot()
        rng = np.random.default_rng(5)
        params = sample_moire_params(rng, 32, 32)
        a, ga = synth_moire(img, params, seed=9)
        b, gb = synth_moire(img, params, seed=9)
        assert a.tobytes() == b.tobytes()
        assert ga.tobytes() == gb.tobytes()

    def test_constant_gray_mean_preserved(self):
        img = np.full((1, 3, 16, 16), 0.5, np.float32)
        params = MoireParams()  # identity geometry, unit gain, supersample 6
        degraded, gt = synth_moire(img, params)
        assert gt == pytest.approx(0.5, abs=1e-6) or np.allclose(gt, 0.5, atol=1e-6)
        assert abs(float(degraded.mean()) - float(gt.mean())) < 0.02 * float(gt.mean())

    def test_moire_structure_present(self):
        img = textured_screenshot()
        rng = np.random.default_rng(1)
        params = sample_moire_params(rng, 32, 32)
        degraded, gt = synth_moire(img, params)
        inner = (slice(None), slice(None), slice(4, -4), slice(4, -4))
        diff = degraded[inner].astype(np.float64) - gt[inner].astype(np.float64)
        assert float(diff.var()) > 1e-4

    def test_dot_alignment(self):
        img = np.ones((1, 3, 32, 32), np.float32)
        img[:, :, 15, 17] = 0.0  # single black dot
        rng = np.random.default_rng(8)
        params = sample_moire_params(rng, 32, 32)
        degraded, gt = synth_moire(img, params)

        def centroid(response):
            w = np.clip(response, 0, None)
            ys, xs = np.mgrid[0:w.shape[0], 0:w.shape[1]]
            total = w.sum()
            return (float((w * ys).sum() / total), float((w * xs).sum() / total))

        inner = (slice(8, 24), slice(10, 26))
        resp_d = (gt.mean(axis=(0, 1)) - degraded.mean(axis=(0, 1)))[inner]
        base_d = 1.0 - degraded.mean(axis=(0, 1))[inner]
        base_g = 1.0 - gt.mean(axis=(0, 1))[inner]
        cy_d, cx_d = centroid(base_d - np.median(base_d))
        cy_g, cx_g = centroid(base_g - np.median(base_g))
        dist = np.hypot(cy_d - cy_g, cx_d - cx_g)
        assert dist < 0.5, f"centroid displacement {dist:.3f} px"

    def test_output_range(self):
        img = textured_screenshot(seed=3)
        rng = np.random.default_rng(4)
        params = sample_moire_params(rng, 32, 32)
        degraded, gt = synth_moire(img, params)
        for arr in (degraded, gt):
            assert arr.min() >= 0.0 and arr.max() <= 1.0
