import numpy as np
import pytest

from restokit.degrade.warp import (
    WarpError,
    apply_homography_points,
    corner_perturbation_homography,
    lens_distort,
    projective_warp,
    solve_homography,
)


def random_image(seed=0, shape=(1, 3, 16, 16)):
    return np.random.default_rng(seed).random(shape).astype(np.float32)


class TestProjectiveWarp:
    def test_identity(self):
        img = random_image()
        out = projective_warp(img, np.eye(3))
        np.testing.assert_allclose(out, img, atol=1e-6)

    def test_integer_translation(self):
        img = random_image(1)
        hmat = np.array([[1.0, 0, 3.0], [0, 1.0, 0], [0, 0, 1.0]])
        out = projective_warp(img, hmat)
        np.testing.assert_allclose(out[:, :, :, 3:], img[:, :, :, :-3], atol=1e-6)
        np.testing.assert_array_equal(out[:, :, :, :3], 0.0)

    def test_corner_mapping_matches_matrix_arithmetic(self):
        rng = np.random.default_rng(33)
        hmat = corner_perturbation_homography(16, 16, rng)
        corners = np.array([[0.0, 0.0], [15.0, 0.0], [15.0, 15.0], [0.0, 15.0]])
        mapped = apply_homography_points(hmat, corners)
        for (x, y), (u, v) in zip(corners, mapped):
            p = hmat @ np.array([x, y, 1.0])
            assert u == pytest.approx(p[0] / p[2], abs=1e-6)
            assert v == pytest.approx(p[1] / p[2], abs=1e-6)

    def test_singular_matrix_rejected(self):
        with pytest.raises(WarpError):
            projective_warp(random_image(), np.zeros((3, 3)))


class TestSolveHomography:
    def test_reproduces_correspondences(self):
        rng = np.random.default_rng(7)
        src = np.array([[0, 0], [31, 0], [31, 31], [0, 31]], dtype=np.float64)
        dst = src + rng.uniform(-2, 2, size=(4, 2))
        hmat = solve_homography(src, dst)
        np.testing.assert_allclose(apply_homography_points(hmat, src), dst, atol=1e-8)
        assert hmat[2, 2] == pytest.approx(1.0)


class TestLensDistort:
    def test_zero_coefficients_identity(self):
        img = random_image(3)
        np.testing.assert_array_equal(lens_distort(img, 0.0, 0.0), img)

    def test_center_fixed(self):
        img = random_image(4, shape=(1, 1, 17, 17))
        out = lens_distort(img, 0.2, -0.1)
        assert out[0, 0, 8, 8] == pytest.approx(img[0, 0, 8, 8], abs=1e-5)

    def test_radial_sample_position(self):
        # the output point at r=0.5 samples the source at r' = 0.5125
        k1 = 0.1
        r = 0.5
        assert r * (1 + k1 * r ** 2) == pytest.approx(0.5125)
        h = w = 33
        cx = cy = (w - 1) / 2.0
        half_diag = np.sqrt(cx ** 2 + cy ** 2)
        img = np.zeros((1, 1, h, w), np.float32)
        ys, xs = np.mgrid[0:h, 0:w].astype(np.float64)
        rr = np.sqrt(((xs - cx) ** 2 + (ys - cy) ** 2)) / half_diag
        img[0, 0] = rr.astype(np.float32)  # image whose value encodes radius
        out = lens_distort(img, k1, 0.0)
        # pick the pixel closest to r=0.5 on the +x axis
        xpix = int(round(cx + 0.5 * half_diag))
        r_here = rr[int(cy), xpix]
        expected = r_here * (1 + k1 * r_here ** 2)
        assert out[0, 0, int(cy), xpix] == pytest.approx(expected, abs=1e-3)
