import math

import numpy as np
import pytest

from restokit.engine.ops import ShapeError
from restokit.train import METRICS_HEADER, MetricsRow, evaluate, psnr
from restokit.train.metrics import read_metrics, write_metrics


class TestPsnr:
    def test_identical_images_are_infinite(self):
        img = np.random.default_rng(0).random((3, 8, 8)).astype(np.float32)
        assert psnr(img, img) == float("inf")

    def test_black_vs_white_is_zero_db(self):
        a = np.zeros((3, 4, 4), np.float32)
        b = np.ones((3, 4, 4), np.float32)
        assert psnr(a, b) == pytest.approx(0.0, abs=1e-9)

    def test_mse_one_thousandth_is_thirty_db(self):
        a = np.zeros((1, 4, 4), np.float64)
        b = np.full((1, 4, 4), np.sqrt(0.001))
        assert psnr(a, b) == pytest.approx(30.0, abs=1e-9)

    def test_shape_mismatch(self):
        with pytest.raises(ShapeError):
            psnr(np.zeros((3, 4, 4)), np.zeros((3, 4, 5)))


class TestEvaluate:
    def test_self_pairs_all_infinite(self, tmp_path):
        rng = np.random.default_rng(1)
        imgs = [rng.random((3, 6, 6)) for _ in range(4)]
        pairs = [(f"img{i}", im, im) for i, im in enumerate(imgs)]
        rows, mean, median = evaluate(pairs, tmp_path / "r.csv")
        assert len(rows) == 4
        assert all(math.isinf(p) for _, p in rows)
        assert math.isinf(mean)
        text = (tmp_path / "r.csv").read_text()
        assert text.startswith("name,psnr\n")
        assert "img3,inf" in text

    def test_mean_matches_scalar_recomputation(self):
        rng = np.random.default_rng(2)
        pairs = []
        for i in range(6):
            a = rng.random((3, 5, 5))
            b = np.clip(a + rng.normal(0, 0.05, a.shape), 0, 1)
            pairs.append((f"p{i}", a, b))
        rows, mean, median = evaluate(pairs)
        values = [p for _, p in rows]
        assert mean == pytest.approx(sum(values) / len(values), abs=1e-9)
        assert median == pytest.approx(float(np.median(values)), abs=1e-9)

    def test_row_count_equals_pair_count(self):
        pairs = [(str(i), np.zeros((1, 4, 4)), np.full((1, 4, 4), 0.1))
                 for i in range(7)]
        rows, _, _ = evaluate(pairs)
        assert len(rows) == 7


class TestMetricsCsv:
    def test_header_and_total_identity(self, tmp_path):
        rng = np.random.default_rng(3)
        lam = 1e-3
        rows = [MetricsRow(10 * (i + 1), rng.random(), rng.random(),
                           rng.random(), 30.0 + i, lam) for i in range(5)]
        path = tmp_path / "m.csv"
        write_metrics(rows, path)
        first = path.read_text().splitlines()[0]
        assert first == METRICS_HEADER
        parsed = read_metrics(path)
        assert len(parsed) == 5
        for row in parsed:
            assert row["loss_total"] == row["loss_fid"] + lam * row["loss_adv"]

    def test_bad_header_rejected(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("iter,loss\n1,2\n")
        with pytest.raises(ValueError):
            read_metrics(path)
