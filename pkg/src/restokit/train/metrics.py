"""PSNR, training metrics rows, and CSV reports."""

import csv
import math
import os
from dataclasses import dataclass

import numpy as np

from ..engine.ops import ShapeError

METRICS_HEADER = "iter,loss_total,loss_fid,loss_adv,loss_disc,psnr_val"


def psnr(a, b):
    """Peak signal-to-noise ratio in dB for images in [0, 1].

    Identical inputs return float('inf').
    """
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise ShapeError(f"psnr shape mismatch: {a.shape} vs {b.shape}")
    mse = float(np.mean((a.astype(np.float64) - b.astype(np.float64)) ** 2))
    if mse == 0.0:
        return float("inf")
    return 10.0 * math.log10(1.0 / mse)


@dataclass
class MetricsRow:
    iteration: int
    loss_fid: float
    loss_adv: float
    loss_disc: float
    psnr_val: float
    lambda_adv: float

    @property
    def loss_total(self):
        # the exact arithmetic identity the CSV contract promises
        return self.loss_fid + self.lambda_adv * self.loss_adv


def write_metrics(rows, path):
    """Write rows as CSV with the fixed header; atomic."""
    tmp = f"{path}.tmp"
    with open(tmp, "w") as f:
        f.write(METRICS_HEADER + "\n")
        for r in rows:
            f.write(f"{r.iteration},{r.loss_total!r},{r.loss_fid!r},"
                    f"{r.loss_adv!r},{r.loss_disc!r},{r.psnr_val!r}\n")
    os.replace(tmp, path)


def read_metrics(path):
    """Parse a metrics CSV back into a list of plain dicts."""
    with open(path) as f:
        reader = csv.DictReader(f)
        if reader.fieldnames != METRICS_HEADER.split(","):
            raise ValueError(f"{path}: unexpected metrics header "
                             f"{reader.fieldnames}")
        return [{k: (int(v) if k == "iter" else float(v))
                 for k, v in row.items()} for row in reader]


def evaluate(pairs, report_path=None):
    """Per-image PSNR for (output, reference) pairs plus aggregates.

    pairs: iterable of (name, image_a, image_b).  Returns
    (rows, mean, median) where rows are (name, psnr) tuples; infinite
    values are excluded from the aggregates unless all are infinite.
    """
    rows = [(name, psnr(a, b)) for name, a, b in pairs]
    values = [p for _, p in rows]
    finite = [p for p in values if math.isfinite(p)]
    pool = finite if finite else values
    mean = float(np.mean(pool))
    median = float(np.median(pool))
    if report_path is not None:
        tmp = f"{report_path}.tmp"
        with open(tmp, "w") as f:
            f.write("name,psnr\n")
            for name, p in rows:
                f.write(f"{name},{'inf' if math.isinf(p) else repr(p)}\n")
            f.write(f"mean,{'inf' if math.isinf(mean) else repr(mean)}\n")
            f.write(f"median,{'inf' if math.isinf(median) else repr(median)}\n")
        os.replace(tmp, report_path)
    return rows, mean, median
