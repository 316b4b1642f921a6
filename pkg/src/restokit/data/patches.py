"""Patch extraction on a stride grid with seeded subsampling."""

from dataclasses import dataclass

import numpy as np


@dataclass
class PatchSpec:
    size: int
    stride: int
    per_image_cap: int = 0      # 0 = keep all grid positions

    def validate(self):
        if self.size < 8:
            raise ValueError(f"patch size must be >= 8, got {self.size}")
        if self.stride < 1:
            raise ValueError(f"stride must be >= 1, got {self.stride}")


def grid_positions(h, w, size, stride):
    ys = list(range(0, h - size + 1, stride))
    xs = list(range(0, w - size + 1, stride))
    return [(y, x) for y in ys for x in xs]


def extract_patches(images, spec, seed, paired_with=None):
    """Extract patches from a (count, c, h, w) stack.

    With `paired_with`, the identical positions are cut from both stacks
    and (patches, paired_patches) is returned.
    """
    spec.validate()
    n, c, h, w = images.shape
    if spec.size > h or spec.size > w:
        raise ValueError(
            f"patch size {spec.size} exceeds image dims ({h},{w})")
    rng = np.random.default_rng(seed)
    out, out_pair = [], []
    for i in range(n):
        positions = grid_positions(h, w, spec.size, spec.stride)
        if spec.per_image_cap and len(positions) > spec.per_image_cap:
            keep = rng.choice(len(positions), spec.per_image_cap, replace=False)
            positions = [positions[k] for k in sorted(keep)]
        for y, x in positions:
            out.append(images[i, :, y:y + spec.size, x:x + spec.size])
            if paired_with is not None:
                out_pair.append(paired_with[i, :, y:y + spec.size, x:x + spec.size])
    patches = np.stack(out)
    if paired_with is not None:
        return patches, np.stack(out_pair)
    return patches
