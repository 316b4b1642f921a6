"""Declarative degradation operators and their config-string forms."""

from dataclasses import dataclass, field

import numpy as np

from .bicubic import bicubic_resample
from .moire import MoireParams, sample_moire_params, synth_moire
from .pseudo_real import pseudo_real_degrade

DEFAULT_PSEUDO_REAL = dict(blur_sigma=1.2, factor=4, noise_sigma=0.01, quantize=True)


@dataclass
class DegradationSpec:
    """Parameterization of one degradation operator M.

    kind: "bicubic_down", "pseudo_real" or "moire"; `params` holds the
    kind-specific settings.  Identical (spec, seed, input) triples give
    identical outputs.
    """
    kind: str
    seed: int = 0
    params: dict = field(default_factory=dict)

    def validate(self):
        if self.kind == "bicubic_down":
            if self.params.get("factor", 4) not in (2, 4):
                raise ValueError("bicubic factor must be 2 or 4")
        elif self.kind == "pseudo_real":
            p = {**DEFAULT_PSEUDO_REAL, **self.params}
            if p["factor"] not in (2, 4):
                raise ValueError("pseudo_real factor must be 2 or 4")
            if p["blur_sigma"] < 0 or p["noise_sigma"] < 0:
                raise ValueError("sigmas must be >= 0")
        elif self.kind == "moire":
            pass
        else:
            raise ValueError(f"unknown degradation kind {self.kind!r}")

    def apply(self, image, index=0):
        """Degrade one (n,c,h,w) tensor; `index` decorrelates per-image RNG.

        For the moire kind the return value is the (degraded, aligned
        ground truth) pair; for the others it is the degraded tensor.
        """
        self.validate()
        item_seed = derive_seed(self.seed, index)
        if self.kind == "bicubic_down":
            return bicubic_resample(image, self.params.get("factor", 4), "down")
        if self.kind == "pseudo_real":
            p = {**DEFAULT_PSEUDO_REAL, **self.params}
            return pseudo_real_degrade(image, p["blur_sigma"], p["factor"],
                                       p["noise_sigma"], p["quantize"], item_seed)
        rng = np.random.default_rng(item_seed)
        mp = sample_moire_params(rng, image.shape[2], image.shape[3],
                                 supersample=self.params.get("supersample", 6),
                                 output_scale=self.params.get("output_scale", 1.0))
        return synth_moire(image, mp, seed=item_seed)

    @property
    def pairs_with_ground_truth(self):
        return self.kind == "moire"

    def to_string(self):
        if self.kind == "bicubic_down":
            return f"bicubic{self.params.get('factor', 4)}"
        if self.kind == "pseudo_real":
            p = {**DEFAULT_PSEUDO_REAL, **self.params}
            return (f"pseudoreal{p['factor']}:blur={p['blur_sigma']},"
                    f"noise={p['noise_sigma']},quantize={int(p['quantize'])}")
        return "moire"

    @classmethod
    def from_string(cls, text, seed=0):
        """Parse CLI-style spec strings like "bicubic4" or "pseudoreal4"."""
        base, _, opts = text.partition(":")
        params = {}
        if opts:
            for item in opts.split(","):
                key, _, val = item.partition("=")
                if not val:
                    raise ValueError(f"malformed degradation option {item!r}")
                params[key] = float(val) if "." in val or "e" in val else int(val)
        if base in ("bicubic2", "bicubic4"):
            return cls("bicubic_down", seed, {"factor": int(base[-1]), **params})
        if base in ("pseudoreal2", "pseudoreal4"):
            mapped = {"blur": "blur_sigma", "noise": "noise_sigma",
                      "quantize": "quantize"}
            out = {"factor": int(base[-1])}
            for key, val in params.items():
                if key not in mapped:
                    raise ValueError(f"unknown pseudoreal option {key!r}")
                out[mapped[key]] = bool(val) if key == "quantize" else float(val)
            return cls("pseudo_real", seed, out)
        if base == "moire":
            return cls("moire", seed, params)
        raise ValueError(f"unknown degradation spec {text!r}")


def derive_seed(master_seed, index):
    """Per-item seed, independent of scheduling order."""
    mask = 0xFFFFFFFFFFFFFFFF
    mix = (int(master_seed) * 0x9E3779B97F4A7C15 + int(index) * 0xBF58476D1CE4E5B9) & mask
    # one xorshift-multiply round to decorrelate nearby indices
    mix ^= mix >> 30
    mix = (mix * 0xBF58476D1CE4E5B9) & mask
    mix ^= mix >> 31
    return mix


__all__ = ["DegradationSpec", "MoireParams", "derive_seed",
           "sample_moire_params", "synth_moire", "bicubic_resample",
           "pseudo_real_degrade"]
