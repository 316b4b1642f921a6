"""Tour of the degradation simulators.

Generates one procedural scene and pushes it through the three
degradation families — bicubic downsampling, the pseudo-real camera
chain (blur + box downsample + noise + 8-bit quantization), and the
screen-photo moire synthesizer — writing every result as a viewable
.ppm next to this script's output directory.

Run:  python3 demos/01_degradations.py
"""

import os

import numpy as np

from restokit import (DegradationSpec, gen_scenes, sample_moire_params,
                      synth_moire, write_image)

OUT = os.path.join(os.path.dirname(__file__), "out", "degradations")


def main():
    os.makedirs(OUT, exist_ok=True)
    # One 96x96 scene; bigger than the training patches so the moire
    # structure is visible.
    scene = gen_scenes(1, 96, seed=7)
    write_image(scene[0], os.path.join(OUT, "clean.ppm"))

    # Bicubic x4: the "synthetic" degradation of the two-stage method.
    bicubic = DegradationSpec.from_string("bicubic4").apply(scene)
    write_image(bicubic[0], os.path.join(OUT, "bicubic_x4.ppm"))

    # Pseudo-real: wider blur, correlated with nothing the synthetic
    # model saw, plus sensor noise and quantization.
    pseudo = DegradationSpec.from_string(
        "pseudoreal4:blur=1.2,noise=0.01,quantize=1", seed=1).apply(scene)
    write_image(pseudo[0], os.path.join(OUT, "pseudo_real_x4.ppm"))

    # Moire: LCD subpixel rendering recaptured through a simulated
    # camera (projective warp, lens distortion, Bayer mosaic).  The
    # synthesizer returns the geometrically aligned ground truth too.
    rng = np.random.default_rng(3)
    params = sample_moire_params(rng, 96, 96)
    degraded, truth = synth_moire(scene, params, seed=3)
    write_image(degraded[0], os.path.join(OUT, "moire.ppm"))
    write_image(truth[0], os.path.join(OUT, "moire_ground_truth.ppm"))

    print(f"wrote degradation gallery to {OUT}")


if __name__ == "__main__":
    main()
