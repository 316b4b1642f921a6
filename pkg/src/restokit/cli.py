"""Command-line surface: synth, train, restore, eval, gradcheck.

Exit codes: 0 success, 1 usage/config error, 2 data error (missing or
malformed files), 3 numeric failure (NaN abort, gradient-check failure).
All randomness flows from seeds recorded in outputs; there is no
wall-clock seeding anywhere.
"""

import argparse
import os
import sys

import numpy as np

from .checkpoint import CheckpointError, load_checkpoint, save_checkpoint
from .config import ConfigError, echo_config, load_config
from .data import DatasetManifest, PnmError, gen_scenes, read_image, write_image
from .degrade import DegradationSpec
from .degrade.specs import derive_seed
from .engine.graph import LAYER_KINDS
from .engine import gradcheck as gradcheck_mod
from .models import ArchError, build_generator, forward, init_weights
from .train import (NumericAbort, TrainConfig, evaluate, generate_surrogates,
                    train_stage1, train_stage2, write_metrics)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NUMERIC = 3

IMAGE_EXTS = (".ppm", ".pgm")


class UsageError(Exception):
    pass


class DataError(Exception):
    pass


def _fail(message, code):
    print(f"error: {message}", file=sys.stderr)
    return code


def _list_images(directory):
    try:
        names = sorted(n for n in os.listdir(directory)
                       if n.endswith(IMAGE_EXTS))
    except OSError as exc:
        raise DataError(f"cannot list {directory}: {exc}") from exc
    if not names:
        raise DataError(f"no .ppm/.pgm images in {directory}")
    return names


def _degrade_stack(spec, images, index_base=0):
    """Apply a degradation per image; returns (degraded, ground truth)."""
    degraded, truths = [], []
    for i in range(images.shape[0]):
        result = spec.apply(images[i:i + 1], index=index_base + i)
        if spec.pairs_with_ground_truth:
            deg, truth = result
            truths.append(truth[0])
        else:
            deg = result
            truths.append(images[i])
        degraded.append(deg[0])
    return np.stack(degraded), np.stack(truths)


# ---------------------------------------------------------------- synth

def cmd_synth(args):
    try:
        spec = DegradationSpec.from_string(args.degrade,
                                           seed=derive_seed(args.seed, 1))
        spec.validate()
    except ValueError as exc:
        raise UsageError(f"invalid degradation spec: {exc}") from exc
    scenes = gen_scenes(args.scenes, args.size, args.seed)
    degraded, truths = _degrade_stack(spec, scenes)
    clean_dir = os.path.join(args.out, "images", "clean")
    deg_dir = os.path.join(args.out, "images", "degraded")
    os.makedirs(clean_dir, exist_ok=True)
    os.makedirs(deg_dir, exist_ok=True)
    deg_role = ("synthetic_degraded" if spec.kind == "bicubic_down"
                else "real_degraded")
    manifest = DatasetManifest(master_seed=args.seed)
    for i in range(args.scenes):
        name = f"{i:05d}.ppm"
        write_image(truths[i], os.path.join(clean_dir, name))
        write_image(degraded[i], os.path.join(deg_dir, name))
        manifest.entries.append(("clean", "train",
                                 os.path.join("images", "clean", name)))
        manifest.entries.append((deg_role, "train",
                                 os.path.join("images", "degraded", name)))
    manifest.save(os.path.join(args.out, "manifest.txt"))
    print(f"wrote {args.scenes} clean + {args.scenes} degraded images "
          f"and manifest under {args.out}")
    return EXIT_OK


# ---------------------------------------------------------------- train

def _arch_kwargs(arch_cfg):
    name = arch_cfg["name"]
    if name == "sr_small":
        return name, {"blocks": arch_cfg["blocks"],
                      "features": arch_cfg["features"],
                      "scale": arch_cfg["scale"]}
    if name == "dm_net":
        return name, {"res_blocks": arch_cfg["res_blocks"],
                      "tail_convs": arch_cfg["tail_convs"],
                      "features": arch_cfg["features"],
                      "scale": arch_cfg["scale"]}
    raise UsageError(f"unknown generator arch {name!r}")


def _read_stack(paths):
    return np.stack([read_image(p) for p in paths])


def _manifest_data(cfg):
    """Training tensors from an on-disk manifest."""
    manifest = DatasetManifest.load(cfg["data"]["manifest"])
    manifest.validate()

    def role(name, split="train", required=False):
        paths = manifest.files(name, split)
        if required and not paths:
            raise DataError(
                f"manifest has no {name!r} files in split {split!r}")
        return _read_stack(paths) if paths else None

    clean = role("clean", required=True)
    synthetic = role("synthetic_degraded")
    real = role("real_degraded")
    if synthetic is not None and synthetic.shape[0] != clean.shape[0]:
        raise DataError("clean and synthetic_degraded counts differ")
    unpaired = role("unpaired_clean")
    hold_in = role("real_degraded", "test")
    hold_truth = role("clean", "test")
    return {
        "synthetic_in": synthetic, "synthetic_truth": clean,
        "real_in": real, "real_truth": None,
        "clean_pool": unpaired if unpaired is not None else clean,
        "holdout_in": hold_in, "holdout_truth": hold_truth,
    }


def _procedural_data(cfg):
    """Self-contained training tensors from procedural scenes."""
    d = cfg["data"]
    need = d["synthetic_count"] + d["real_count"] + d["holdout"]
    if need > d["scenes"]:
        raise UsageError(
            f"data counts {need} exceed scene count {d['scenes']}")
    seed = cfg["seed"]
    scenes = gen_scenes(d["scenes"], d["size"], seed)
    syn_spec = DegradationSpec.from_string(cfg["degradation"]["synthetic"],
                                           seed=derive_seed(seed, 11))
    real_spec = DegradationSpec.from_string(cfg["degradation"]["real"],
                                            seed=derive_seed(seed, 22))
    a = d["synthetic_count"]
    b = a + d["real_count"]
    c = b + d["holdout"]
    syn_in, syn_truth = _degrade_stack(syn_spec, scenes[:a])
    real_in, real_truth = _degrade_stack(real_spec, scenes[a:b], index_base=a)
    hold_in, hold_truth = _degrade_stack(real_spec, scenes[b:c], index_base=b)
    return {
        "synthetic_in": syn_in, "synthetic_truth": syn_truth,
        "real_in": real_in, "real_truth": real_truth,
        # the discriminator's unpaired pool: clean images whose degraded
        # versions are never seen in stage 2
        "clean_pool": syn_truth,
        "holdout_in": hold_in, "holdout_truth": hold_truth,
    }


def _load_data(cfg):
    if cfg["data"]["manifest"]:
        return _manifest_data(cfg)
    return _procedural_data(cfg)


def _stage_config(cfg, stage):
    t = cfg["train"]["stage1"] if stage == 1 else cfg["train"]["stage2"]
    kw = dict(lr=t["lr"], batch=t["batch"], iterations=t["iterations"],
              log_interval=t["log_interval"], seed=cfg["seed"],
              beta1=t["beta1"], beta2=t["beta2"])
    if stage != 1:
        kw.update(lambda_adv=t["lambda_adv"], gan_k=t["gan_k"],
                  disc_stages=t["disc_stages"],
                  disc_features=t["disc_features"], disc_lr=t["disc_lr"])
    return TrainConfig(**kw)


def _out_dirs(out):
    dirs = {key: os.path.join(out, key)
            for key in ("checkpoints", "metrics", "images")}
    for path in dirs.values():
        os.makedirs(path, exist_ok=True)
    return dirs


def _write_surrogates(surrogates, out_dir, stage):
    """Surrogate dataset as an image directory plus index manifest."""
    surr_dir = os.path.join(out_dir, f"surrogates-stage{stage}")
    os.makedirs(surr_dir, exist_ok=True)
    manifest = DatasetManifest(master_seed=0)
    for i in range(surrogates.shape[0]):
        name = f"{i:05d}.ppm"
        write_image(np.clip(surrogates[i], 0.0, 1.0),
                    os.path.join(surr_dir, name))
        manifest.entries.append(("surrogate", "train", name))
    manifest.save(os.path.join(surr_dir, "index.txt"))


def _run_stage2(g0, data, cfg, dirs, stage):
    if data["real_in"] is None:
        raise DataError("stage 2 needs real_degraded inputs")
    surrogates = generate_surrogates(g0, data["real_in"])
    _write_surrogates(surrogates, dirs["images"], stage)
    val = None
    if data["holdout_in"] is not None and data["holdout_truth"] is not None:
        val = (data["holdout_in"], data["holdout_truth"])
    stage_cfg = _stage_config(cfg, 2)
    net, disc, rows = train_stage2(g0, data["real_in"], surrogates,
                                   data["clean_pool"], stage_cfg,
                                   val_pairs=val, stage=stage)
    save_checkpoint(net, os.path.join(dirs["checkpoints"], f"stage{stage}.ckpt"),
                    stage=stage, iteration=stage_cfg.iterations,
                    master_seed=cfg["seed"])
    write_metrics(rows, os.path.join(dirs["metrics"], f"stage{stage}.csv"))
    return net


def cmd_train(args):
    cfg = load_config(args.config)
    out = args.out or cfg["output"]["dir"]
    if args.stage == 2 and not args.multistage and not args.g0:
        raise UsageError("stage 2 requires --g0 STAGE1_CHECKPOINT")
    echo_config(cfg, out)
    dirs = _out_dirs(out)
    data = _load_data(cfg)

    def run_stage1():
        if data["synthetic_in"] is None:
            raise DataError("stage 1 needs synthetic_degraded inputs")
        arch, kw = _arch_kwargs(cfg["arch"])
        net = init_weights(build_generator(arch, **kw), cfg["seed"])
        val = None
        if data["holdout_in"] is not None and data["holdout_truth"] is not None:
            val = (data["holdout_in"], data["holdout_truth"])
        stage_cfg = _stage_config(cfg, 1)
        net, rows = train_stage1(net, data["synthetic_in"],
                                 data["synthetic_truth"], stage_cfg,
                                 val_pairs=val)
        save_checkpoint(net, os.path.join(dirs["checkpoints"], "stage1.ckpt"),
                        stage=1, iteration=stage_cfg.iterations,
                        master_seed=cfg["seed"])
        write_metrics(rows, os.path.join(dirs["metrics"], "stage1.csv"))
        return net

    try:
        if args.multistage:
            net = run_stage1()
            for s in range(2, args.multistage + 1):
                net = _run_stage2(net, data, cfg, dirs, stage=s)
        elif args.stage == 1:
            run_stage1()
        else:
            g0, _ = load_checkpoint(args.g0)
            _run_stage2(g0, data, cfg, dirs, stage=2)
    except NumericAbort as exc:
        rescue = os.path.join(dirs["checkpoints"], "rescue.ckpt")
        if exc.net is not None:
            save_checkpoint(exc.net, rescue, stage=0,
                            iteration=exc.iteration, master_seed=cfg["seed"])
            print(f"last finite weights saved to {rescue}", file=sys.stderr)
        return _fail(f"numeric failure: {exc}", EXIT_NUMERIC)
    print(f"training artifacts written under {out}")
    return EXIT_OK


# -------------------------------------------------------------- restore

def cmd_restore(args):
    try:
        net, _ = load_checkpoint(args.model)
    except (CheckpointError, OSError) as exc:
        raise DataError(f"cannot load checkpoint {args.model}: {exc}") from exc
    names = _list_images(args.input)
    os.makedirs(args.out, exist_ok=True)
    for name in names:
        img = read_image(os.path.join(args.input, name))
        out = forward(net, img[None])
        if isinstance(out, tuple):
            out = out[-1]
        write_image(np.clip(out[0], 0.0, 1.0), os.path.join(args.out, name))
    print(f"restored {len(names)} images into {args.out}")
    return EXIT_OK


# ----------------------------------------------------------------- eval

def cmd_eval(args):
    dir_a, dir_b = args.pairs
    names_a = _list_images(dir_a)
    names_b = _list_images(dir_b)
    if names_a != names_b:
        only_a = sorted(set(names_a) - set(names_b))
        only_b = sorted(set(names_b) - set(names_a))
        raise DataError(
            f"directories do not pair up; only in {dir_a}: {only_a[:5]}; "
            f"only in {dir_b}: {only_b[:5]}")
    pairs = ((name, read_image(os.path.join(dir_a, name)),
              read_image(os.path.join(dir_b, name))) for name in names_a)
    rows, mean, median = evaluate(pairs, report_path=args.report)
    print(f"{len(names_a)} pairs; mean {mean} dB, median {median} dB; "
          f"report: {args.report}")
    return EXIT_OK


# ------------------------------------------------------------ gradcheck

def cmd_gradcheck(args):
    gradcheck_mod.FAULT_INJECTION = bool(args.inject_fault)
    try:
        if args.layer:
            if args.layer not in LAYER_KINDS:
                raise UsageError(
                    f"unknown layer kind {args.layer!r}; "
                    f"choose from {', '.join(LAYER_KINDS)}")
            results = gradcheck_mod.run_suite(seeds=range(args.seeds),
                                              kinds=[args.layer])
        else:
            results = gradcheck_mod.run_suite(seeds=range(args.seeds))
    finally:
        gradcheck_mod.FAULT_INJECTION = False
    failed = 0
    for res in results:
        status = "ok" if res.passed else "FAIL"
        print(f"{res.label:20s} max_rel_err={res.max_error:.3e} "
              f"tol={res.tolerance:.0e}  {status}")
        failed += not res.passed
    if failed:
        return _fail(f"{failed} gradient check(s) failed", EXIT_NUMERIC)
    print(f"all {len(results)} gradient checks passed")
    return EXIT_OK


# ----------------------------------------------------------------- main

def build_parser():
    parser = argparse.ArgumentParser(
        prog="restokit",
        description="Two-stage restoration training pipeline")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate clean/degraded image sets")
    p.add_argument("--scenes", type=int, required=True)
    p.add_argument("--size", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--degrade", required=True,
                   help="e.g. bicubic4, pseudoreal4:blur=1.2,noise=0.01,"
                        "quantize=1, moire")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("train", help="run training stages")
    p.add_argument("--config", default=None, help="JSON run config")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--stage", type=int, choices=(1, 2))
    group.add_argument("--multistage", type=int, metavar="K")
    p.add_argument("--g0", default=None,
                   help="stage-1 checkpoint (required for --stage 2)")
    p.add_argument("--out", default=None, help="output directory")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("restore", help="run a model over an image directory")
    p.add_argument("--model", required=True)
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_restore)

    p = sub.add_parser("eval", help="PSNR report over paired directories")
    p.add_argument("--pairs", nargs=2, metavar=("DIR_A", "DIR_B"),
                   required=True)
    p.add_argument("--report", required=True)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("gradcheck", help="finite-difference gradient checks")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--all", action="store_true")
    group.add_argument("--layer", default=None)
    p.add_argument("--seeds", type=int, default=50)
    p.add_argument("--inject-fault", action="store_true",
                   help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_gradcheck)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits with 2 on usage errors; fold into the usage code
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    if getattr(args, "multistage", None) is not None and args.multistage < 2:
        return _fail("--multistage needs K >= 2", EXIT_USAGE)
    try:
        return args.func(args)
    except (UsageError, ConfigError, ArchError) as exc:
        return _fail(str(exc), EXIT_USAGE)
    except (DataError, PnmError, CheckpointError, OSError) as exc:
        return _fail(str(exc), EXIT_DATA)
    except NumericAbort as exc:
        return _fail(f"numeric failure: {exc}", EXIT_NUMERIC)


if __name__ == "__main__":
    sys.exit(main())
