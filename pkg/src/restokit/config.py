"""Run configuration: JSON documents with defaults and typo safety.

Every field is optional; unknown keys anywhere in the tree are rejected
so a misspelled knob cannot silently fall back to its default.  The
parsed config is echoed into the output directory for provenance.
"""

import json
import os


class ConfigError(ValueError):
    pass


DEFAULTS = {
    "seed": 0,
    "arch": {
        "name": "sr_small",
        "blocks": 1,
        "features": 32,
        "scale": 4,
        "res_blocks": 4,      # dm_net only
        "tail_convs": 5,      # dm_net only
    },
    "degradation": {
        "synthetic": "bicubic4",
        "real": "pseudoreal4:blur=1.2,noise=0.01,quantize=1",
    },
    "data": {
        "manifest": "",       # optional dataset manifest; "" = procedural
        "scenes": 400,
        "size": 48,
        "synthetic_count": 150,
        "real_count": 150,
        "holdout": 100,
    },
    "train": {
        "stage1": {
            "lr": 3e-3,
            "batch": 8,
            "iterations": 2000,
            "log_interval": 100,
            "beta1": 0.9,
            "beta2": 0.99,
        },
        "stage2": {
            "lr": 3e-4,
            "batch": 8,
            "iterations": 200,
            "log_interval": 20,
            "beta1": 0.9,
            "beta2": 0.99,
            "lambda_adv": 1e-3,
            "gan_k": 1,
            "disc_stages": 3,
            "disc_features": 16,
            "disc_lr": 3e-3,  # 0 = reuse stage-2 lr
        },
    },
    "output": {
        "dir": "out",
    },
}


def _merge(defaults, overrides, path=""):
    out = {}
    for key, default in defaults.items():
        here = f"{path}.{key}" if path else key
        if key not in overrides:
            out[key] = default
        elif isinstance(default, dict):
            if not isinstance(overrides[key], dict):
                raise ConfigError(f"config key {here!r} must be an object")
            out[key] = _merge(default, overrides[key], here)
        else:
            value = overrides[key]
            if isinstance(value, dict):
                raise ConfigError(f"config key {here!r} must be a scalar")
            out[key] = value
    unknown = set(overrides) - set(defaults)
    if unknown:
        where = path or "top level"
        raise ConfigError(
            f"unknown config key(s) at {where}: {sorted(unknown)}")
    return out


def load_config(path=None):
    """Merge a JSON config file over the documented defaults."""
    if path is None:
        return _merge(DEFAULTS, {})
    try:
        with open(path) as f:
            doc = json.load(f)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError(f"config {path} must be a JSON object")
    return _merge(DEFAULTS, doc)


def echo_config(config, out_dir):
    """Record the fully resolved config next to the run's outputs."""
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, "config-echo.json")
    tmp = f"{path}.tmp"
    with open(tmp, "w") as f:
        json.dump(config, f, indent=2, sort_keys=True)
        f.write("\n")
    os.replace(tmp, path)
    return path
