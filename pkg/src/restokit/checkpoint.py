"""Binary checkpoint format (magic "SGT1").

Layout, all little-endian:
    magic        4 bytes  b"SGT1"
    version      u32      currently 1
    stage        u32
    iteration    u64
    master_seed  u64
    arch_json    u32 length + utf-8 (arch name + hyper parameters)
    tensor count u32
    per tensor:  u16 name length + utf-8 name, u8 rank, u32 dims...,
                 float32 data
Round trips are bit-exact.
"""

import io
import json
import os
import struct

import numpy as np

from . import models

MAGIC = b"SGT1"
VERSION = 1


class CheckpointError(Exception):
    pass


class BadMagicError(CheckpointError):
    pass


class VersionMismatchError(CheckpointError):
    pass


class CorruptCheckpointError(CheckpointError):
    pass


class TensorMismatchError(CheckpointError):
    pass


def save_checkpoint(net, path, stage=0, iteration=0, master_seed=0):
    """Serialize a network's weights and metadata; atomic write."""
    buf = io.BytesIO()
    buf.write(MAGIC)
    buf.write(struct.pack("<IIQQ", VERSION, stage, iteration, master_seed))
    arch_json = json.dumps({"arch": net.arch, "hyper": net.hyper},
                           sort_keys=True).encode()
    buf.write(struct.pack("<I", len(arch_json)))
    buf.write(arch_json)
    params = net.parameters()
    buf.write(struct.pack("<I", len(params)))
    for name, arr in params.items():
        encoded = name.encode()
        buf.write(struct.pack("<H", len(encoded)))
        buf.write(encoded)
        buf.write(struct.pack("<B", arr.ndim))
        for d in arr.shape:
            buf.write(struct.pack("<I", d))
        buf.write(np.ascontiguousarray(arr, dtype="<f4").tobytes())
    tmp = f"{path}.tmp"
    with open(tmp, "wb") as f:
        f.write(buf.getvalue())
    os.replace(tmp, path)


def _read_exact(f, n, what):
    data = f.read(n)
    if len(data) != n:
        raise CorruptCheckpointError(f"truncated checkpoint while reading {what}")
    return data


def read_checkpoint(path):
    """Parse a checkpoint file into (metadata dict, {name: array})."""
    with open(path, "rb") as f:
        if _read_exact(f, 4, "magic") != MAGIC:
            raise BadMagicError(f"{path}: not a checkpoint (bad magic)")
        version, stage, iteration, master_seed = struct.unpack(
            "<IIQQ", _read_exact(f, 24, "header"))
        if version != VERSION:
            raise VersionMismatchError(
                f"{path}: version {version}, expected {VERSION}")
        (alen,) = struct.unpack("<I", _read_exact(f, 4, "arch length"))
        arch_info = json.loads(_read_exact(f, alen, "arch json"))
        (count,) = struct.unpack("<I", _read_exact(f, 4, "tensor count"))
        tensors = {}
        for _ in range(count):
            (nlen,) = struct.unpack("<H", _read_exact(f, 2, "name length"))
            name = _read_exact(f, nlen, "name").decode()
            (rank,) = struct.unpack("<B", _read_exact(f, 1, "rank"))
            dims = struct.unpack(f"<{rank}I", _read_exact(f, 4 * rank, "dims"))
            size = int(np.prod(dims)) if rank else 1
            data = _read_exact(f, 4 * size, f"tensor {name}")
            tensors[name] = np.frombuffer(data, dtype="<f4").reshape(dims).copy()
        if f.read(1):
            raise CorruptCheckpointError(f"{path}: trailing bytes after tensors")
    meta = {"stage": stage, "iteration": iteration, "master_seed": master_seed,
            **arch_info}
    return meta, tensors


def load_checkpoint(path, net=None):
    """Load a checkpoint.  With `net` given, weights are loaded into that
    spec (names and shapes must match exactly); otherwise the network is
    rebuilt from the stored architecture metadata.  Returns (net, meta).
    """
    meta, tensors = read_checkpoint(path)
    if net is None:
        net = models.build_network(meta["arch"], **meta["hyper"])
    expected = net.parameters()
    for name, arr in expected.items():
        if name not in tensors:
            raise TensorMismatchError(f"checkpoint missing tensor {name!r}")
        if tensors[name].shape != arr.shape:
            raise TensorMismatchError(
                f"tensor {name!r} has shape {tensors[name].shape}, "
                f"network expects {arr.shape}")
    extra = set(tensors) - set(expected)
    if extra:
        raise TensorMismatchError(f"checkpoint has unexpected tensors {sorted(extra)}")
    net.set_parameters(tensors)
    return net, meta
