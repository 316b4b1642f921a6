"""Network construction, weight init and the forward interface.

Three architecture families:
  * sr_small  - compact SRResNet-style x2/x4 upscaler
  * dm_net    - multiscale restorer: clean up at 1/4 scale, upsample,
                refine at full scale; produces (coarse, full) outputs
  * discriminator - strided conv stack to a probability per batch item
"""

import hashlib

import numpy as np

from .engine.graph import LayerNode, NetworkSpec, forward as graph_forward
from .engine.ops import ShapeError


class ArchError(ValueError):
    pass


def _conv_node(name, c_in, c_out, inp, k=3, stride=1, padding="zero"):
    return LayerNode(name, "conv2d", inp,
                     params={"weight": np.zeros((c_out, c_in, k, k), np.float32),
                             "bias": np.zeros(c_out, np.float32)},
                     hyper={"stride": stride, "padding": padding})


def _residual_blocks(nodes, count, features, prefix="block"):
    """Append conv-relu-conv blocks with skip connections; returns last index."""
    for b in range(count):
        src = len(nodes) - 1
        nodes.append(_conv_node(f"{prefix}{b}.conv1", features, features, src))
        nodes.append(LayerNode(f"{prefix}{b}.relu", "relu", len(nodes) - 1))
        nodes.append(_conv_node(f"{prefix}{b}.conv2", features, features, len(nodes) - 1))
        nodes.append(LayerNode(f"{prefix}{b}.skip", "residual_add", len(nodes) - 1,
                               hyper={"source": src}))
    return len(nodes) - 1


def build_generator(arch, **kw):
    """Build an uninitialized generator NetworkSpec.

    arch "sr_small": blocks, features, scale.
    arch "dm_net":   res_blocks, tail_convs, features, scale.
    Desk-scale defaults are small; pass paper-scale values explicitly.
    """
    if arch == "sr_small":
        blocks = kw.pop("blocks", 4)
        features = kw.pop("features", 32)
        scale = kw.pop("scale", 4)
        if kw:
            raise ArchError(f"unknown sr_small parameters {sorted(kw)}")
        if blocks < 1 or features < 4:
            raise ArchError("sr_small needs blocks >= 1 and features >= 4")
        if scale not in (2, 4):
            raise ArchError("scale must be 2 or 4")
        nodes = [_conv_node("entry", 3, features, -1, k=5)]
        _residual_blocks(nodes, blocks, features)
        for step in range(scale // 2):
            nodes.append(LayerNode(f"up{step}.nn", "nearest_upsample",
                                   len(nodes) - 1, hyper={"factor": 2}))
            nodes.append(_conv_node(f"up{step}.conv", features, features, len(nodes) - 1))
        nodes.append(_conv_node("head", features, 3, len(nodes) - 1))
        net = NetworkSpec("sr_small", "sr_small",
                          {"blocks": blocks, "features": features, "scale": scale},
                          nodes, [len(nodes) - 1])
    elif arch == "dm_net":
        res_blocks = kw.pop("res_blocks", 4)
        tail_convs = kw.pop("tail_convs", 5)
        features = kw.pop("features", 32)
        scale = kw.pop("scale", 4)
        if kw:
            raise ArchError(f"unknown dm_net parameters {sorted(kw)}")
        if res_blocks < 1 or features < 4 or tail_convs < 1:
            raise ArchError("dm_net needs res_blocks, tail_convs >= 1 and features >= 4")
        nodes = [LayerNode("down", "avg_downsample", -1, hyper={"factor": scale}),
                 _conv_node("entry", 3, features, 0, k=5)]
        _residual_blocks(nodes, res_blocks, features)
        nodes.append(_conv_node("coarse_head", features, 3, len(nodes) - 1))
        coarse_idx = len(nodes) - 1
        nodes.append(LayerNode("up.nn", "nearest_upsample", coarse_idx,
                               hyper={"factor": scale}))
        prev_c = 3
        for t in range(tail_convs):
            nodes.append(_conv_node(f"tail{t}.conv", prev_c, features, len(nodes) - 1))
            nodes.append(LayerNode(f"tail{t}.relu", "relu", len(nodes) - 1))
            prev_c = features
        nodes.append(_conv_node("head", features, 3, len(nodes) - 1))
        net = NetworkSpec("dm_net", "dm_net",
                          {"res_blocks": res_blocks, "tail_convs": tail_convs,
                           "features": features, "scale": scale},
                          nodes, [coarse_idx, len(nodes) - 1])
    else:
        raise ArchError(f"unknown generator arch {arch!r}")
    net.validate()
    return net


def build_discriminator(stages=3, base_features=16):
    """Strided conv stack ending in a sigmoid probability per batch item."""
    if stages < 2:
        raise ArchError("discriminator needs stages >= 2")
    nodes = []
    c_in = 3
    feats = base_features
    for s in range(stages):
        nodes.append(_conv_node(f"stage{s}.conv", c_in, feats,
                                len(nodes) - 1, stride=2))
        nodes.append(LayerNode(f"stage{s}.lrelu", "leaky_relu", len(nodes) - 1,
                               hyper={"slope": 0.2}))
        c_in, feats = feats, feats * 2
    nodes.append(LayerNode("pool", "global_avg_pool", len(nodes) - 1))
    nodes.append(LayerNode("out", "dense", len(nodes) - 1,
                           params={"weight": np.zeros((1, c_in), np.float32),
                                   "bias": np.zeros(1, np.float32)}))
    nodes.append(LayerNode("prob", "sigmoid", len(nodes) - 1))
    net = NetworkSpec("discriminator", "discriminator",
                      {"stages": stages, "base_features": base_features},
                      nodes, [len(nodes) - 1])
    net.validate()
    return net


def build_network(arch, **kw):
    if arch == "discriminator":
        return build_discriminator(**kw)
    return build_generator(arch, **kw)


def _param_rng(seed, name):
    digest = hashlib.sha256(f"{seed}:{name}".encode()).digest()
    return np.random.default_rng(int.from_bytes(digest[:8], "little"))


def init_weights(net, seed):
    """He-style scaled-uniform init; deterministic per (seed, param name)."""
    for node in net.nodes:
        if "weight" not in node.params:
            continue
        w = node.params["weight"]
        fan_in = int(np.prod(w.shape[1:]))
        limit = np.sqrt(6.0 / fan_in)
        rng = _param_rng(seed, f"{node.name}.weight")
        node.params["weight"] = rng.uniform(-limit, limit, w.shape).astype(np.float32)
        node.params["bias"] = np.zeros_like(node.params["bias"])
    return net


def forward(net, x, record=False):
    """Run the network.  Returns a single tensor for single-output nets,
    a (coarse, full) tuple for dm_net; with record=True returns
    (outputs, tape) instead.
    """
    if net.arch == "discriminator":
        stages = net.hyper.get("stages", 3)
        if min(x.shape[2], x.shape[3]) < 2 ** stages:
            raise ShapeError(
                f"discriminator input {x.shape[2]}x{x.shape[3]} smaller than "
                f"2^{stages}")
    if net.arch in ("sr_small", "dm_net"):
        if x.shape[1] != 3:
            raise ShapeError(f"generator input must have 3 channels, got {x.shape[1]}")
    outs, tape = graph_forward(net, x, record=record)
    result = outs[0] if len(outs) == 1 else tuple(outs)
    if record:
        return outs, tape
    return result
