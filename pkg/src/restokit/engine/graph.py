"""Static layer graphs with recorded forward passes and exact backprop.

A network is an ordered list of :class:`LayerNode`; each node reads the
output of one earlier node (``input`` index, -1 for the network input)
and ``residual_add`` nodes additionally read a second earlier node.
Execution order is the list order, so the backward pass is simply the
reverse sweep with per-node gradient accumulation.
"""

from dataclasses import dataclass, field

import numpy as np

from . import ops

LAYER_KINDS = (
    "conv2d",
    "relu",
    "leaky_relu",
    "sigmoid",
    "nearest_upsample",
    "avg_downsample",
    "residual_add",
    "dense",
    "global_avg_pool",
)


class GraphError(ValueError):
    """Raised for malformed graphs or misuse of the tape."""


@dataclass
class LayerNode:
    name: str
    kind: str
    input: int                      # index of the feeding node, -1 = network input
    params: dict = field(default_factory=dict)   # name -> np.ndarray
    hyper: dict = field(default_factory=dict)    # stride, padding, slope, factor, source


@dataclass
class NetworkSpec:
    name: str
    arch: str                        # "sr_small" | "dm_net" | "discriminator"
    hyper: dict
    nodes: list
    outputs: list                    # node indices whose values are network outputs

    def validate(self):
        seen = set()
        for i, node in enumerate(self.nodes):
            if node.kind not in LAYER_KINDS:
                raise GraphError(f"unknown layer kind {node.kind!r}")
            if not (-1 <= node.input < i):
                raise GraphError(f"node {node.name}: input {node.input} not acyclic")
            if node.kind == "residual_add":
                src = node.hyper["source"]
                if not (0 <= src < i):
                    raise GraphError(f"node {node.name}: residual source {src} invalid")
            for pname in node.params:
                full = f"{node.name}.{pname}"
                if full in seen:
                    raise GraphError(f"duplicate parameter name {full}")
                seen.add(full)

    def parameters(self):
        """Flat view of all parameters as {qualified name: array}."""
        out = {}
        for node in self.nodes:
            for pname, arr in node.params.items():
                out[f"{node.name}.{pname}"] = arr
        return out

    def set_parameters(self, values):
        """Replace parameters from a {qualified name: array} mapping."""
        for node in self.nodes:
            for pname in node.params:
                full = f"{node.name}.{pname}"
                if full in values:
                    node.params[pname] = values[full]

    def parameter_count(self):
        return sum(int(a.size) for a in self.parameters().values())

    def astype(self, dtype):
        for node in self.nodes:
            for pname in list(node.params):
                node.params[pname] = node.params[pname].astype(dtype)
        return self


@dataclass
class GradTape:
    """Cached per-node inputs of one forward pass, for the backward sweep."""
    values: list          # values[i] = output of node i
    net_input: np.ndarray


def _node_forward(node, x):
    kind = node.kind
    if kind == "conv2d":
        return ops.conv2d(x, node.params["weight"], node.params["bias"],
                          stride=node.hyper.get("stride", 1),
                          padding=node.hyper.get("padding", "zero"))
    if kind == "relu":
        return ops.relu(x)
    if kind == "leaky_relu":
        return ops.leaky_relu(x, node.hyper["slope"])
    if kind == "sigmoid":
        return ops.sigmoid(x)
    if kind == "nearest_upsample":
        return ops.nearest_upsample(x, node.hyper["factor"])
    if kind == "avg_downsample":
        return ops.avg_downsample(x, node.hyper["factor"])
    if kind == "dense":
        return ops.dense(x, node.params["weight"], node.params["bias"])
    if kind == "global_avg_pool":
        return ops.global_avg_pool(x)
    raise GraphError(f"unknown layer kind {kind!r}")


def forward(net, x, record=False):
    """Run the network; returns (outputs, tape) with tape None unless recording.

    `outputs` is a list aligned with ``net.outputs``.
    """
    x = ops.check_image_tensor(x, "network input")
    values = [None] * len(net.nodes)
    for i, node in enumerate(net.nodes):
        src = x if node.input == -1 else values[node.input]
        if node.kind == "residual_add":
            values[i] = src + values[node.hyper["source"]]
        else:
            values[i] = _node_forward(node, src)
    outs = [values[i] for i in net.outputs]
    for o in outs:
        if not np.all(np.isfinite(o)):
            raise FloatingPointError(f"non-finite values in output of {net.name}")
    tape = GradTape(values=values, net_input=x) if record else None
    return outs, tape


def backward(net, tape, output_grads):
    """Reverse sweep through a recorded forward pass.

    output_grads: {node index: gradient array} seeding the sweep (the
    indices normally come from ``net.outputs``).  Returns
    (input_grad, {qualified param name: gradient}).
    """
    if tape is None:
        raise GraphError("backward called without a recorded forward pass")
    node_grads = {}
    for idx, g in output_grads.items():
        if g.shape != tape.values[idx].shape:
            raise GraphError(
                f"output grad shape {g.shape} != value shape {tape.values[idx].shape}")
        node_grads[idx] = node_grads.get(idx, 0) + g
    param_grads = {f"{n.name}.{p}": np.zeros_like(a)
                   for n in net.nodes for p, a in n.params.items()}
    input_grad = np.zeros_like(tape.net_input)

    def feed(idx, g):
        nonlocal input_grad
        if idx == -1:
            input_grad = input_grad + g
        else:
            node_grads[idx] = node_grads.get(idx, 0) + g

    for i in range(len(net.nodes) - 1, -1, -1):
        g = node_grads.pop(i, None)
        if g is None:
            continue
        node = net.nodes[i]
        x = tape.net_input if node.input == -1 else tape.values[node.input]
        kind = node.kind
        if kind == "conv2d":
            gx, gw, gb = ops.conv2d_backward(
                x, node.params["weight"], g,
                stride=node.hyper.get("stride", 1),
                padding=node.hyper.get("padding", "zero"))
            param_grads[f"{node.name}.weight"] += gw
            param_grads[f"{node.name}.bias"] += gb
            feed(node.input, gx)
        elif kind == "relu":
            feed(node.input, ops.relu_backward(x, g))
        elif kind == "leaky_relu":
            feed(node.input, ops.leaky_relu_backward(x, g, node.hyper["slope"]))
        elif kind == "sigmoid":
            feed(node.input, ops.sigmoid_backward(tape.values[i], g))
        elif kind == "nearest_upsample":
            feed(node.input, ops.nearest_upsample_backward(g, node.hyper["factor"]))
        elif kind == "avg_downsample":
            feed(node.input, ops.avg_downsample_backward(g, node.hyper["factor"]))
        elif kind == "residual_add":
            feed(node.input, g)
            feed(node.hyper["source"], g)
        elif kind == "dense":
            gx, gw, gb = ops.dense_backward(x, node.params["weight"], g)
            param_grads[f"{node.name}.weight"] += gw
            param_grads[f"{node.name}.bias"] += gb
            feed(node.input, gx)
        elif kind == "global_avg_pool":
            feed(node.input, ops.global_avg_pool_backward(g, x.shape[2], x.shape[3]))
        else:
            raise GraphError(f"unknown layer kind {kind!r}")
    return input_grad, param_grads
