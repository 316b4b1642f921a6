import numpy as np
import pytest

from restokit.engine import gradcheck as gc
from restokit.engine import graph
from restokit.engine.gradcheck import (
    _conv,
    gradcheck,
    run_discriminator_probe,
    run_probe,
)
from restokit.engine.graph import LAYER_KINDS, NetworkSpec


@pytest.mark.parametrize("kind", LAYER_KINDS)
@pytest.mark.parametrize("seed", [0, 1, 2])
def test_layer_probe_passes(kind, seed):
    res = run_probe(kind, seed)
    assert res.passed, f"{kind} seed {seed}: max rel err {res.max_error}"


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_discriminator_bce_probe(seed):
    res = run_discriminator_probe(seed)
    assert res.passed, f"seed {seed}: max rel err {res.max_error}"


def test_one_layer_conv_mse_passes():
    rng = np.random.default_rng(9)
    net = NetworkSpec("tiny", "sr_small", {}, [_conv("c0", 2, 2, -1)], [0])
    for node in net.nodes:
        for p, a in node.params.items():
            node.params[p] = rng.standard_normal(a.shape).astype(np.float32) * 0.4
    x = rng.standard_normal((1, 2, 5, 5)).astype(np.float32)
    target = rng.standard_normal((1, 2, 5, 5)).astype(np.float32)
    res = gradcheck(net, x, loss="mse", target=target)
    assert res.passed


def test_zero_everything_gives_zero_gradients():
    net = NetworkSpec("zero", "sr_small", {}, [_conv("c0", 1, 1, -1)], [0])
    x = np.zeros((1, 1, 4, 4), np.float32)
    res = gradcheck(net, x, loss="mse", target=np.zeros((1, 1, 4, 4), np.float32))
    assert res.max_error == 0.0
    outs, tape = graph.forward(net.astype(np.float64), x.astype(np.float64), record=True)
    from restokit.engine.losses import mse_loss
    _, g = mse_loss(outs[0], np.zeros_like(outs[0]))
    _, pgrads = graph.backward(net, tape, {0: g})
    for name, arr in pgrads.items():
        np.testing.assert_array_equal(arr, 0.0, err_msg=name)


def test_parameter_cap_enforced():
    w = np.zeros((100, 100, 3, 3), np.float32)
    node = _conv("big", 100, 100, -1)
    node.params["weight"] = w
    net = NetworkSpec("big", "sr_small", {}, [node], [0])
    with pytest.raises(ValueError, match="finite differences capped"):
        gradcheck(net, np.zeros((1, 100, 4, 4), np.float32),
                  target=np.zeros((1, 100, 4, 4), np.float32))


def test_fault_injection_hook_fails_check():
    gc.FAULT_INJECTION = True
    try:
        res = run_probe("conv2d", 0)
    finally:
        gc.FAULT_INJECTION = False
    assert not res.passed


def test_backward_requires_recorded_tape():
    net = NetworkSpec("t", "sr_small", {}, [_conv("c0", 1, 1, -1)], [0])
    with pytest.raises(graph.GraphError):
        graph.backward(net, None, {})
