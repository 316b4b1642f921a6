"""Two-stage training: synthetic pretraining, surrogate generation, and
adversarially regularized retraining on real degraded inputs.

Stage 1 fits a generator on (synthetically degraded, clean) pairs.
Stage 2 re-pairs real degraded inputs with surrogate targets produced by
the stage-1 model, then fine-tunes a copy of that model under a
fidelity-plus-adversarial objective, alternating with a discriminator
trained against an unpaired clean-image pool.  Stages beyond the second
repeat stage 2 with surrogates regenerated from the previous model.

All batch composition is a pure function of (seed, stage, iteration), so
runs are bit-reproducible at thread count 1.
"""

import copy
import math
from dataclasses import dataclass, field

import numpy as np

from ..degrade.specs import derive_seed
from ..engine.graph import backward, forward as graph_forward
from ..engine.losses import adversarial_loss, discriminator_loss, mse_loss
from ..engine.ops import avg_downsample
from ..models import build_discriminator, init_weights
from .adam import adam_step, init_adam
from .metrics import MetricsRow, psnr

# RNG stream labels inside one (seed, stage) namespace
_STREAM_BATCH = 0        # generator minibatch selection
_STREAM_CLEAN = 1        # discriminator's unpaired clean minibatch
_STREAM_EXTRA_FAKE = 2   # extra fake batches when gan_k > 1
_STREAM_DISC_INIT = 3    # discriminator weight init


class NumericAbort(ArithmeticError):
    """Raised when training hits non-finite numbers.

    Carries the last set of finite parameters (`net`) and the iteration
    at which the abort happened so callers can dump a rescue checkpoint.
    """

    def __init__(self, message, net=None, iteration=0):
        super().__init__(message)
        self.net = net
        self.iteration = iteration


@dataclass
class TrainConfig:
    """Knobs for one training stage; desk-scale defaults."""
    lr: float = 1e-4
    batch: int = 8
    iterations: int = 2000
    lambda_adv: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    seed: int = 0
    gan_k: int = 1
    log_interval: int = 50
    disc_stages: int = 3
    disc_features: int = 16
    disc_lr: float = 0.0          # 0 = same as lr

    def validate(self):
        if self.batch < 1 or self.iterations < 1:
            raise ValueError("batch and iterations must be >= 1")
        if self.gan_k < 1:
            raise ValueError("gan_k must be >= 1")
        if self.lr <= 0:
            raise ValueError("lr must be positive")

    @property
    def effective_disc_lr(self):
        return self.disc_lr if self.disc_lr > 0 else self.lr


def _rng(seed, stage, stream, iteration):
    return np.random.default_rng(
        derive_seed(derive_seed(derive_seed(seed, stage), stream), iteration))


def _batch(rng, n, batch):
    return rng.choice(n, size=min(batch, n), replace=batch > n)


def _fidelity(outs, net, target):
    """MSE fidelity loss and per-output gradients.

    Two-output (coarse, full) generators add an MSE term at the coarse
    scale against the box-downsampled target.
    """
    grads = {}
    loss, g_full = mse_loss(outs[-1], target)
    grads[net.outputs[-1]] = g_full
    if len(outs) == 2:
        scale = target.shape[2] // outs[0].shape[2]
        coarse_target = avg_downsample(target, scale)
        loss_c, g_c = mse_loss(outs[0], coarse_target)
        loss += loss_c
        grads[net.outputs[0]] = g_c
    return loss, grads


def _check_finite(value, net, iteration, label):
    if not math.isfinite(value):
        raise NumericAbort(f"non-finite {label} at iteration {iteration}",
                           net=net, iteration=iteration)


def _val_psnr(net, val_inputs, val_refs):
    scores = []
    for i in range(val_inputs.shape[0]):
        outs, _ = graph_forward(net, val_inputs[i:i + 1])
        scores.append(psnr(np.clip(outs[-1], 0.0, 1.0), val_refs[i:i + 1]))
    finite = [s for s in scores if math.isfinite(s)]
    return float(np.mean(finite)) if finite else float("inf")


def train_stage1(net, inputs, targets, config, val_pairs=None, stage=1):
    """Fit `net` on paired (degraded, clean) tensors by MSE.

    inputs/targets: (count, 3, h, w) / (count, 3, H, W) float32 stacks,
    index-aligned.  Returns (net, metrics rows).  `net` must already be
    weight-initialized; it is updated in place.
    """
    config.validate()
    if inputs.shape[0] != targets.shape[0]:
        raise ValueError(
            f"pair count mismatch: {inputs.shape[0]} inputs vs "
            f"{targets.shape[0]} targets")
    state = init_adam(net.parameters())
    rows = []
    for it in range(config.iterations):
        idx = _batch(_rng(config.seed, stage, _STREAM_BATCH, it),
                     inputs.shape[0], config.batch)
        x, y = inputs[idx], targets[idx]
        try:
            outs, tape = graph_forward(net, x, record=True)
        except FloatingPointError as exc:
            raise NumericAbort(str(exc), net=net, iteration=it) from exc
        loss, out_grads = _fidelity(outs, net, y)
        _check_finite(loss, net, it, "loss")
        _, pgrads = backward(net, tape, out_grads)
        net.set_parameters(adam_step(net.parameters(), pgrads, state,
                                     config.lr, config.beta1, config.beta2,
                                     config.eps))
        if (it + 1) % config.log_interval == 0 or it == config.iterations - 1:
            if val_pairs is not None:
                score = _val_psnr(net, *val_pairs)
            else:
                score = psnr(np.clip(outs[-1], 0.0, 1.0), y)
            rows.append(MetricsRow(it + 1, loss, 0.0, 0.0, score, 0.0))
    return net, rows


def generate_surrogates(net, inputs):
    """Surrogate targets: one independent forward pass per input image."""
    out = []
    for i in range(inputs.shape[0]):
        outs, _ = graph_forward(net, inputs[i:i + 1])
        out.append(outs[-1][0])
    return np.stack(out)


def make_discriminator(config, stage=2):
    """Fresh discriminator for one adversarial stage, seeded by stage."""
    disc = build_discriminator(stages=config.disc_stages,
                               base_features=config.disc_features)
    init_weights(disc,
                 derive_seed(derive_seed(config.seed, stage), _STREAM_DISC_INIT))
    return disc


def _disc_update(disc, d_state, fake, clean, config):
    """One discriminator BCE step; returns the loss."""
    outs_f, tape_f = graph_forward(disc, fake, record=True)
    outs_r, tape_r = graph_forward(disc, clean, record=True)
    loss, g_real, g_fake = discriminator_loss(outs_r[0], outs_f[0])
    _, pg_r = backward(disc, tape_r, {disc.outputs[0]: g_real})
    _, pg_f = backward(disc, tape_f, {disc.outputs[0]: g_fake})
    pgrads = {k: pg_r[k] + pg_f[k] for k in pg_r}
    disc.set_parameters(adam_step(disc.parameters(), pgrads, d_state,
                                  config.effective_disc_lr, config.beta1,
                                  config.beta2, config.eps))
    return loss


def train_stage2(g0, real_inputs, surrogates, clean_pool, config,
                 val_pairs=None, stage=2):
    """Adversarially regularized retraining on real degraded inputs.

    The generator starts as an exact copy of `g0`; the surrogate targets
    stay frozen for the whole stage.  Each iteration runs `gan_k`
    discriminator steps (fakes detached, clean minibatch sampled
    independently) followed by one generator step minimizing
    fidelity + lambda_adv * adversarial.  Returns (G, D, metrics rows).
    """
    config.validate()
    if real_inputs.shape[0] != surrogates.shape[0]:
        raise ValueError(
            f"surrogate count {surrogates.shape[0]} != real input count "
            f"{real_inputs.shape[0]}")
    net = copy.deepcopy(g0)
    disc = make_discriminator(config, stage)
    g_state = init_adam(net.parameters())
    d_state = init_adam(disc.parameters())
    rows = []
    for it in range(config.iterations):
        idx = _batch(_rng(config.seed, stage, _STREAM_BATCH, it),
                     real_inputs.shape[0], config.batch)
        x, target = real_inputs[idx], surrogates[idx]
        try:
            outs, tape = graph_forward(net, x, record=True)
            fake = outs[-1]

            loss_disc = 0.0
            for k in range(config.gan_k):
                if k == 0:
                    d_fake_batch = fake
                else:
                    extra = _batch(
                        _rng(config.seed, stage, _STREAM_EXTRA_FAKE,
                             it * config.gan_k + k),
                        real_inputs.shape[0], config.batch)
                    d_fake_batch = graph_forward(net, real_inputs[extra])[0][-1]
                clean_idx = _batch(
                    _rng(config.seed, stage, _STREAM_CLEAN,
                         it * config.gan_k + k),
                    clean_pool.shape[0], config.batch)
                loss_disc = _disc_update(disc, d_state, d_fake_batch,
                                         clean_pool[clean_idx], config)

            loss_fid, out_grads = _fidelity(outs, net, target)
            d_outs, d_tape = graph_forward(disc, fake, record=True)
            loss_adv, g_adv = adversarial_loss(d_outs[0])
            adv_input_grad, _ = backward(disc, d_tape,
                                         {disc.outputs[0]: g_adv})
            full_idx = net.outputs[-1]
            out_grads[full_idx] = (
                out_grads[full_idx]
                + np.float32(config.lambda_adv) * adv_input_grad.astype(np.float32))
        except FloatingPointError as exc:
            raise NumericAbort(str(exc), net=net, iteration=it) from exc
        for val, label in ((loss_fid, "fidelity loss"),
                           (loss_adv, "adversarial loss"),
                           (loss_disc, "discriminator loss")):
            _check_finite(val, net, it, label)
        _, pgrads = backward(net, tape, out_grads)
        net.set_parameters(adam_step(net.parameters(), pgrads, g_state,
                                     config.lr, config.beta1, config.beta2,
                                     config.eps))
        if (it + 1) % config.log_interval == 0 or it == config.iterations - 1:
            if val_pairs is not None:
                score = _val_psnr(net, *val_pairs)
            else:
                score = psnr(np.clip(fake, 0.0, 1.0), target)
            rows.append(MetricsRow(it + 1, loss_fid, loss_adv, loss_disc,
                                   score, config.lambda_adv))
    return net, disc, rows


def train_multistage(g0, synth_inputs, clean_targets, real_inputs, clean_pool,
                     stage1_config, stage2_config, stages, val_pairs=None):
    """Full multi-stage schedule.

    Stage 1 trains `g0` on the synthetic pairs; every later stage s
    regenerates surrogates from the stage s-1 model and reruns the
    adversarial stage.  Returns (models, surrogate sets, metrics lists),
    one entry per stage (surrogates have stages-1 entries).
    """
    if stages < 2:
        raise ValueError("multistage training needs stages >= 2")
    net, rows = train_stage1(g0, synth_inputs, clean_targets, stage1_config,
                             val_pairs=val_pairs, stage=1)
    models = [net]
    metrics = [rows]
    surrogate_sets = []
    for s in range(2, stages + 1):
        surrogates = generate_surrogates(models[-1], real_inputs)
        surrogate_sets.append(surrogates)
        net, _, rows = train_stage2(models[-1], real_inputs, surrogates,
                                    clean_pool, stage2_config,
                                    val_pairs=val_pairs, stage=s)
        models.append(net)
        metrics.append(rows)
    return models, surrogate_sets, metrics
