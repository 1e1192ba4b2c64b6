"""Cross-entropy training of the discrete recurrent classifier.

The loss sums the negative log probability of the true label over every
time step of the unrolled recursion and every datum.  Gradients come from
reverse accumulation through the unrolled steps (checked elsewhere against
central finite differences); optimization is plain minibatch SGD with
optional momentum.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import ConfigError, DimensionError, DivergenceError
from .datasets import Dataset
from .network import (
    Activation,
    LayerParams,
    MlpParams,
    RnnOdeSpec,
    _apply_activation,
)

LOG_CLIP = 1e-12


@dataclass(frozen=True)
class ArchConfig:
    """Architecture of a classifier to be trained.

    ``hidden_widths`` are the inner widths of the square hidden map; an
    empty tuple means a single layer acting directly on the state.  Input
    and label dimensions come from the dataset at training time.
    """

    state_dim: int = 3
    hidden_widths: tuple[int, ...] = (16,)
    embed_activation: Activation = Activation.TANH
    hidden_activation: Activation = Activation.TANH
    tau: float = 0.1
    n_steps: int = 50

    def __post_init__(self):
        if self.state_dim < 1:
            raise ConfigError(f"state_dim must be >= 1, got {self.state_dim}")
        if any(w < 1 for w in self.hidden_widths):
            raise ConfigError(f"hidden widths must be >= 1, got {self.hidden_widths}")
        if self.tau <= 0:
            raise ConfigError(f"tau must be positive, got {self.tau}")
        if self.n_steps < 1:
            raise ConfigError(f"n_steps must be >= 1, got {self.n_steps}")


@dataclass(frozen=True)
class TrainConfig:
    """Optimization settings; everything needed to reproduce a run."""

    learning_rate: float = 0.5
    epochs: int = 200
    batch_size: int = 100
    optimizer: str = "sgd_momentum"
    momentum: float = 0.9
    seed: int = 0
    init_scale: float = 0.5

    def __post_init__(self):
        if self.learning_rate < 0:
            raise ConfigError(f"learning_rate must be >= 0, got {self.learning_rate}")
        if self.epochs < 0:
            raise ConfigError(f"epochs must be >= 0, got {self.epochs}")
        if self.batch_size < 1:
            raise ConfigError(f"batch_size must be >= 1, got {self.batch_size}")
        if self.optimizer not in ("sgd", "sgd_momentum"):
            raise ConfigError(f"unknown optimizer {self.optimizer!r}")
        if not 0 <= self.momentum < 1:
            raise ConfigError(f"momentum must be in [0, 1), got {self.momentum}")
        if self.init_scale <= 0:
            raise ConfigError(f"init_scale must be positive, got {self.init_scale}")


@dataclass(frozen=True)
class GradientBundle:
    """Gradient arrays shape-congruent with the parameters they differentiate."""

    embed_w: np.ndarray
    embed_b: np.ndarray
    hidden: tuple[tuple[np.ndarray, np.ndarray], ...]
    readout_w: np.ndarray
    readout_b: np.ndarray

    def ravel(self) -> np.ndarray:
        """Flatten in the canonical parameter order (embed, hidden layers, readout)."""
        parts = [self.embed_w.ravel(), self.embed_b.ravel()]
        for w, b in self.hidden:
            parts.append(w.ravel())
            parts.append(b.ravel())
        parts.append(self.readout_w.ravel())
        parts.append(self.readout_b.ravel())
        return np.concatenate(parts)

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.ravel())))


def spec_parameters(spec: RnnOdeSpec) -> np.ndarray:
    """All trainable parameters as one flat vector (canonical order)."""
    parts = [spec.embed.weights.ravel(), spec.embed.bias.ravel()]
    for layer in spec.hidden.layers:
        parts.append(layer.weights.ravel())
        parts.append(layer.bias.ravel())
    parts.append(spec.readout.weights.ravel())
    parts.append(spec.readout.bias.ravel())
    return np.concatenate(parts)


def spec_with_parameters(spec: RnnOdeSpec, vec: np.ndarray) -> RnnOdeSpec:
    """Rebuild a spec with the same shapes and activations but new parameters."""
    vec = np.asarray(vec, dtype=float)
    pos = 0

    def take(shape):
        nonlocal pos
        size = int(np.prod(shape))
        out = vec[pos : pos + size].reshape(shape)
        pos += size
        return out

    def rebuild(layer: LayerParams) -> LayerParams:
        return LayerParams(
            weights=take(layer.weights.shape),
            bias=take(layer.bias.shape),
            activation=layer.activation,
        )

    embed = rebuild(spec.embed)
    hidden = MlpParams(tuple(rebuild(l) for l in spec.hidden.layers))
    readout = rebuild(spec.readout)
    if pos != vec.shape[0]:
        raise DimensionError(
            f"parameter vector has {vec.shape[0]} entries, spec needs {pos}"
        )
    return RnnOdeSpec(
        embed=embed,
        hidden=hidden,
        readout=readout,
        tau=spec.tau,
        horizon=spec.horizon,
        n_steps=spec.n_steps,
    )


# --- batched forward/backward kernels --------------------------------------

def _act_vjp(kind: Activation, out: np.ndarray, cot: np.ndarray) -> np.ndarray:
    """Pull a cotangent on the activation output back to the pre-activation.

    Elementwise kinds only need the activation output; softmax applies its
    full transposed Jacobian y * (v - (v . y)).
    """
    if kind is Activation.IDENTITY:
        return cot
    if kind is Activation.RELU:
        return cot * (out > 0)
    if kind is Activation.TANH:
        return cot * (1.0 - out * out)
    if kind is Activation.SIGMOID:
        return cot * out * (1.0 - out)
    dot = np.sum(cot * out, axis=-1, keepdims=True)
    return out * (cot - dot)


def _mlp_forward(mlp: MlpParams, x: np.ndarray):
    """Forward pass caching (input, output) per layer for the backward pass."""
    cache = []
    for layer in mlp.layers:
        out = _apply_activation(layer.activation, x @ layer.weights.T + layer.bias)
        cache.append((x, out))
        x = out
    return x, cache


def _mlp_backward(mlp: MlpParams, cache, cot: np.ndarray, grads):
    """Accumulate per-layer parameter gradients and return the input cotangent."""
    for idx in reversed(range(len(mlp.layers))):
        layer = mlp.layers[idx]
        x_in, out = cache[idx]
        dpre = _act_vjp(layer.activation, out, cot)
        gw, gb = grads[idx]
        gw += dpre.T @ x_in
        gb += dpre.sum(axis=0)
        cot = dpre @ layer.weights
    return cot


def _as_batch(dataset: Dataset, spec: RnnOdeSpec):
    if dataset.input_dim != spec.input_dim:
        raise DimensionError(
            f"dataset inputs have length {dataset.input_dim}, "
            f"model expects {spec.input_dim}"
        )
    if dataset.n_labels != spec.n_labels:
        raise DimensionError(
            f"dataset has {dataset.n_labels} labels, model outputs {spec.n_labels}"
        )
    return dataset.inputs, dataset.labels


def _unrolled_states(spec: RnnOdeSpec, x: np.ndarray, n_steps: int):
    """Hidden states a^0..a^n for a batch, plus the per-step MLP caches."""
    a = _apply_activation(
        spec.embed.activation, x @ spec.embed.weights.T + spec.embed.bias
    )
    states = [a]
    caches = []
    for _ in range(n_steps):
        a, cache = _mlp_forward(spec.hidden, a)
        states.append(a)
        caches.append(cache)
    return states, caches


def _softmax_rows(z: np.ndarray) -> np.ndarray:
    shifted = z - np.max(z, axis=-1, keepdims=True)
    w = np.exp(shifted)
    return w / np.sum(w, axis=-1, keepdims=True)


def cross_entropy_loss(
    spec: RnnOdeSpec, dataset: Dataset, n_steps: int | None = None
) -> float:
    """Total negative log likelihood over all data and all time steps 0..n.

    Output probabilities are clipped at 1e-12 before the log, so underflow
    in the softmax can never produce an infinite loss.
    """
    n = spec.n_steps if n_steps is None else n_steps
    x, labels = _as_batch(dataset, spec)
    if x.shape[0] == 0:
        return 0.0
    w_r, b_r = spec.readout.weights, spec.readout.bias
    a = _apply_activation(
        spec.embed.activation, x @ spec.embed.weights.T + spec.embed.bias
    )
    total = 0.0
    for k in range(n + 1):
        y = _softmax_rows(a @ w_r.T + b_r)
        p_true = np.sum(y * labels, axis=1)
        total -= float(np.sum(np.log(np.maximum(p_true, LOG_CLIP))))
        if k < n:
            for layer in spec.hidden.layers:
                a = _apply_activation(
                    layer.activation, a @ layer.weights.T + layer.bias
                )
    return total


def bptt_gradient(
    spec: RnnOdeSpec, batch: Dataset, n_steps: int | None = None
) -> GradientBundle:
    """Exact gradient of the batch loss by reverse accumulation through the
    unrolled recursion and the softmax readout at every step."""
    n = spec.n_steps if n_steps is None else n_steps
    x, labels = _as_batch(batch, spec)
    states, caches = _unrolled_states(spec, x, n)

    w_r = spec.readout.weights
    d_readout_w = np.zeros_like(w_r)
    d_readout_b = np.zeros_like(spec.readout.bias)
    hidden_grads = [
        (np.zeros_like(l.weights), np.zeros_like(l.bias)) for l in spec.hidden.layers
    ]

    # Readout contribution at every step: d loss_k / d z_k = y_k - label.
    # The log clip only binds when the true-label probability underflows,
    # where the clipped loss is locally flat; treat the gradient there as
    # the unclipped softmax gradient, which is what training wants anyway.
    readout_cots = []
    for a in states:
        y = _softmax_rows(a @ w_r.T + spec.readout.bias)
        g = y - labels
        d_readout_w += g.T @ a
        d_readout_b += g.sum(axis=0)
        readout_cots.append(g @ w_r)

    cot = readout_cots[n]
    for k in range(n - 1, -1, -1):
        cot = _mlp_backward(spec.hidden, caches[k], cot, hidden_grads)
        cot = cot + readout_cots[k]

    dpre = _act_vjp(spec.embed.activation, states[0], cot)
    d_embed_w = dpre.T @ x
    d_embed_b = dpre.sum(axis=0)

    bundle = GradientBundle(
        embed_w=d_embed_w,
        embed_b=d_embed_b,
        hidden=tuple((gw, gb) for gw, gb in hidden_grads),
        readout_w=d_readout_w,
        readout_b=d_readout_b,
    )
    if not np.all(np.isfinite(bundle.ravel())):
        raise DivergenceError("non-finite gradient")
    return bundle


def finite_diff_gradient(
    spec: RnnOdeSpec, batch: Dataset, n_steps: int | None = None, h: float = 1e-5
) -> GradientBundle:
    """Central-difference gradient, the oracle for the reverse-mode path.

    Perturbs every scalar parameter independently; quadratic cost in the
    parameter count, intended for small verification specs.
    """
    if not 1e-7 <= h <= 1e-3:
        raise ConfigError(f"finite-difference step must lie in [1e-7, 1e-3], got {h}")
    theta = spec_parameters(spec)
    flat = np.empty_like(theta)
    for i in range(theta.shape[0]):
        bump = np.zeros_like(theta)
        bump[i] = h
        up = cross_entropy_loss(spec_with_parameters(spec, theta + bump), batch, n_steps)
        down = cross_entropy_loss(spec_with_parameters(spec, theta - bump), batch, n_steps)
        flat[i] = (up - down) / (2.0 * h)
    return _bundle_from_flat(spec, flat)


def _bundle_from_flat(spec: RnnOdeSpec, vec: np.ndarray) -> GradientBundle:
    pos = 0

    def take(shape):
        nonlocal pos
        size = int(np.prod(shape))
        out = vec[pos : pos + size].reshape(shape)
        pos += size
        return out

    embed_w = take(spec.embed.weights.shape)
    embed_b = take(spec.embed.bias.shape)
    hidden = tuple(
        (take(l.weights.shape), take(l.bias.shape)) for l in spec.hidden.layers
    )
    return GradientBundle(
        embed_w=embed_w,
        embed_b=embed_b,
        hidden=hidden,
        readout_w=take(spec.readout.weights.shape),
        readout_b=take(spec.readout.bias.shape),
    )


# --- training loop ----------------------------------------------------------

class HistoryRow(NamedTuple):
    epoch: int
    loss: float
    train_error: float


class TrainResult(NamedTuple):
    spec: RnnOdeSpec
    history: list[HistoryRow]
    diverged: bool


class EvalResult(NamedTuple):
    misclassified: int
    accuracy: float
    confusion: np.ndarray


def init_spec(arch: ArchConfig, input_dim: int, n_labels: int, config: TrainConfig) -> RnnOdeSpec:
    """Seeded uniform initialization, scaled per layer by 1/sqrt(d_in)."""
    rng = np.random.default_rng(config.seed)

    def layer(d_out, d_in, activation):
        s = config.init_scale / np.sqrt(d_in)
        return LayerParams(
            weights=rng.uniform(-s, s, (d_out, d_in)),
            bias=rng.uniform(-s, s, d_out),
            activation=activation,
        )

    widths = (arch.state_dim, *arch.hidden_widths, arch.state_dim)
    embed = layer(arch.state_dim, input_dim, arch.embed_activation)
    hidden = MlpParams(
        tuple(
            layer(widths[i + 1], widths[i], arch.hidden_activation)
            for i in range(len(widths) - 1)
        )
    )
    readout = layer(n_labels, arch.state_dim, Activation.SOFTMAX)
    return RnnOdeSpec.from_tau(embed, hidden, readout, arch.tau, arch.n_steps)


def _terminal_outputs(spec: RnnOdeSpec, x: np.ndarray, n_steps: int) -> np.ndarray:
    a = _apply_activation(
        spec.embed.activation, x @ spec.embed.weights.T + spec.embed.bias
    )
    for _ in range(n_steps):
        for layer in spec.hidden.layers:
            a = _apply_activation(layer.activation, a @ layer.weights.T + layer.bias)
    return _softmax_rows(a @ spec.readout.weights.T + spec.readout.bias)


def evaluate(
    spec: RnnOdeSpec, dataset: Dataset, n_steps: int | None = None
) -> EvalResult:
    """Classify every datum by its terminal output and count disagreements."""
    n = spec.n_steps if n_steps is None else n_steps
    x, labels = _as_batch(dataset, spec)
    y = _terminal_outputs(spec, x, n)
    predicted = np.argmax(y, axis=1)
    true = np.argmax(labels, axis=1)
    n_labels = dataset.n_labels
    confusion = np.zeros((n_labels, n_labels), dtype=int)
    np.add.at(confusion, (true, predicted), 1)
    wrong = int(np.sum(predicted != true))
    total = dataset.n_points
    return EvalResult(
        misclassified=wrong,
        accuracy=1.0 - wrong / total if total else 0.0,
        confusion=confusion,
    )


def _scale_bundle(bundle: GradientBundle, c: float) -> GradientBundle:
    return GradientBundle(
        embed_w=c * bundle.embed_w,
        embed_b=c * bundle.embed_b,
        hidden=tuple((c * w, c * b) for w, b in bundle.hidden),
        readout_w=c * bundle.readout_w,
        readout_b=c * bundle.readout_b,
    )


def _add_bundles(a: GradientBundle, b: GradientBundle, cb: float) -> GradientBundle:
    return GradientBundle(
        embed_w=a.embed_w + cb * b.embed_w,
        embed_b=a.embed_b + cb * b.embed_b,
        hidden=tuple(
            (aw + cb * bw, ab + cb * bb)
            for (aw, ab), (bw, bb) in zip(a.hidden, b.hidden)
        ),
        readout_w=a.readout_w + cb * b.readout_w,
        readout_b=a.readout_b + cb * b.readout_b,
    )


def _apply_update(spec: RnnOdeSpec, step: GradientBundle) -> RnnOdeSpec:
    def layer(old: LayerParams, dw, db) -> LayerParams:
        return LayerParams(old.weights + dw, old.bias + db, old.activation)

    return RnnOdeSpec(
        embed=layer(spec.embed, step.embed_w, step.embed_b),
        hidden=MlpParams(
            tuple(
                layer(old, dw, db)
                for old, (dw, db) in zip(spec.hidden.layers, step.hidden)
            )
        ),
        readout=layer(spec.readout, step.readout_w, step.readout_b),
        tau=spec.tau,
        horizon=spec.horizon,
        n_steps=spec.n_steps,
    )


def train(config: TrainConfig, dataset: Dataset, arch: ArchConfig) -> TrainResult:
    """Minibatch gradient descent on the summed cross entropy.

    Deterministic given (config, dataset): initialization and batch order
    both come from the seeded generator.  The update uses the batch gradient
    averaged per datum and per time step, so the learning rate does not need
    retuning when the window or batch size changes.  On divergence the last
    finite-loss parameters are returned with ``diverged=True``.
    """
    if dataset.n_points == 0:
        raise ConfigError("cannot train on an empty dataset")
    if config.batch_size > dataset.n_points:
        raise ConfigError(
            f"batch_size {config.batch_size} exceeds dataset size {dataset.n_points}"
        )
    spec = init_spec(arch, dataset.input_dim, dataset.n_labels, config)
    rng = np.random.default_rng(config.seed + 1)

    def stats(epoch: int, current: RnnOdeSpec) -> HistoryRow:
        loss = cross_entropy_loss(current, dataset)
        err = evaluate(current, dataset).misclassified / dataset.n_points
        return HistoryRow(epoch=epoch, loss=loss, train_error=err)

    history = [stats(0, spec)]
    if not np.isfinite(history[0].loss):
        return TrainResult(spec, history, diverged=True)

    per_step = 1.0 / (arch.n_steps + 1)
    velocity: GradientBundle | None = None
    last_good = spec
    for epoch in range(1, config.epochs + 1):
        order = rng.permutation(dataset.n_points)
        for start in range(0, dataset.n_points, config.batch_size):
            idx = order[start : start + config.batch_size]
            batch = dataset.subset(idx)
            try:
                grad = bptt_gradient(spec, batch)
            except DivergenceError:
                return TrainResult(last_good, history, diverged=True)
            grad = _scale_bundle(grad, per_step / idx.shape[0])
            if config.optimizer == "sgd_momentum":
                velocity = (
                    grad
                    if velocity is None
                    else _add_bundles(_scale_bundle(velocity, config.momentum), grad, 1.0)
                )
                step = _scale_bundle(velocity, -config.learning_rate)
            else:
                step = _scale_bundle(grad, -config.learning_rate)
            spec = _apply_update(spec, step)
        row = stats(epoch, spec)
        history.append(row)
        if not np.isfinite(row.loss):
            return TrainResult(last_good, history, diverged=True)
        last_good = spec
    return TrainResult(spec, history, diverged=False)


def save_history_csv(history: list[HistoryRow], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("epoch,loss,train_error\n")
        for row in history:
            fh.write(f"{row.epoch},{row.loss:.17g},{row.train_error:.17g}\n")
