"""Feedforward layers, activations, and the discrete recurrent classifier.

The model family is a one-to-many recurrent classifier: an input vector is
embedded once into a hidden state, a square multilayer map advances the
hidden state step by step, and at every step an affine softmax readout turns
the hidden state into a probability vector over the labels.

All operations are pure functions of immutable parameter objects; arrays are
copied on construction and marked read-only, so values can be shared freely
across threads.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.special import expit

from .errors import ConfigError, DimensionError, DomainError, FormatError

MODEL_FORMAT_VERSION = 1


class Activation(str, Enum):
    """Supported activation functions.

    The elementwise kinds (identity, relu, tanh, sigmoid) are globally
    Lipschitz with constant 1.  Softmax acts on the whole vector, is
    Lipschitz on bounded sets, and maps onto the open probability simplex.
    """

    IDENTITY = "identity"
    RELU = "relu"
    TANH = "tanh"
    SIGMOID = "sigmoid"
    SOFTMAX = "softmax"


def _softmax(z: np.ndarray) -> np.ndarray:
    # Max subtraction keeps the exponentials bounded; the result is
    # unchanged because softmax is invariant to shifts along the ones
    # direction.
    shifted = z - np.max(z, axis=-1, keepdims=True)
    w = np.exp(shifted)
    return w / np.sum(w, axis=-1, keepdims=True)


def _apply_activation(kind: Activation, v: np.ndarray) -> np.ndarray:
    """Unchecked activation kernel, operating along the last axis."""
    if kind is Activation.IDENTITY:
        return v
    if kind is Activation.RELU:
        return np.maximum(v, 0.0)
    if kind is Activation.TANH:
        return np.tanh(v)
    if kind is Activation.SIGMOID:
        return expit(v)
    return _softmax(v)


def activation_apply(kind: Activation | str, v) -> np.ndarray:
    """Apply an activation function to a vector.

    Elementwise kinds act componentwise; softmax normalizes the whole
    vector into a probability distribution.  Raises ``DomainError`` on
    non-finite input.
    """
    kind = Activation(kind)
    arr = np.asarray(v, dtype=float)
    if arr.shape[-1] < 1:
        raise DimensionError("activation input must have length >= 1")
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"non-finite input to {kind.value}")
    return _apply_activation(kind, arr)


def _freeze(name: str, obj, value: np.ndarray) -> np.ndarray:
    value.setflags(write=False)
    object.__setattr__(obj, name, value)
    return value


@dataclass(frozen=True)
class LayerParams:
    """One affine layer with activation: ``x -> act(W x + b)``.

    ``weights`` has shape (d_out, d_in) and ``bias`` shape (d_out,).
    """

    weights: np.ndarray
    bias: np.ndarray
    activation: Activation

    def __post_init__(self):
        w = np.array(self.weights, dtype=float)
        b = np.array(self.bias, dtype=float)
        if w.ndim != 2:
            raise DimensionError(f"weights must be a matrix, got ndim={w.ndim}")
        if b.ndim != 1:
            raise DimensionError(f"bias must be a vector, got ndim={b.ndim}")
        if w.shape[0] != b.shape[0]:
            raise DimensionError(
                f"weights rows ({w.shape[0]}) must equal bias length ({b.shape[0]})"
            )
        if not (np.all(np.isfinite(w)) and np.all(np.isfinite(b))):
            raise DomainError("layer parameters must be finite")
        _freeze("weights", self, w)
        _freeze("bias", self, b)
        object.__setattr__(self, "activation", Activation(self.activation))

    @property
    def d_in(self) -> int:
        return self.weights.shape[1]

    @property
    def d_out(self) -> int:
        return self.weights.shape[0]


def layer_apply(layer: LayerParams, x) -> np.ndarray:
    """Evaluate one layer on a vector (or a batch stacked on leading axes)."""
    arr = np.asarray(x, dtype=float)
    if arr.shape[-1] != layer.d_in:
        raise DimensionError(
            f"layer expects input of length {layer.d_in}, got {arr.shape[-1]}"
        )
    return _apply_activation(layer.activation, arr @ layer.weights.T + layer.bias)


@dataclass(frozen=True)
class MlpParams:
    """A feedforward composition of layers with matching inner dimensions.

    The overall map is square (input dimension equals output dimension),
    which is what makes the iterated map interpretable as one Euler step of
    a flow on the hidden space.
    """

    layers: tuple[LayerParams, ...]

    def __post_init__(self):
        layers = tuple(self.layers)
        if len(layers) < 1:
            raise DimensionError("an MLP needs at least one layer")
        for k, (prev, nxt) in enumerate(zip(layers, layers[1:])):
            if prev.d_out != nxt.d_in:
                raise DimensionError(
                    f"layer {k} outputs {prev.d_out} but layer {k + 1} expects {nxt.d_in}"
                )
        if layers[0].d_in != layers[-1].d_out:
            raise DimensionError(
                f"hidden map must be square, got {layers[0].d_in} -> {layers[-1].d_out}"
            )
        object.__setattr__(self, "layers", layers)

    @property
    def d_in(self) -> int:
        return self.layers[0].d_in

    @property
    def d_out(self) -> int:
        return self.layers[-1].d_out


def mlp_apply(mlp: MlpParams, x) -> np.ndarray:
    """Evaluate the layer composition on a vector (or a stacked batch)."""
    out = np.asarray(x, dtype=float)
    for layer in mlp.layers:
        out = layer_apply(layer, out)
    return out


@dataclass(frozen=True)
class TimeGrid:
    """Uniform grid 0, h, 2h, ..., n*h used by the fixed-step integrators."""

    step: float
    n_steps: int

    def __post_init__(self):
        if not (np.isfinite(self.step) and self.step > 0):
            raise ConfigError(f"grid step must be positive, got {self.step}")
        if self.n_steps < 1:
            raise ConfigError(f"grid needs at least one step, got {self.n_steps}")

    @classmethod
    def from_horizon(cls, t_end: float, step: float) -> "TimeGrid":
        """Grid with the given step whose last time is t_end within one step."""
        if not (np.isfinite(step) and step > 0):
            raise ConfigError(f"grid step must be positive, got {step}")
        n = max(1, int(round(t_end / step)))
        return cls(step=step, n_steps=n)

    @property
    def t_end(self) -> float:
        return self.step * self.n_steps

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.n_steps + 1) * self.step

    def __len__(self) -> int:
        return self.n_steps + 1


@dataclass(frozen=True)
class RnnOdeSpec:
    """All trained parameters of the recurrent classifier plus its time scale.

    ``embed`` maps the raw input into the hidden space, ``hidden`` is the
    square map iterated over the discrete window, and ``readout`` is the
    affine softmax layer producing label probabilities.  ``tau`` is the step
    size linking the discrete recursion to the continuous-time flow, with
    ``horizon = tau * n_steps``.
    """

    embed: LayerParams
    hidden: MlpParams
    readout: LayerParams
    tau: float
    horizon: float
    n_steps: int

    def __post_init__(self):
        if not (np.isfinite(self.tau) and self.tau > 0):
            raise ConfigError(f"tau must be positive, got {self.tau}")
        if self.n_steps < 1:
            raise ConfigError(f"n_steps must be >= 1, got {self.n_steps}")
        if not (np.isfinite(self.horizon) and self.horizon > 0):
            raise ConfigError(f"horizon must be positive, got {self.horizon}")
        if abs(self.tau * self.n_steps - self.horizon) > 1e-9 * max(1.0, self.horizon):
            raise ConfigError(
                f"inconsistent time scale: tau*n_steps = {self.tau * self.n_steps} "
                f"but horizon = {self.horizon}"
            )
        if self.embed.d_out != self.hidden.d_in:
            raise DimensionError(
                f"embedding outputs {self.embed.d_out} but hidden map expects {self.hidden.d_in}"
            )
        if self.hidden.d_out != self.readout.d_in:
            raise DimensionError(
                f"hidden map outputs {self.hidden.d_out} but readout expects {self.readout.d_in}"
            )
        if self.readout.activation is not Activation.SOFTMAX:
            raise ConfigError("readout activation must be softmax")

    @classmethod
    def from_tau(cls, embed, hidden, readout, tau: float, n_steps: int) -> "RnnOdeSpec":
        """Construct with the horizon computed as tau * n_steps."""
        return cls(embed, hidden, readout, tau=tau, horizon=tau * n_steps, n_steps=n_steps)

    @property
    def input_dim(self) -> int:
        return self.embed.d_in

    @property
    def state_dim(self) -> int:
        return self.hidden.d_in

    @property
    def n_labels(self) -> int:
        return self.readout.d_out

    def time_grid(self) -> TimeGrid:
        """The discrete window as a uniform grid with step tau."""
        return TimeGrid(step=self.tau, n_steps=self.n_steps)


def rnn_unroll_discrete(spec: RnnOdeSpec, x, n_steps: int | None = None):
    """Run the discrete recursion for ``n_steps`` updates.

    Returns ``(hidden_seq, output_seq)`` of shapes (n_steps+1, state_dim)
    and (n_steps+1, n_labels): the initial embedded state plus one entry
    per update, with the softmax readout evaluated at every step.
    """
    n = spec.n_steps if n_steps is None else n_steps
    if n < 0:
        raise ConfigError(f"step count must be >= 0, got {n}")
    a = layer_apply(spec.embed, x)
    hidden = np.empty((n + 1,) + a.shape)
    hidden[0] = a
    for t in range(n):
        a = mlp_apply(spec.hidden, a)
        hidden[t + 1] = a
    outputs = layer_apply(spec.readout, hidden)
    return hidden, outputs


# --- model serialization -------------------------------------------------

def _layer_to_dict(layer: LayerParams) -> dict:
    return {
        "weights": layer.weights.tolist(),
        "bias": layer.bias.tolist(),
        "activation": layer.activation.value,
    }


def _layer_from_dict(obj: dict, where: str) -> LayerParams:
    try:
        return LayerParams(
            weights=np.array(obj["weights"], dtype=float),
            bias=np.array(obj["bias"], dtype=float),
            activation=Activation(obj["activation"]),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"bad layer in model file ({where}): {exc}") from exc


def spec_to_dict(spec: RnnOdeSpec) -> dict:
    """JSON-ready document holding every matrix row-major plus the time scale."""
    return {
        "format_version": MODEL_FORMAT_VERSION,
        "embed": _layer_to_dict(spec.embed),
        "hidden": {"layers": [_layer_to_dict(l) for l in spec.hidden.layers]},
        "readout": _layer_to_dict(spec.readout),
        "tau": spec.tau,
        "horizon": spec.horizon,
        "n_steps": spec.n_steps,
    }


def spec_from_dict(obj: dict) -> RnnOdeSpec:
    if not isinstance(obj, dict):
        raise FormatError("model document must be a JSON object")
    version = obj.get("format_version")
    if version != MODEL_FORMAT_VERSION:
        raise FormatError(f"unsupported model format_version: {version!r}")
    try:
        hidden_layers = obj["hidden"]["layers"]
        spec = RnnOdeSpec(
            embed=_layer_from_dict(obj["embed"], "embed"),
            hidden=MlpParams(
                tuple(
                    _layer_from_dict(l, f"hidden[{i}]")
                    for i, l in enumerate(hidden_layers)
                )
            ),
            readout=_layer_from_dict(obj["readout"], "readout"),
            tau=float(obj["tau"]),
            horizon=float(obj["horizon"]),
            n_steps=int(obj["n_steps"]),
        )
    except FormatError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"bad model document: {exc}") from exc
    return spec


def save_model(spec: RnnOdeSpec, path) -> None:
    """Write the model as a single JSON document (floats round-trip exactly)."""
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(spec_to_dict(spec), fh, indent=1, sort_keys=True)
        fh.write("\n")


def load_model(path) -> RnnOdeSpec:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            obj = json.load(fh)
    except json.JSONDecodeError as exc:
        raise FormatError(f"model file is not valid JSON: {exc}") from exc
    return spec_from_dict(obj)
