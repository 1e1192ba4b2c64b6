"""Shared builders for test specs and datasets."""

import numpy as np

from simplexflow import Activation, LayerParams, MlpParams, RnnOdeSpec
from simplexflow.datasets import Dataset


def random_spec(
    seed: int,
    input_dim: int,
    state_dim: int,
    n_labels: int,
    widths: tuple[int, ...] = (4,),
    tau: float = 0.5,
    n_steps: int = 10,
    scale: float = 1.0,
    activations=None,
) -> RnnOdeSpec:
    """Seeded spec with tanh layers and weights scaled by 1/sqrt(d_in)."""
    rng = np.random.default_rng(seed)
    dims = (state_dim, *widths, state_dim)
    acts = activations or [Activation.TANH] * (len(dims) - 1)

    def layer(d_out, d_in, act):
        s = scale / np.sqrt(d_in)
        return LayerParams(
            weights=rng.uniform(-s, s, (d_out, d_in)),
            bias=rng.uniform(-s, s, d_out),
            activation=act,
        )

    embed = layer(state_dim, input_dim, Activation.TANH)
    hidden = MlpParams(
        tuple(layer(dims[i + 1], dims[i], acts[i]) for i in range(len(dims) - 1))
    )
    readout = layer(n_labels, state_dim, Activation.SOFTMAX)
    return RnnOdeSpec.from_tau(embed, hidden, readout, tau, n_steps)


def identity_layer(dim: int) -> LayerParams:
    return LayerParams(np.eye(dim), np.zeros(dim), Activation.IDENTITY)


def scalar_hidden_spec(
    factor: float, tau: float = 1.0, n_steps: int = 10, readout_w=None
) -> RnnOdeSpec:
    """1-d hidden map a -> factor*a with identity activations throughout."""
    w = [[1.0]] if readout_w is None else readout_w
    return RnnOdeSpec.from_tau(
        embed=identity_layer(1),
        hidden=MlpParams((LayerParams([[factor]], [0.0], Activation.IDENTITY),)),
        readout=LayerParams(np.asarray(w, dtype=float), np.zeros(len(w)), Activation.SOFTMAX),
        tau=tau,
        n_steps=n_steps,
    )


def identity_hidden_spec(
    input_dim: int = 2, state_dim: int = 3, n_labels: int = 3, seed: int = 5
) -> RnnOdeSpec:
    """Random embed/readout around a frozen (identity) hidden map."""
    rng = np.random.default_rng(seed)
    return RnnOdeSpec.from_tau(
        embed=LayerParams(
            rng.uniform(-1, 1, (state_dim, input_dim)),
            rng.uniform(-1, 1, state_dim),
            Activation.TANH,
        ),
        hidden=MlpParams((identity_layer(state_dim),)),
        readout=LayerParams(
            rng.uniform(-1, 1, (n_labels, state_dim)),
            rng.uniform(-1, 1, n_labels),
            Activation.SOFTMAX,
        ),
        tau=0.5,
        n_steps=10,
    )


def random_batch(seed: int, n: int, input_dim: int, n_labels: int) -> Dataset:
    rng = np.random.default_rng(seed)
    inputs = rng.uniform(-1, 1, (n, input_dim))
    labels = np.zeros((n, n_labels))
    labels[np.arange(n), rng.integers(0, n_labels, n)] = 1.0
    return Dataset(inputs=inputs, labels=labels, name=f"batch{seed}", seed=seed)
