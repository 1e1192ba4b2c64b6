"""Recurrent neural ODE classifier with a replicator-dynamics readout.

The hidden state of a one-to-many recurrent classifier follows a flow whose
Euler step is the discrete recursion; the softmax readout of that flow is
itself the solution of replicator dynamics driven by the hidden state.
This package implements the classifier (embedding, hidden flow, softmax
readout, cross-entropy training) and the machinery to certify the
replicator equivalence numerically.
"""

from .datasets import Dataset, gen_blobs, gen_two_class, load_csv, load_idx, one_hot, save_csv
from .errors import (
    ConfigError,
    DimensionError,
    DivergenceError,
    DomainError,
    FormatError,
    InteriorViolationError,
    NotInvertibleError,
)
from .network import (
    Activation,
    LayerParams,
    MlpParams,
    RnnOdeSpec,
    TimeGrid,
    activation_apply,
    layer_apply,
    load_model,
    mlp_apply,
    rnn_unroll_discrete,
    save_model,
)
from .odeflow import (
    IntegratorKind,
    Trajectory,
    hidden_field,
    hidden_flow,
    integrate,
    output_trace,
)
from .replicator import (
    AugmentedState,
    CascadeState,
    VerificationReport,
    augmented_rhs,
    cascade_rhs,
    classify,
    dynamic_payoff,
    integrate_augmented,
    integrate_cascade,
    integrate_constant_game,
    replicator_rhs,
    verify_equivalence,
)
from .training import (
    ArchConfig,
    GradientBundle,
    TrainConfig,
    bptt_gradient,
    cross_entropy_loss,
    evaluate,
    finite_diff_gradient,
    train,
)

__version__ = "0.1.0"

__all__ = [
    "Activation",
    "ArchConfig",
    "AugmentedState",
    "CascadeState",
    "ConfigError",
    "Dataset",
    "DimensionError",
    "DivergenceError",
    "DomainError",
    "FormatError",
    "GradientBundle",
    "IntegratorKind",
    "InteriorViolationError",
    "LayerParams",
    "MlpParams",
    "NotInvertibleError",
    "RnnOdeSpec",
    "TimeGrid",
    "Trajectory",
    "VerificationReport",
    "activation_apply",
    "augmented_rhs",
    "bptt_gradient",
    "cascade_rhs",
    "classify",
    "cross_entropy_loss",
    "dynamic_payoff",
    "evaluate",
    "finite_diff_gradient",
    "gen_blobs",
    "gen_two_class",
    "hidden_field",
    "hidden_flow",
    "integrate",
    "integrate_augmented",
    "integrate_cascade",
    "integrate_constant_game",
    "layer_apply",
    "load_csv",
    "load_idx",
    "load_model",
    "mlp_apply",
    "one_hot",
    "output_trace",
    "replicator_rhs",
    "rnn_unroll_discrete",
    "save_csv",
    "save_model",
    "train",
    "verify_equivalence",
]
