"""Replicator dynamics on the probability simplex, in the three couplings
used by the recurrent classifier.

The softmax readout trace of the hidden flow is itself the solution of a
replicator system: writing z = W a + b for the readout pre-activations and
y = softmax(z), the chain rule gives

    dy_i/dt = y_i (dz_i/dt - sum_j y_j dz_j/dt),

which is the replicator equation with payoff vector f = dz/dt = W da/dt.
This module provides the plain constant-payoff game, the cascade form where
the payoff is driven by the hidden state, and the augmented form where a
square invertible readout lets the payoff be written in terms of (y, C)
alone, C being the log-partition of the pre-activations.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy.linalg import lu_factor, lu_solve
from scipy.linalg.lapack import dgecon
from scipy.special import logsumexp

from .errors import (
    DimensionError,
    DomainError,
    InteriorViolationError,
    NotInvertibleError,
)
from .network import RnnOdeSpec, TimeGrid, layer_apply
from .odeflow import (
    IntegratorKind,
    Trajectory,
    _STEPPERS,
    check_state,
    hidden_field,
    hidden_flow,
    output_trace,
)

# Reject readout matrices whose reciprocal condition number (LU estimate)
# falls below this when inverting the output layer.
MIN_RECIPROCAL_CONDITION = 1e-10

# Components below this cannot be passed through log; the augmented form
# only holds on the interior of the simplex.
INTERIOR_FLOOR = 1e-300


def validate_simplex(p, atol: float = 1e-9) -> np.ndarray:
    """Check nonnegativity and unit sum; returns the validated array."""
    arr = np.asarray(p, dtype=float)
    if arr.ndim != 1:
        raise DimensionError("simplex point must be a vector")
    if not np.all(np.isfinite(arr)):
        raise DomainError("simplex point must be finite")
    if np.any(arr < 0):
        raise DomainError(f"negative component in simplex point: min={arr.min()}")
    if abs(arr.sum() - 1.0) > atol:
        raise DomainError(f"simplex point sums to {arr.sum()}, not 1")
    return arr


def replicator_rhs(p, f) -> np.ndarray:
    """Replicator vector field diag(p) (f - (f . p) 1).

    Vertices are exact rest points and the components always sum to zero up
    to rounding, so the simplex is forward invariant.
    """
    p_arr = np.asarray(p, dtype=float)
    f_arr = np.asarray(f, dtype=float)
    if p_arr.shape != f_arr.shape:
        raise DimensionError(
            f"state and payoff lengths differ: {p_arr.shape} vs {f_arr.shape}"
        )
    return p_arr * (f_arr - np.dot(f_arr, p_arr))


def classify(y) -> int:
    """1-based index of the largest probability; ties go to the lowest index."""
    arr = validate_simplex(y)
    return int(np.argmax(arr)) + 1


def dynamic_payoff(spec: RnnOdeSpec, a) -> np.ndarray:
    """Payoff vector W_y (hidden(a) - a)/tau driven by the hidden state."""
    return spec.readout.weights @ hidden_field(spec, a)


class CascadeState(NamedTuple):
    """Joint state of the hidden flow and its readout distribution."""

    hidden: np.ndarray
    output: np.ndarray


class AugmentedState(NamedTuple):
    """Readout distribution plus the log-partition of its pre-activations."""

    output: np.ndarray
    log_partition: float


class SimplexDrift(NamedTuple):
    """Worst-case simplex violations observed before per-step renormalization."""

    max_sum_error: float
    min_component: float


def cascade_rhs(spec: RnnOdeSpec, state: CascadeState):
    """Time derivative (da, dy) of the hidden state and its readout."""
    a, y = state
    da = hidden_field(spec, a)
    f = spec.readout.weights @ da
    return da, replicator_rhs(y, f)


def _require_invertible_readout(spec: RnnOdeSpec):
    """LU-factor the readout matrix, rejecting non-square or ill-conditioned ones."""
    w = spec.readout.weights
    if w.shape[0] != w.shape[1]:
        raise NotInvertibleError(
            f"readout matrix is {w.shape[0]}x{w.shape[1]}, not square"
        )
    try:
        lu, piv = lu_factor(w)
    except np.linalg.LinAlgError as exc:
        raise NotInvertibleError(f"readout matrix is singular: {exc}") from exc
    rcond, info = dgecon(lu, np.linalg.norm(w, 1), norm="1")
    if info != 0 or not np.isfinite(rcond) or rcond < MIN_RECIPROCAL_CONDITION:
        raise NotInvertibleError(
            f"readout matrix too ill-conditioned to invert: rcond={rcond:.3e}"
        )
    return lu, piv


def reconstruct_hidden(spec: RnnOdeSpec, state: AugmentedState, lu_piv=None) -> np.ndarray:
    """Invert the readout: a = W^{-1} (ln y + C 1 - b).

    Only valid for strictly interior y; a zero component has no finite
    pre-activation.
    """
    y, c = state
    y_arr = np.asarray(y, dtype=float)
    if y_arr.shape[-1] != spec.n_labels:
        raise DimensionError(
            f"output must have length {spec.n_labels}, got {y_arr.shape[-1]}"
        )
    if np.any(y_arr < INTERIOR_FLOOR):
        raise InteriorViolationError(
            f"output component {y_arr.min():.3e} too close to the simplex boundary"
        )
    if lu_piv is None:
        lu_piv = _require_invertible_readout(spec)
    z = np.log(y_arr) + c - spec.readout.bias
    return lu_solve(lu_piv, z)


def augmented_rhs(spec: RnnOdeSpec, state: AugmentedState, lu_piv=None):
    """Time derivative (dy, dC) of the augmented readout-only system.

    The hidden state is reconstructed through the inverse readout, the
    payoff evaluated there, and the log-partition moved along dC = y . f so
    the pair (y, C) is a self-contained autonomous system.
    """
    if lu_piv is None:
        lu_piv = _require_invertible_readout(spec)
    a = reconstruct_hidden(spec, state, lu_piv)
    f = spec.readout.weights @ hidden_field(spec, a)
    y = np.asarray(state.output, dtype=float)
    return replicator_rhs(y, f), float(np.dot(y, f))


def _integrate_projected(field, s0: np.ndarray, grid: TimeGrid, method, y_slice):
    """Fixed-step integration that clamps and renormalizes the simplex block
    after every step, recording the violations seen before projection."""
    stepper = _STEPPERS[IntegratorKind(method)]
    s = np.array(s0, dtype=float)
    times = grid.times
    check_state(s, 0.0)
    states = np.empty((len(grid), s.shape[0]))
    states[0] = s
    h = grid.step
    max_sum_error = 0.0
    min_component = np.inf
    for k in range(grid.n_steps):
        s = stepper(field, times[k], s, h)
        check_state(s, times[k + 1])
        y = s[y_slice]
        max_sum_error = max(max_sum_error, abs(y.sum() - 1.0))
        min_component = min(min_component, y.min())
        y = np.maximum(y, 0.0)
        s[y_slice] = y / y.sum()
        states[k + 1] = s
    return states, SimplexDrift(max_sum_error, float(min_component))


class CascadeResult(NamedTuple):
    hidden: Trajectory
    output: Trajectory
    drift: SimplexDrift


def integrate_cascade(
    spec: RnnOdeSpec,
    x,
    grid: TimeGrid,
    method: IntegratorKind | str = IntegratorKind.RK4,
) -> CascadeResult:
    """Jointly integrate the hidden flow and the replicator readout.

    Starts from a(0) = embed(x) and y(0) = softmax(W a(0) + b), so y(0)
    matches the readout trace of the hidden flow exactly.
    """
    a0 = layer_apply(spec.embed, np.asarray(x, dtype=float))
    y0 = layer_apply(spec.readout, a0)
    d = a0.shape[0]
    w = spec.readout.weights

    def field(_t, s):
        a = s[:d]
        y = s[d:]
        da = hidden_field(spec, a)
        dy = replicator_rhs(y, w @ da)
        return np.concatenate([da, dy])

    states, drift = _integrate_projected(
        field, np.concatenate([a0, y0]), grid, method, np.s_[d:]
    )
    return CascadeResult(
        hidden=Trajectory(grid=grid, states=states[:, :d]),
        output=Trajectory(grid=grid, states=states[:, d:]),
        drift=drift,
    )


class AugmentedResult(NamedTuple):
    output: Trajectory
    log_partition: np.ndarray
    drift: SimplexDrift


def integrate_augmented(
    spec: RnnOdeSpec,
    x,
    grid: TimeGrid,
    method: IntegratorKind | str = IntegratorKind.RK4,
) -> AugmentedResult:
    """Integrate the readout-only (y, C) system through the inverse readout.

    Requires a square, well-conditioned readout matrix.  C(0) is the
    log-partition of the initial pre-activations, evaluated with the usual
    max shift.
    """
    lu_piv = _require_invertible_readout(spec)
    a0 = layer_apply(spec.embed, np.asarray(x, dtype=float))
    z0 = spec.readout.weights @ a0 + spec.readout.bias
    y0 = layer_apply(spec.readout, a0)
    c0 = float(logsumexp(z0))
    n = y0.shape[0]

    def field(_t, s):
        dy, dc = augmented_rhs(spec, AugmentedState(s[:n], s[n]), lu_piv)
        return np.concatenate([dy, [dc]])

    states, drift = _integrate_projected(
        field, np.concatenate([y0, [c0]]), grid, method, np.s_[:n]
    )
    return AugmentedResult(
        output=Trajectory(grid=grid, states=states[:, :n]),
        log_partition=states[:, n],
        drift=drift,
    )


def integrate_constant_game(
    payoff_matrix,
    p0,
    grid: TimeGrid,
    method: IntegratorKind | str = IntegratorKind.RK4,
) -> Trajectory:
    """Replicator dynamics for the matrix game with payoffs f(p) = A p."""
    a = np.asarray(payoff_matrix, dtype=float)
    p = validate_simplex(p0)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError(f"payoff matrix must be square, got shape {a.shape}")
    if a.shape[0] != p.shape[0]:
        raise DimensionError(
            f"payoff matrix is {a.shape[0]}x{a.shape[0]} but p0 has length {p.shape[0]}"
        )

    def field(_t, s):
        return replicator_rhs(s, a @ s)

    states, _ = _integrate_projected(field, p, grid, method, np.s_[:])
    return Trajectory(grid=grid, states=states)


# --- equivalence verification --------------------------------------------

@dataclass(frozen=True)
class VerificationReport:
    """Deviation between the replicator integration and the readout trace.

    ``per_time_deviation[k]`` is the sup-norm distance at grid time k between
    the cascade-integrated distribution and the softmax readout of the hidden
    flow.  When the readout is square and well conditioned the augmented
    integration is compared against the cascade as well.
    """

    grid: TimeGrid
    method: str
    sup_deviation: float
    mean_deviation: float
    simplex_drift_max: float
    per_time_deviation: np.ndarray = field(repr=False)
    invertible_readout: bool = False
    augmented_sup_deviation: float | None = None

    def passed(self, tolerance: float) -> bool:
        return self.sup_deviation <= tolerance

    def to_json_dict(self, per_time_csv_path: str | None = None) -> dict:
        return {
            "grid": {
                "step": self.grid.step,
                "n_steps": self.grid.n_steps,
                "t_end": self.grid.t_end,
            },
            "method": self.method,
            "sup_deviation": self.sup_deviation,
            "mean_deviation": self.mean_deviation,
            "simplex_drift_max": self.simplex_drift_max,
            "per_time_deviation_csv_path": per_time_csv_path,
            "invertible_readout": self.invertible_readout,
            "augmented_sup_deviation": self.augmented_sup_deviation,
        }

    def save_deviation_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("t,deviation\n")
            for t, d in zip(self.grid.times, self.per_time_deviation):
                fh.write(f"{t:.17g},{d:.17g}\n")


def verify_equivalence(
    spec: RnnOdeSpec,
    x,
    grid: TimeGrid,
    method: IntegratorKind | str = IntegratorKind.RK4,
    check_augmented: bool = True,
) -> VerificationReport:
    """Compare the cascade-integrated readout against softmax along the
    hidden flow, the two routes that must coincide for this model family."""
    method = IntegratorKind(method)
    cascade = integrate_cascade(spec, x, grid, method)
    reference = output_trace(spec, hidden_flow(spec, x, grid, method))
    deviation = np.max(
        np.abs(cascade.output.states - reference.states), axis=1
    )

    augmented_sup = None
    invertible = False
    if check_augmented:
        try:
            _require_invertible_readout(spec)
            invertible = True
        except NotInvertibleError:
            invertible = False
        if invertible:
            augmented = integrate_augmented(spec, x, grid, method)
            augmented_sup = float(
                np.max(np.abs(augmented.output.states - cascade.output.states))
            )

    return VerificationReport(
        grid=grid,
        method=method.value,
        sup_deviation=float(deviation.max()),
        mean_deviation=float(deviation.mean()),
        simplex_drift_max=cascade.drift.max_sum_error,
        per_time_deviation=deviation,
        invertible_readout=invertible,
        augmented_sup_deviation=augmented_sup,
    )
