"""Fixed-step integration of the hidden flow and its softmax readout trace.

The discrete hidden recursion ``a -> hidden(a)`` is the Euler step, with
step size tau, of the flow ``da/dt = (hidden(a) - a) / tau``.  This module
integrates that flow (and arbitrary vector fields) with forward Euler or
classical Runge-Kutta 4 on a uniform grid.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Callable

import numpy as np

from .errors import ConfigError, DimensionError, DivergenceError, DomainError
from .network import RnnOdeSpec, TimeGrid, layer_apply, mlp_apply

# Untrained or badly scaled parameters can blow the state up; fail loudly
# instead of producing inf/nan trajectories.
DIVERGENCE_LIMIT = 1e8


class IntegratorKind(str, Enum):
    EULER = "euler"
    RK4 = "rk4"


VectorField = Callable[[float, np.ndarray], np.ndarray]


@dataclass(frozen=True)
class Trajectory:
    """States sampled on a uniform time grid; row k is the state at times[k]."""

    grid: TimeGrid
    states: np.ndarray

    def __post_init__(self):
        states = np.array(self.states, dtype=float)
        if states.ndim != 2:
            raise DimensionError(f"states must be 2-d, got ndim={states.ndim}")
        if states.shape[0] != len(self.grid):
            raise DimensionError(
                f"got {states.shape[0]} states for a grid of {len(self.grid)} times"
            )
        if not np.all(np.isfinite(states)):
            raise DomainError("trajectory contains non-finite states")
        states.setflags(write=False)
        object.__setattr__(self, "states", states)

    @property
    def state_dim(self) -> int:
        return self.states.shape[1]

    @property
    def times(self) -> np.ndarray:
        return self.grid.times

    def final(self) -> np.ndarray:
        return self.states[-1]

    def to_csv(self, path) -> None:
        """Write ``t,s_0,...,s_{d-1}`` rows at full double precision."""
        with open(path, "w", encoding="utf-8") as fh:
            header = ",".join(["t"] + [f"s_{i}" for i in range(self.state_dim)])
            fh.write(header + "\n")
            for t, row in zip(self.times, self.states):
                fh.write(",".join(f"{v:.17g}" for v in (t, *row)) + "\n")


def _euler_step(field: VectorField, t: float, s: np.ndarray, h: float) -> np.ndarray:
    return s + h * field(t, s)


def _rk4_step(field: VectorField, t: float, s: np.ndarray, h: float) -> np.ndarray:
    k1 = field(t, s)
    k2 = field(t + 0.5 * h, s + (0.5 * h) * k1)
    k3 = field(t + 0.5 * h, s + (0.5 * h) * k2)
    k4 = field(t + h, s + h * k3)
    return s + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


_STEPPERS = {IntegratorKind.EULER: _euler_step, IntegratorKind.RK4: _rk4_step}


def check_state(s: np.ndarray, t: float) -> None:
    """Raise DivergenceError naming the first bad time."""
    if not np.all(np.isfinite(s)):
        raise DivergenceError(f"non-finite state at t={t}", time=t)
    if np.max(np.abs(s)) > DIVERGENCE_LIMIT:
        raise DivergenceError(
            f"state magnitude exceeded {DIVERGENCE_LIMIT:g} at t={t}", time=t
        )


def integrate(
    field: VectorField,
    x0,
    grid: TimeGrid,
    method: IntegratorKind | str = IntegratorKind.RK4,
) -> Trajectory:
    """Integrate ``ds/dt = field(t, s)`` from ``x0`` over the grid."""
    stepper = _STEPPERS[IntegratorKind(method)]
    s = np.array(x0, dtype=float)
    if s.ndim != 1:
        raise DimensionError("initial state must be a vector")
    times = grid.times
    check_state(s, 0.0)
    states = np.empty((len(grid), s.shape[0]))
    states[0] = s
    h = grid.step
    for k in range(grid.n_steps):
        s = stepper(field, times[k], s, h)
        check_state(s, times[k + 1])
        states[k + 1] = s
    return Trajectory(grid=grid, states=states)


def hidden_field(spec: RnnOdeSpec, a) -> np.ndarray:
    """Vector field ``(hidden(a) - a) / tau`` whose Euler step with h = tau
    reproduces the discrete recursion exactly."""
    arr = np.asarray(a, dtype=float)
    if arr.shape[-1] != spec.state_dim:
        raise DimensionError(
            f"hidden state must have length {spec.state_dim}, got {arr.shape[-1]}"
        )
    return (mlp_apply(spec.hidden, arr) - arr) / spec.tau


def hidden_flow(
    spec: RnnOdeSpec,
    x,
    grid: TimeGrid,
    method: IntegratorKind | str = IntegratorKind.RK4,
) -> Trajectory:
    """Integrate the hidden flow from the embedded input."""
    a0 = layer_apply(spec.embed, np.asarray(x, dtype=float))
    return integrate(lambda _t, a: hidden_field(spec, a), a0, grid, method)


def output_trace(spec: RnnOdeSpec, hidden_traj: Trajectory) -> Trajectory:
    """Softmax readout applied pointwise in time to a hidden trajectory."""
    if hidden_traj.state_dim != spec.hidden.d_out:
        raise DimensionError(
            f"hidden trajectory has dim {hidden_traj.state_dim}, "
            f"readout expects {spec.hidden.d_out}"
        )
    return Trajectory(
        grid=hidden_traj.grid,
        states=layer_apply(spec.readout, hidden_traj.states),
    )
