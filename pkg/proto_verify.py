"""Prototype: magnitudes for the equivalence checks before freezing tests."""
import time

import numpy as np

from simplexflow import (
    Activation, LayerParams, MlpParams, RnnOdeSpec, TimeGrid,
    integrate_cascade, integrate_augmented, hidden_flow, output_trace,
    verify_equivalence, integrate_constant_game,
)


def random_spec(seed, m, d, n, width=None, tau=0.5, n_steps=10, scale=1.0):
    rng = np.random.default_rng(seed)
    w = width or d + 2

    def layer(dout, din, act):
        s = scale / np.sqrt(din)
        return LayerParams(rng.uniform(-s, s, (dout, din)), rng.uniform(-s, s, dout), act)

    embed = layer(d, m, Activation.TANH)
    hidden = MlpParams((layer(w, d, Activation.TANH), layer(d, w, Activation.TANH)))
    readout = layer(n, d, Activation.SOFTMAX)
    return RnnOdeSpec.from_tau(embed, hidden, readout, tau, n_steps)


sizes = [(2, 3, 3), (2, 2, 2), (4, 5, 3)]
grid = TimeGrid.from_horizon(5.0, 1e-3)
t0 = time.time()
for i, (m, d, n) in enumerate(sizes):
    for tau in (0.1, 0.5, 1.0):
        spec = random_spec(100 + i, m, d, n, tau=tau, n_steps=max(1, round(5.0 / tau)))
        rng = np.random.default_rng(200 + i)
        x = rng.uniform(-1, 1, m)
        rep = verify_equivalence(spec, x, grid, "rk4")
        print(f"size=({m},{d},{n}) tau={tau}: sup={rep.sup_deviation:.3e} "
              f"mean={rep.mean_deviation:.3e} drift={rep.simplex_drift_max:.3e} "
              f"aug={rep.augmented_sup_deviation}")
print("elapsed", time.time() - t0)

# stronger weights, tau=0.1 (training-like)
for scale in (2.0, 4.0):
    spec = random_spec(7, 2, 3, 3, tau=0.1, n_steps=50, scale=scale)
    x = np.array([0.3, -0.8])
    rep = verify_equivalence(spec, x, grid, "rk4")
    print(f"scale={scale}: sup={rep.sup_deviation:.3e} aug={rep.augmented_sup_deviation}")

# RPS product conservation
A = np.array([[0., -1., 1.], [1., 0., -1.], [-1., 1., 0.]])
p0 = np.array([0.5, 0.25, 0.25])
t0 = time.time()
traj = integrate_constant_game(A, p0, TimeGrid.from_horizon(50.0, 1e-3), "rk4")
prod = traj.states.prod(axis=1)
print(f"RPS: product drift {np.abs(prod - prod[0]).max():.3e}, elapsed {time.time()-t0:.2f}s")

# dominant game
Adom = np.diag([1.0, 0.0, 0.0])
traj = integrate_constant_game(Adom, np.full(3, 1/3), TimeGrid.from_horizon(50.0, 1e-2), "rk4")
print("dominant final:", traj.final(), "dist to e1:", np.abs(traj.final() - np.array([1,0,0])).max())
