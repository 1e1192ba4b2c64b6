"""Prototype: gradient fidelity and training feasibility."""
import time

import numpy as np

from simplexflow import (
    Activation, Dataset, LayerParams, MlpParams, RnnOdeSpec,
    bptt_gradient, cross_entropy_loss, finite_diff_gradient,
    gen_blobs, gen_two_class, evaluate, train,
)
from simplexflow.datasets import default_centers
from simplexflow.training import ArchConfig, TrainConfig


def random_spec(seed, m, d, n, widths=(4,), tau=0.1, n_steps=8, scale=0.8,
                acts=None):
    rng = np.random.default_rng(seed)
    acts = acts or [Activation.TANH] * (len(widths) + 1)

    def layer(dout, din, act):
        s = scale / np.sqrt(din)
        return LayerParams(rng.uniform(-s, s, (dout, din)), rng.uniform(-s, s, dout), act)

    dims = (d, *widths, d)
    embed = layer(d, m, Activation.TANH)
    hidden = MlpParams(tuple(layer(dims[i+1], dims[i], acts[i]) for i in range(len(dims)-1)))
    readout = layer(n, d, Activation.SOFTMAX)
    return RnnOdeSpec.from_tau(embed, hidden, readout, tau, n_steps)


def rel_err(bp, fd):
    a, b = bp.ravel(), fd.ravel()
    floor = 1e-3 * max(1.0, np.abs(b).max())
    return np.max(np.abs(a - b) / np.maximum(np.maximum(np.abs(a), np.abs(b)), floor))


rng = np.random.default_rng(0)
for seed, widths, acts in [
    (1, (4,), None),
    (2, (5, 4), None),  # two hidden layers
    (3, (), None),      # single layer (Class-I-like)
    (4, (4,), [Activation.RELU, Activation.SIGMOID]),
]:
    spec = random_spec(seed, 2, 3, 3, widths=widths, acts=acts)
    X = rng.uniform(-1, 1, (5, 2))
    labs = np.zeros((5, 3)); labs[np.arange(5), rng.integers(0, 3, 5)] = 1
    ds = Dataset(X, labs)
    bp = bptt_gradient(spec, ds)
    fd = finite_diff_gradient(spec, ds, h=1e-5)
    print(f"seed={seed} widths={widths}: rel={rel_err(bp, fd):.3e}  |g|max={bp.max_abs():.3f}")

# toy separable set
rng = np.random.default_rng(42)
n = 10
X = np.concatenate([rng.normal([-2, 0], 0.3, (n, 2)), rng.normal([2, 0], 0.3, (n, 2))])
labs = np.zeros((2 * n, 2)); labs[:n, 0] = 1; labs[n:, 1] = 1
toy = Dataset(X, labs, name="toy")
t0 = time.time()
res = train(TrainConfig(learning_rate=1e-2, epochs=200, batch_size=20, optimizer="sgd", seed=0),
            toy, ArchConfig(state_dim=3, hidden_widths=(8,), tau=0.1, n_steps=50))
print(f"toy: err {res.history[-1].train_error}, loss0 {res.history[0].loss:.2f} -> {res.history[-1].loss:.2f}, "
      f"first-epoch drop {res.history[0].loss > res.history[1].loss}, {time.time()-t0:.1f}s")

# experiment-1 blobs
ds1 = gen_blobs(1000, default_centers(3), 0.45, seed=7)
t0 = time.time()
res1 = train(TrainConfig(learning_rate=0.5, epochs=60, batch_size=100, seed=0), ds1,
             ArchConfig(state_dim=3, hidden_widths=(16,), tau=0.1, n_steps=50))
e1 = evaluate(res1.spec, ds1)
print(f"blobs: err {e1.misclassified}/3000 in {time.time()-t0:.1f}s "
      f"(loss {res1.history[-1].loss:.1f})")

# experiment-2 rings
ds2 = gen_two_class("concentric_rings", 1000, 0.1, seed=7)
t0 = time.time()
res2 = train(TrainConfig(learning_rate=0.5, epochs=150, batch_size=100, seed=0), ds2,
             ArchConfig(state_dim=3, hidden_widths=(16,), tau=0.1, n_steps=50))
e2 = evaluate(res2.spec, ds2)
print(f"rings: err {e2.misclassified}/1000 in {time.time()-t0:.1f}s")

# experiment-3 arcs
ds3 = gen_two_class("interleaved_arcs", 1000, 0.1, seed=7)
t0 = time.time()
res3 = train(TrainConfig(learning_rate=0.5, epochs=150, batch_size=100, seed=0), ds3,
             ArchConfig(state_dim=3, hidden_widths=(16,), tau=0.1, n_steps=50))
e3 = evaluate(res3.spec, ds3)
print(f"arcs: err {e3.misclassified}/1000 in {time.time()-t0:.1f}s")
