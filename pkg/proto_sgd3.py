"""Targeted SGD probes on rings: per-layer init gains, coarser windows, small batches."""
import time

import numpy as np

from simplexflow import Activation, LayerParams, MlpParams, RnnOdeSpec
from simplexflow import gen_two_class, evaluate
import simplexflow.training as T


def build_spec(seed, m, d, n, width, se, sh, sr, tau=0.1, n_steps=50):
    rng = np.random.default_rng(seed)

    def layer(dout, din, act, s):
        s = s / np.sqrt(din)
        return LayerParams(rng.uniform(-s, s, (dout, din)), rng.uniform(-s, s, dout), act)

    embed = layer(d, m, Activation.TANH, se)
    hidden = MlpParams((layer(width, d, Activation.TANH, sh),
                        layer(d, width, Activation.IDENTITY, sh)))
    readout = layer(n, d, Activation.SOFTMAX, sr)
    return RnnOdeSpec.from_tau(embed, hidden, readout, tau, n_steps)


def sgd_train(spec, ds, lr, epochs, batch, seed, beta=0.9):
    rng = np.random.default_rng(seed + 1)
    per = 1.0 / (spec.n_steps + 1)
    vel = None
    for epoch in range(epochs):
        order = rng.permutation(ds.n_points)
        for start in range(0, ds.n_points, batch):
            idx = order[start:start + batch]
            try:
                g = T.bptt_gradient(spec, ds.subset(idx))
            except Exception:
                return spec, True
            g = T._scale_bundle(g, per / len(idx))
            vel = g if vel is None else T._add_bundles(T._scale_bundle(vel, beta), g, 1.0)
            spec = T._apply_update(spec, T._scale_bundle(vel, -lr))
    return spec, False


ds2 = gen_two_class("concentric_rings", 1000, 0.1, seed=7)

cases = [
    # (d0, w, se, sh, sr, tau, n_steps, lr, batch)
    (16, 32, 3.0, 1.0, 1.0, 0.1, 50, 0.1, 100),
    (16, 32, 3.0, 1.0, 1.0, 0.1, 50, 0.3, 100),
    (16, 32, 5.0, 1.0, 1.0, 0.1, 50, 0.1, 100),
    (16, 32, 3.0, 1.0, 1.0, 0.5, 10, 0.1, 100),
    (16, 32, 3.0, 1.0, 1.0, 0.5, 10, 0.3, 100),
    (16, 32, 3.0, 1.0, 1.0, 0.25, 20, 0.3, 100),
    (16, 32, 3.0, 1.0, 1.0, 0.1, 50, 0.1, 20),
    (8, 32, 3.0, 1.0, 1.0, 0.5, 10, 0.3, 100),
    (32, 64, 3.0, 1.0, 1.0, 0.5, 10, 0.3, 100),
]
for d0, w, se, sh, sr, tau, nst, lr, batch in cases:
    t0 = time.time()
    outs = []
    for seed in (0, 1):
        spec0 = build_spec(seed, 2, d0, 2, w, se, sh, sr, tau, nst)
        spec, died = sgd_train(spec0, ds2, lr, 300, batch, seed)
        e = evaluate(spec, ds2).misclassified
        outs.append(f"{e}{'!' if died else ''}")
    print(f"d0={d0} w={w} se={se} sh={sh} tau={tau} K={nst} lr={lr} B={batch}: "
          f"{outs} ({(time.time()-t0)/2:.0f}s/run)", flush=True)
