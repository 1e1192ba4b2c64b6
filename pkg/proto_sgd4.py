"""Probe: large readout init to amplify BPTT signal into hidden weights."""
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

for sr in (3.0, 6.0, 10.0):
    for lr in (0.01, 0.03, 0.1):
        t0 = time.time()
        outs = []
        for seed in (0, 1):
            spec0 = build_spec(seed, 2, 16, 2, 32, 2.0, 1.0, sr)
            spec, died = sgd_train(spec0, ds2, lr, 300, 100, seed)
            e = evaluate(spec, ds2).misclassified
            outs.append(f"{e}{'!' if died else ''}")
        print(f"sr={sr} lr={lr}: {outs} ({(time.time()-t0)/2:.0f}s/run)", flush=True)
