"""Try hidden MLP with identity final layer (tanh -> linear) on rings/arcs."""
import time

import numpy as np

from simplexflow import (
    Activation, LayerParams, MlpParams, RnnOdeSpec,
    gen_blobs, gen_two_class, evaluate,
)
from simplexflow.datasets import default_centers, Dataset
from simplexflow.training import TrainConfig, train, init_spec, ArchConfig
import simplexflow.training as T


def build_spec(seed, m, d, n, width, init, tau=0.1, n_steps=50):
    rng = np.random.default_rng(seed)

    def layer(dout, din, act):
        s = init / np.sqrt(din)
        return LayerParams(rng.uniform(-s, s, (dout, din)), rng.uniform(-s, s, dout), act)

    embed = layer(d, m, Activation.TANH)
    hidden = MlpParams((layer(width, d, Activation.TANH),
                        layer(d, width, Activation.IDENTITY)))
    readout = layer(n, d, Activation.SOFTMAX)
    return RnnOdeSpec.from_tau(embed, hidden, readout, tau, n_steps)


def train_spec(spec0, ds, lr, epochs, batch, seed, beta=0.9):
    """Manual loop mirroring training.train but from a given init spec."""
    rng = np.random.default_rng(seed + 1)
    spec = spec0
    per = 1.0 / (spec.n_steps + 1)
    vel = None
    for epoch in range(epochs):
        order = rng.permutation(ds.n_points)
        for start in range(0, ds.n_points, batch):
            idx = order[start:start + batch]
            g = T.bptt_gradient(spec, ds.subset(idx))
            g = T._scale_bundle(g, per / len(idx))
            vel = g if vel is None else T._add_bundles(T._scale_bundle(vel, beta), g, 1.0)
            spec = T._apply_update(spec, T._scale_bundle(vel, -lr))
    return spec


ds2 = gen_two_class("concentric_rings", 1000, 0.1, seed=7)
ds3 = gen_two_class("interleaved_arcs", 1000, 0.1, seed=7)
ds1 = gen_blobs(1000, default_centers(3), 0.45, seed=7)

for name, ds, nlab in (("rings", ds2, 2), ("arcs", ds3, 2), ("blobs", ds1, 3)):
    for d0, width in ((3, 16), (6, 16)):
        for init in (1.0, 2.0):
            for lr in (0.05, 0.2):
                t0 = time.time()
                outs = []
                for seed in (0, 1):
                    spec0 = build_spec(seed, 2, d0, nlab, width, init)
                    spec = train_spec(spec0, ds, lr, 200, 100, seed)
                    outs.append(evaluate(spec, ds).misclassified)
                print(f"{name} d0={d0} w={width} init={init} lr={lr}: {outs} "
                      f"({(time.time()-t0)/2:.0f}s/run)", flush=True)
