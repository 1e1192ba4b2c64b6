"""Diagnostic: can Adam train rings with this architecture at all?"""
import time

import numpy as np

from simplexflow import Activation, LayerParams, MlpParams, RnnOdeSpec
from simplexflow import gen_two_class, gen_blobs, evaluate
from simplexflow.datasets import default_centers
import simplexflow.training as T


def build_spec(seed, m, d, n, width, init, tau=0.1, n_steps=50, ident_out=True):
    rng = np.random.default_rng(seed)

    def layer(dout, din, act):
        s = init / np.sqrt(din)
        return LayerParams(rng.uniform(-s, s, (dout, din)), rng.uniform(-s, s, dout), act)

    embed = layer(d, m, Activation.TANH)
    out_act = Activation.IDENTITY if ident_out else Activation.TANH
    hidden = MlpParams((layer(width, d, Activation.TANH), layer(d, width, out_act)))
    readout = layer(n, d, Activation.SOFTMAX)
    return RnnOdeSpec.from_tau(embed, hidden, readout, tau, n_steps)


def adam_train(spec, ds, lr, epochs, batch, seed):
    theta = T.spec_parameters(spec)
    m = np.zeros_like(theta)
    v = np.zeros_like(theta)
    rng = np.random.default_rng(seed + 1)
    t = 0
    per = 1.0 / (spec.n_steps + 1)
    for epoch in range(epochs):
        order = rng.permutation(ds.n_points)
        for start in range(0, ds.n_points, batch):
            idx = order[start:start + batch]
            g = T.bptt_gradient(T.spec_with_parameters(spec, theta), ds.subset(idx))
            gv = g.ravel() * (per / len(idx))
            t += 1
            m = 0.9 * m + 0.1 * gv
            v = 0.999 * v + 0.001 * gv * gv
            mh = m / (1 - 0.9 ** t)
            vh = v / (1 - 0.999 ** t)
            theta = theta - lr * mh / (np.sqrt(vh) + 1e-8)
    return T.spec_with_parameters(spec, theta)


ds2 = gen_two_class("concentric_rings", 1000, 0.1, seed=7)
for d0, width, init, ident in ((3, 16, 1.0, True), (3, 16, 2.0, True), (6, 32, 1.0, True), (3, 16, 2.0, False)):
    t0 = time.time()
    spec0 = build_spec(0, 2, d0, 2, width, init, ident_out=ident)
    spec = adam_train(spec0, ds2, lr=0.01, epochs=100, batch=100, seed=0)
    e = evaluate(spec, ds2)
    print(f"adam rings d0={d0} w={width} init={init} ident={ident}: "
          f"err {e.misclassified}/1000 ({time.time()-t0:.0f}s)", flush=True)
