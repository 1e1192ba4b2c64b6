"""Scan cooler lr with strong init, across seeds, on blobs + rings + arcs."""
import time

import numpy as np

from simplexflow import gen_blobs, gen_two_class, evaluate, train
from simplexflow.datasets import default_centers
from simplexflow.training import ArchConfig, TrainConfig

ds1 = gen_blobs(1000, default_centers(3), 0.45, seed=7)
ds2 = gen_two_class("concentric_rings", 1000, 0.1, seed=7)
ds3 = gen_two_class("interleaved_arcs", 1000, 0.1, seed=7)
arch = ArchConfig(state_dim=3, hidden_widths=(16,), tau=0.1, n_steps=50)

combos = [
    (2.0, 0.05, 0.9), (2.0, 0.1, 0.9), (2.5, 0.05, 0.9), (2.5, 0.1, 0.9),
    (2.5, 0.2, 0.9), (3.0, 0.1, 0.9),
]
for name, ds in (("blobs", ds1), ("rings", ds2), ("arcs", ds3)):
    for init, lr, beta in combos:
        outs = []
        t0 = time.time()
        for seed in (0, 1, 2):
            cfg = TrainConfig(learning_rate=lr, epochs=200, batch_size=100,
                              optimizer="sgd_momentum", momentum=beta,
                              seed=seed, init_scale=init)
            res = train(cfg, ds, arch)
            e = evaluate(res.spec, ds)
            outs.append(e.misclassified)
        print(f"{name} init={init} lr={lr} b={beta}: errs {outs} "
              f"({(time.time()-t0)/3:.0f}s/run)", flush=True)
