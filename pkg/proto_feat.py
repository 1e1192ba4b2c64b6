"""How separable are random tanh embed features of the rings data?"""
import numpy as np
from sklearn.linear_model import LogisticRegression

from simplexflow import gen_two_class

ds = gen_two_class("concentric_rings", 1000, 0.1, seed=7)
labels = np.argmax(ds.labels, axis=1)

for d0 in (8, 16, 32, 64, 128):
    for se in (1.0, 2.0, 3.0, 5.0):
        rng = np.random.default_rng(0)
        s = se / np.sqrt(2)
        W = rng.uniform(-s, s, (d0, 2))
        b = rng.uniform(-s, s, d0)
        feats = np.tanh(ds.inputs @ W.T + b)
        clf = LogisticRegression(max_iter=2000, C=10.0).fit(feats, labels)
        err = int((clf.predict(feats) != labels).sum())
        print(f"d0={d0} se={se}: logreg err {err}/1000", flush=True)
