"""
Pair-potential models and their Papangelou intensity
====================================================

``lambda(u, x)`` is the conditional intensity of adding a point at u given
the configuration x. For pairwise models it factorizes as
``beta * prod_{v near u} Phi(|u - v|)`` with ``Phi = exp(-gamma)``.
"""

# %%
import math

import numpy as np

from pairpot import (
    LennardJones,
    PiecewiseStrauss,
    Poisson,
    Strauss,
    Triplets,
    log_papangelou,
    log_papangelou_multi,
    pair_potential,
)

x = np.array([[0.5, 0.0], [0.0, 0.5], [-0.3, -0.3], [3.0, 3.0]])
models = [
    Poisson(2.0),
    Strauss(2.0, 1.0, 0.5),
    PiecewiseStrauss(2.0, [0.5, 1.0], [0.2, 0.7]),
    LennardJones(2.0, 1.0, 0.4),
    Triplets(2.0, 1.0, 0.5),
]

# %% Three points lie within range of the origin, one is far away.
for m in models:
    print(f"{m.kind:18s} lambda(o, x) = {math.exp(log_papangelou(m, (0.0, 0.0), x)):.5f}")

# %% The pair potential on a grid of distances
r = np.linspace(0.1, 1.2, 12)
for m in models[1:4]:
    print(m.kind, np.round(pair_potential(m, r), 3))

# %% Lennard-Jones is attractive beyond theta, so gamma changes sign inside the range.
lj = models[3]
print("LJ repulsive everywhere on (0, R]:", lj.is_repulsive())

# %% Adding several points at once chains one-point intensities.
y = np.array([[0.0, 0.0], [0.4, 0.0]])
s = models[1]
print("joint:", log_papangelou_multi(s, y, np.zeros((0, 2))))
print("chain:", log_papangelou(s, y[0], np.zeros((0, 2))) + log_papangelou(s, y[1], y[:1]))
