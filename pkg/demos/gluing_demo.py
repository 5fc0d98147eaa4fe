"""Glue two disks and watch the push-forward approach the mixture measure.

Run with ``python demos/gluing_demo.py``.
"""
import numpy as np

from anadisk import Polynomial, mixture, moments, pushforward, weak_distance
from anadisk.gluing import convergence_profile, glue

f = Polynomial([0, 1])
g = Polynomial([0, 2])
alpha = 0.5

print("r        distance")
for row in convergence_profile(f, g, alpha, [1e-1, 1e-2, 1e-3, 1e-4], n=100_000):
    print(f"{row.r:<8.0e} {row.distance:.5f}")

p = glue(f, g, r=1e-3, alpha=alpha)
target = mixture(pushforward(f, 100_000), pushforward(g, 100_000), alpha)
mu = pushforward(p, 100_000)
print("(1,1) moment of glued disk:", np.round(moments(mu, 2)[((1,), (1,))].real, 4), "(mixture 2.5)")
print("weak distance to mixture:", round(weak_distance(mu, target, 4), 5))
