"""Essentiality of points for the leaf of disks (zeta, zeta^j) in C^2.

Run with ``python demos/leaf_demo.py``.
"""
from anadisk import MultiPoly
from anadisk.leaves import essentiality, torus_leaf, midrib_test
from anadisk.potential import WalkConfig

leaf = torus_leaf(20)
cfg = WalkConfig(walks=2000)
for z in ([0.3, 0.0], [0.5, 0.5]):
    rep = essentiality(leaf, z, 0.1, cfg)
    tail = ", ".join(f"{rep.estimates[j]:.3f}" for j in rep.tail)
    print(f"z={z}: {rep.classification} (tail harmonic measures {tail})")

mid = midrib_test(leaf, MultiPoly.coordinate(2, 0), [0.3, 0.0], 0.2)
print(f"midrib test with h=z1: {mid.status}, estimate {mid.estimate:.3f} +- {mid.ci95:.3f}")
