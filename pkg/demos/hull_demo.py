"""Certify hull membership or separation for points near the unit circle.

Run with ``python demos/hull_demo.py``.
"""
from anadisk.hull import CompactSet, hull_classify

K = CompactSet.circle()
for z in (0.0, 0.5, 1.5):
    cert = hull_classify(K, z)
    if cert.kind == "membership":
        print(f"z={z}: membership, disk degree {cert.disk.degree}, outside fraction {cert.outside_fraction:.1e}")
    else:
        print(f"z={z}: {cert.kind}, margin {cert.margin:.3f}")

T = CompactSet.torus()
cert = hull_classify(T, [0, 0])
print(f"torus at origin: {cert.kind}, disk degree {cert.disk.degree}")
