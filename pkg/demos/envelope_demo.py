"""Evaluate the disk envelope for two functions with known answers.

Run with ``python demos/envelope_demo.py``.
"""
import numpy as np

from anadisk.envelope import Ball, BoundaryData, NormPower, PolyZZbar, poletsky_value

D1 = Ball.unit(1)
phi = BoundaryData(PolyZZbar.real_part(0, 1), D1)
print("boundary data Re w, harmonic extension is Re z")
for z in (0, 0.5, -0.5j):
    res = poletsky_value(phi, [z], D1)
    print(f"  z={z!s:<6} value {res.value:+.6f}  exact {np.real(z):+.6f}")

D2 = Ball.unit(2)
print("||w||^2 on the ball is plurisubharmonic, so it is its own envelope")
for z in ([0.3, 0.2j], [0.0, 0.6]):
    res = poletsky_value(NormPower(2), np.array(z, complex), D2)
    print(f"  z={z}  value {res.value:.6f}  exact {np.linalg.norm(z) ** 2:.6f}")
