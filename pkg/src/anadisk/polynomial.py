"""Sparse complex polynomials on C^n.

Used as the test functions of the package: separating polynomials in hull
certificates, the ``p_j`` inside Bremermann probes, and the function ``h`` of
the Bloch and midrib diagnostics.
"""
from __future__ import annotations

from itertools import combinations_with_replacement
from math import comb

import numpy as np

from .errors import DimensionError, ParameterError


def monomial_exponents(n: int, degree: int) -> np.ndarray:
    """All exponent vectors in ``n`` variables of total degree <= ``degree``.

    Rows are ordered by total degree, then lexicographically, so that the
    constant term is always row 0.
    """
    rows = []
    for d in range(degree + 1):
        level = set()
        for combo in combinations_with_replacement(range(n), d):
            e = [0] * n
            for i in combo:
                e[i] += 1
            level.add(tuple(e))
        rows.extend(sorted(level, reverse=True))
    return np.array(rows, dtype=int).reshape(-1, n)


def _as_points(z, n):
    z = np.asarray(z, dtype=complex)
    if z.ndim == 0:
        z = z.reshape(1)
    if z.shape[-1] != n:
        if n == 1:
            z = z[..., None]
        else:
            raise DimensionError(f"expected points with {n} coordinates, got shape {z.shape}")
    return z


class MultiPoly:
    """p(z) = sum_k c_k z^{e_k} with complex coefficients.

    Parameters
    ----------
    exponents : (k, n) int array
    coeffs : (k,) complex array
    """

    def __init__(self, exponents, coeffs):
        exps = np.atleast_2d(np.asarray(exponents, dtype=int))
        cs = np.atleast_1d(np.asarray(coeffs, dtype=complex))
        if exps.shape[0] != cs.shape[0]:
            raise ParameterError("exponents and coeffs disagree in length")
        if np.any(exps < 0):
            raise ParameterError("negative exponent")
        exps.setflags(write=False)
        cs.setflags(write=False)
        self.exponents = exps
        self.coeffs = cs

    @property
    def dim(self) -> int:
        return self.exponents.shape[1]

    @property
    def degree(self) -> int:
        if len(self.coeffs) == 0:
            return 0
        return int(self.exponents.sum(axis=1).max())

    @classmethod
    def coordinate(cls, n: int, i: int) -> "MultiPoly":
        """The coordinate function z_i."""
        e = np.zeros((1, n), dtype=int)
        e[0, i] = 1
        return cls(e, [1.0])

    @classmethod
    def from_terms(cls, terms: dict, n: int) -> "MultiPoly":
        if not terms:
            return cls(np.zeros((1, n), dtype=int), [0.0])
        exps = np.array(list(terms.keys()), dtype=int).reshape(-1, n)
        return cls(exps, list(terms.values()))

    @classmethod
    def random(cls, n, degree, rng, n_terms=None, scale=1.0) -> "MultiPoly":
        """Random polynomial with complex-normal coefficients on a random
        subset of the monomials of total degree <= ``degree``."""
        exps = monomial_exponents(n, degree)
        if n_terms is not None and n_terms < len(exps):
            idx = np.sort(rng.choice(len(exps), size=n_terms, replace=False))
            exps = exps[idx]
        c = scale * (rng.standard_normal(len(exps)) + 1j * rng.standard_normal(len(exps)))
        return cls(exps, c / np.sqrt(2))

    def __call__(self, z) -> np.ndarray:
        z = _as_points(z, self.dim)
        # (..., 1, n) ** (k, n) -> (..., k, n)
        powers = np.prod(z[..., None, :] ** self.exponents, axis=-1)
        return powers @ self.coeffs

    def gradient(self, z) -> np.ndarray:
        """Holomorphic gradient (dp/dz_1, ..., dp/dz_n), shape (..., n)."""
        z = _as_points(z, self.dim)
        out = np.empty(z.shape, dtype=complex)
        for i in range(self.dim):
            mask = self.exponents[:, i] > 0
            if not mask.any():
                out[..., i] = 0.0
                continue
            exps = self.exponents[mask].copy()
            c = self.coeffs[mask] * exps[:, i]
            exps[:, i] -= 1
            out[..., i] = MultiPoly(exps, c)(z)
        return out

    def shifted(self, a) -> "MultiPoly":
        """The polynomial w -> p(w - a) expanded in monomials of w."""
        a = np.asarray(a, dtype=complex).reshape(self.dim)
        terms: dict = {}
        for e, c in zip(self.exponents, self.coeffs):
            # prod_i (w_i - a_i)^{e_i}
            partial = {tuple([0] * self.dim): c}
            for i, ei in enumerate(e):
                if ei == 0:
                    continue
                binom = np.array([comb(ei, j) for j in range(ei + 1)], dtype=float)
                nxt: dict = {}
                for key, val in partial.items():
                    for j in range(ei + 1):
                        k = list(key)
                        k[i] += j
                        nxt[tuple(k)] = nxt.get(tuple(k), 0) + val * binom[j] * (-a[i]) ** (ei - j)
                partial = nxt
            for key, val in partial.items():
                terms[key] = terms.get(key, 0) + val
        return MultiPoly.from_terms(terms, self.dim)

    def scaled(self, s) -> "MultiPoly":
        return MultiPoly(self.exponents, self.coeffs * s)

    def to_dict(self) -> dict:
        return {
            "exponents": self.exponents.tolist(),
            "coeffs": [[float(c.real), float(c.imag)] for c in self.coeffs],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "MultiPoly":
        c = [complex(re, im) for re, im in d["coeffs"]]
        return cls(d["exponents"], c)

    def __repr__(self):
        return f"MultiPoly(n={self.dim}, degree={self.degree}, terms={len(self.coeffs)})"

