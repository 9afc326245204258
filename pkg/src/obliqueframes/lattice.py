"""Dilation matrices and their coset representatives."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .trigring import int_adjugate, int_det, int_matrix

EXPANSIVE_TOL = 1e-9


def _transpose(M):
    return tuple(zip(*M))


def _parallelepiped_points(M) -> list[tuple[int, ...]]:
    """Integer points ``x`` with ``M^{-1} x`` in ``[0, 1)^n``."""
    n = len(M)
    det = int_det(M)
    adj = int_adjugate(M)
    sgn = 1 if det > 0 else -1
    corners = np.array([np.asarray(M) @ np.array(c) for c in itertools.product((0, 1), repeat=n)])
    lo, hi = corners.min(axis=0), corners.max(axis=0)
    pts = []
    for x in itertools.product(*(range(int(a), int(b) + 1) for a, b in zip(lo, hi))):
        t = [sgn * sum(a * b for a, b in zip(row, x)) for row in adj]
        if all(0 <= v < abs(det) for v in t):
            pts.append(tuple(x))
    return pts


def _zero_first(v):
    return (any(v), v)


@dataclass(frozen=True)
class DilationScheme:
    """Dilation ``M`` with coset sets ``Gamma`` (of Z^n / M Z^n) and ``GammaStar``.

    ``GammaStar`` holds real vectors in ``[0, 2*pi)^n``; ``gamma_star_frac``
    stores the same points exactly as fractions of ``2*pi``.
    """
    M: tuple
    Q: int
    Gamma: tuple
    gamma_star_frac: tuple

    @property
    def dim(self) -> int:
        return len(self.M)

    @property
    def GammaStar(self) -> np.ndarray:
        return 2 * np.pi * np.array([[float(x) for x in g] for g in self.gamma_star_frac])

    @property
    def is_dyadic(self) -> bool:
        return self.M == tuple(tuple(2 if i == j else 0 for j in range(self.dim))
                               for i in range(self.dim))

    def grid_shift(self, N) -> list[tuple[int, ...]]:
        """Index offsets of each ``gamma`` on the grid ``2*pi*j/N``; fails if off-grid."""
        Ns = (N,) * self.dim if np.isscalar(N) else tuple(N)
        out = []
        for g in self.gamma_star_frac:
            s = [x * n for x, n in zip(g, Ns)]
            if any(v.denominator != 1 for v in s):
                raise ValueError(f"grid size {N} is incompatible with the dilation {self.M}")
            out.append(tuple(int(v) for v in s))
        return out

    def is_zero_shift(self, idx: int) -> bool:
        return not any(self.gamma_star_frac[idx])

    def character_sum(self, k) -> complex:
        return complex(sum(np.exp(1j * (g @ np.asarray(k, dtype=float))) for g in self.GammaStar))

    def to_json(self) -> dict:
        return {"M": [list(r) for r in self.M], "Q": self.Q,
                "Gamma": [list(g) for g in self.Gamma],
                "GammaStar": [[float(x) for x in g] for g in self.GammaStar]}

    @classmethod
    def from_json(cls, obj) -> "DilationScheme":
        return build_scheme(obj["M"])


def roll_to(arr: np.ndarray, offset) -> np.ndarray:
    """Grid samples of ``w -> f(w + gamma)`` given samples of ``f`` and the index offset of ``gamma``."""
    return np.roll(arr, tuple(-int(v) for v in offset), axis=tuple(range(len(offset))))


def build_scheme(M) -> DilationScheme:
    """Enumerate ``Gamma`` and ``Gamma*`` for an expansive integer matrix ``M``."""
    M = int_matrix(M)
    det = int_det(M)
    if det == 0:
        raise ValueError("dilation matrix is singular")
    eig = np.linalg.eigvals(np.asarray(M, dtype=float))
    if np.min(np.abs(eig)) <= 1 + EXPANSIVE_TOL:
        raise ValueError(f"dilation matrix is not expansive (eigenvalues {eig})")
    Q = abs(det)
    gamma = sorted(_parallelepiped_points(M), key=_zero_first)
    MT = _transpose(M)
    gamma_t = _parallelepiped_points(MT)
    # M^{-T} = adj(M^T) / det
    adjT = int_adjugate(MT)
    frac = []
    for v in gamma_t:
        w = [Fraction(sum(a * b for a, b in zip(row, v)), det) for row in adjT]
        frac.append(tuple(x - math.floor(x) for x in w))
    frac = sorted(frac, key=_zero_first)
    if len(gamma) != Q or len(frac) != Q:
        raise RuntimeError("coset enumeration produced the wrong number of representatives")
    return DilationScheme(M=M, Q=Q, Gamma=tuple(gamma), gamma_star_frac=tuple(frac))


def fourier_matrix(scheme: DilationScheme, w) -> np.ndarray:
    """``X(w) = [Q^{-1/2} exp(1j (w + gamma) . nu)]`` with rows ``gamma`` and columns ``nu``."""
    w = np.asarray(w, dtype=float).reshape(-1)
    if len(w) != scheme.dim:
        raise ValueError("frequency vector has the wrong dimension")
    G = scheme.GammaStar + w[None, :]
    N = np.array(scheme.Gamma, dtype=float)
    return np.exp(1j * G @ N.T) / math.sqrt(scheme.Q)
