"""Univariate spectral factorization and sum-of-squares certificate checks."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .lattice import DilationScheme
from .trigring import (QQ_I, RationalTrigPoly, TrigPoly, to_complex, tp_shift,
                       tp_vanishing_order)

GRID_POINTS = 4096
NONNEG_TOL = 1e-10
CIRCLE_TOL = 1e-6
RESIDUAL_REL = 1e-9
POLE_GUARD = 1e-6


def _laurent_coeffs(f: TrigPoly) -> tuple[list, int]:
    """Coefficients of ``P(z) = z^d f`` in ascending powers of ``z = exp(1j w)``."""
    ks = [k[0] for k in f.terms]
    d = max(ks)
    lo = min(ks)
    zero = QQ_I(0, 0) if f.exact else 0j
    coeffs = [zero] * (d - lo + 1)
    for (k,), c in f.terms.items():
        coeffs[d - k] = c
    return coeffs, d


def _deflate(coeffs: list, root, times: int) -> list:
    """Divide an ascending coefficient list by ``(z - root)^times``; remainder must vanish."""
    for _ in range(times):
        desc = coeffs[::-1]
        out = [desc[0]]
        for c in desc[1:]:
            out.append(c + out[-1] * root)
        rem = out.pop()
        scale = max(abs(to_complex(c)) for c in coeffs)
        if abs(to_complex(rem)) > 1e-8 * scale:
            raise ArithmeticError("deflation left a nonzero remainder")
        coeffs = out[::-1]
    return coeffs


def _pair_circle_roots(roots: np.ndarray) -> list[complex]:
    """Greedy nearest-neighbour pairing; each pair contributes one unit-modulus root."""
    remaining = list(roots)
    chosen = []
    while remaining:
        r = remaining.pop(0)
        if not remaining:
            raise ValueError("odd-multiplicity root on the unit circle: "
                             "polynomial is not nonnegative (or tolerance too small)")
        j = int(np.argmin([abs(r - s) for s in remaining]))
        s = remaining.pop(j)
        m = (r + s) / 2
        chosen.append(m / abs(m))
    return chosen


def fejer_riesz(f: TrigPoly, tol: float = NONNEG_TOL) -> TrigPoly:
    """Factor a nonnegative univariate trigonometric polynomial as ``|p|^2``.

    Returns ``p(w) = C * prod_j (1 - exp(1j w) / r_j)`` with every ``|r_j| >= 1``
    and ``C > 0`` (float mode).  Zeros at ``w = 0`` and ``w = pi`` are split off
    before root finding so that high-multiplicity zeros there stay accurate.
    """
    if f.dim != 1:
        raise ValueError("fejer_riesz is univariate only")
    if not f.is_real_valued():
        raise ValueError("polynomial is not real-valued on the circle")
    if f.is_zero():
        return TrigPoly.zero(1, exact=False)
    vals = f.eval_grid(GRID_POINTS).real
    fmax = float(np.max(vals))
    if np.min(vals) < -tol * max(1.0, fmax):
        raise ValueError(f"polynomial is negative on the grid (min {np.min(vals):.3e})")

    orders = []
    for at in (0.0, math.pi):
        o = tp_vanishing_order(f, [at])
        if o % 2:
            raise ValueError(f"odd-order zero at w={at}: polynomial changes sign")
        orders.append(o)
    coeffs, _ = _laurent_coeffs(f)
    one = QQ_I(1, 0) if f.exact else 1.0
    coeffs = _deflate(coeffs, one, orders[0])
    coeffs = _deflate(coeffs, -one, orders[1])
    P = np.array([to_complex(c) for c in coeffs])
    # np.roots works from the companion matrix of the (descending) polynomial
    roots = np.roots(P[::-1]) if len(P) > 1 else np.array([], dtype=complex)
    mod = np.abs(roots)
    outer = list(roots[mod > 1 + CIRCLE_TOL])
    circle = roots[np.abs(mod - 1) <= CIRCLE_TOL]
    circle = circle[np.argsort(np.angle(circle))]
    outer += _pair_circle_roots(circle)
    if 2 * len(outer) != len(roots):
        raise ArithmeticError("root pairing failed: conjugate-reciprocal structure not found")

    # p in ascending powers of z = exp(1j w)
    p = np.array([1.0 + 0j])
    for r in outer:
        p = np.convolve(p, [1.0, -1.0 / r])
    for _ in range(orders[0] // 2):
        p = np.convolve(p, [1.0, -1.0])
    for _ in range(orders[1] // 2):
        p = np.convolve(p, [1.0, 1.0])
    w = 2 * np.pi * np.arange(GRID_POINTS) / GRID_POINTS
    basis = np.abs(np.polyval(p[::-1], np.exp(1j * w))) ** 2
    C2 = float(np.dot(vals, basis) / np.dot(basis, basis))
    p = p * math.sqrt(max(C2, 0.0))
    out = TrigPoly(1, {(-j,): complex(c) for j, c in enumerate(p)}, exact=False,
                   meta={"method": "fejer-riesz", "zero_orders": tuple(orders)})
    resid = np.max(np.abs(np.abs(out.eval_grid(GRID_POINTS)) ** 2 - vals))
    if resid > RESIDUAL_REL * max(fmax, 1e-300):
        raise ArithmeticError(f"factorization residual {resid:.3e} exceeds tolerance")
    return out


def reversed_roots(p: TrigPoly) -> np.ndarray:
    """Roots of ``p`` as a polynomial in ``exp(-1j w)`` (inside the closed disk when minimum phase)."""
    ks = [-k[0] for k in p.terms]
    deg = max(ks)
    asc = np.zeros(deg + 1, dtype=complex)
    for (k,), c in p.terms.items():
        asc[-k] = to_complex(c)
    # p(w) = sum_j a_j z^j = z^deg * sum_j a_j u^(deg-j), with u = 1/z
    return np.roots(asc) if deg else np.array([], dtype=complex)


@dataclass
class SosCertificate:
    """Claim ``target = sum_j |g_j|^2`` wherever defined."""
    target: RationalTrigPoly
    generators: list
    g_invariant: bool = False
    scheme: DilationScheme | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.target = RationalTrigPoly.lift(self.target)
        self.generators = [RationalTrigPoly.lift(g) for g in self.generators]
        if self.g_invariant and self.scheme is not None:
            self.check_g_invariance()

    @property
    def dim(self) -> int:
        return self.target.dim

    def check_g_invariance(self, tol: float = 1e-12) -> bool:
        if self.scheme is None:
            raise ValueError("G-invariance needs a dilation scheme")
        for g in self.generators:
            for gamma in self.scheme.GammaStar[1:]:
                h = tp_shift(g, gamma)
                ok = h.equals(g) if (h.exact and g.exact) else h.equals(g, tol=tol)
                if not ok:
                    raise ValueError("certificate generator is not G-invariant")
        return True

    def to_json(self) -> dict:
        return {"target": self.target.to_json(),
                "generators": [g.to_json() for g in self.generators],
                "gInvariant": self.g_invariant}

    @classmethod
    def from_json(cls, obj, scheme: DilationScheme | None = None) -> "SosCertificate":
        return cls(RationalTrigPoly.from_json(obj["target"]),
                   [RationalTrigPoly.from_json(g) for g in obj["generators"]],
                   g_invariant=bool(obj.get("gInvariant", False)), scheme=scheme)


@dataclass(frozen=True)
class SosReport:
    max_residual: float
    exact: bool
    points: int


def verify_sos_certificate(cert: SosCertificate, grid: int | Sequence[int] = 64) -> SosReport:
    dim = cert.dim
    Ns = (grid,) * dim if np.isscalar(grid) else tuple(grid)
    if min(Ns) < 8:
        raise ValueError("grid must have at least 8 points per dimension")
    dens = [cert.target.den.eval_grid(Ns)]
    t = cert.target.num.eval_grid(Ns) / dens[0]
    acc = np.zeros(Ns)
    for g in cert.generators:
        d = g.den.eval_grid(Ns)
        dens.append(d)
        acc = acc + np.abs(g.num.eval_grid(Ns) / d) ** 2
    ok = np.ones(Ns, dtype=bool)
    for d in dens:
        ok &= np.abs(d) > POLE_GUARD
    resid = float(np.max(np.abs(t - acc)[ok])) if ok.any() else 0.0

    exact = False
    if cert.target.exact and all(g.exact for g in cert.generators):
        # clear denominators: num_t * prod|d_i|^2 == den_t * sum_j |n_j|^2 prod_{i!=j} |d_i|^2
        d2 = [g.den.abs2() for g in cert.generators]
        lhs = cert.target.num
        for x in d2:
            lhs = lhs * x
        rhs = TrigPoly.zero(dim)
        for j, g in enumerate(cert.generators):
            term = g.num.abs2()
            for i, x in enumerate(d2):
                if i != j:
                    term = term * x
            rhs = rhs + term
        rhs = rhs * cert.target.den
        exact = lhs.equals(rhs)
    return SosReport(max_residual=resid, exact=exact, points=int(ok.sum()))


@dataclass(frozen=True)
class ArctanReport:
    max_deviation: float
    samples: int
    skipped: int
    passed: bool


def arctan_equivalence_check(f, Mf: Callable[[np.ndarray], float], samples: int = 1000,
                             tol: float = 1e-10, seed: int = 0) -> ArctanReport:
    """Compare ``f(2 arctan x)`` with a claimed rational function ``Mf(x)`` on random ``x``."""
    f = RationalTrigPoly.lift(f)
    rng = np.random.default_rng(seed)
    xs = rng.uniform(-10, 10, size=(samples, f.dim))
    worst = 0.0
    skipped = 0
    for x in xs:
        w = 2 * np.arctan(x)
        den = f.den(w)
        try:
            if abs(den) < POLE_GUARD:
                raise ZeroDivisionError
            lhs = f.num(w) / den
            with np.errstate(all="raise"):
                rhs = complex(Mf(x))
        except (ZeroDivisionError, FloatingPointError, OverflowError):
            skipped += 1
            continue
        if not np.isfinite(rhs):
            skipped += 1
            continue
        worst = max(worst, abs(lhs - rhs))
    return ArctanReport(max_deviation=worst, samples=samples, skipped=skipped,
                        passed=worst <= tol)
