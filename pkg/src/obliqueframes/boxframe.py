"""Box-spline lowpass masks, table-driven vmr functions and telescoping sos certificates."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .lattice import DilationScheme
from .specfactor import (GRID_POINTS, NONNEG_TOL, SosCertificate, fejer_riesz,
                         verify_sos_certificate)
from .trigring import (RationalTrigPoly, TrigPoly, along, int_det, tp_coset_sum,
                       tp_dilate, tp_polyphase, tp_shift, tp_undilate, tp_vanishing_order)

SOS_RESIDUAL_TOL = 1e-9

# Unnormalized cosine coefficients [c0, c1, c2, ...], keyed by (m, ell).
S1_TABLE = {
    (1, 2): [1], (2, 2): [2, 1], (3, 2): [33, 26, 1], (4, 2): [29, 28, 3],
    (1, 3): [1], (2, 3): [2, 1], (3, 3): [33, 26, 1], (4, 3): [29, 28, 3],
    (1, 4): [1], (2, 4): [2, 1], (3, 4): [33, 26, 1], (4, 4): [1208, 1191, 120, 1],
}
S2_TABLE = {
    (1, 2): [5, 1], (2, 2): [2, 1], (3, 2): [33, 26, 1], (4, 2): [29, 28, 3],
    (1, 3): [97, 24, -1], (2, 3): [237, 124, -1], (3, 3): [33, 26, 1], (4, 3): [29, 28, 3],
    # the printed value 267 fails the O(w^8) condition; 2679 is the unique solution
    (1, 4): [24134, 6513, -438, 31], (2, 4): [4927, 2679, -51, 5],
    (3, 4): [8306, 6567, 246, 1], (4, 4): [1208, 1191, 120, 1],
}
PRINTED_S2_M2_L4 = [4927, 267, -51, 5]


@dataclass(frozen=True)
class BoxSplineSpec:
    """Direction matrix given as distinct directions with multiplicities.

    The first ``dim`` directions are the basis used by the base case and must be
    invertible mod 2.  ``cosine_factors`` optionally replaces the elementary
    factor ``(1 + exp(-1j w.xi))/2`` of each direction by a normalized cosine
    polynomial in ``w.xi`` (used for non-dyadic masks).
    """
    directions: tuple
    multiplicities: tuple
    cosine_factors: tuple | None = None

    def __post_init__(self):
        dirs = tuple(tuple(int(e) for e in d) for d in self.directions)
        mult = tuple(int(m) for m in self.multiplicities)
        object.__setattr__(self, "directions", dirs)
        object.__setattr__(self, "multiplicities", mult)
        if self.cosine_factors is not None:
            object.__setattr__(self, "cosine_factors",
                               tuple(tuple(c) for c in self.cosine_factors))
            if len(self.cosine_factors) != len(dirs):
                raise ValueError("one cosine factor per direction is required")
        if not dirs or len(dirs) != len(mult):
            raise ValueError("directions and multiplicities must have equal nonzero length")
        n = len(dirs[0])
        if any(len(d) != n for d in dirs):
            raise ValueError("directions must share one dimension")
        if len(set(dirs)) != len(dirs):
            raise ValueError("directions must be distinct (use multiplicities for repeats)")
        if any(m < 1 for m in mult):
            raise ValueError("multiplicities must be positive")
        if len(dirs) < n:
            raise ValueError("need at least dim directions for a basis")
        if int_det(dirs[:n]) % 2 == 0:
            raise ValueError("leading directions are not a basis of Z^n mod 2")

    @property
    def dim(self) -> int:
        return len(self.directions[0])

    @property
    def basis_count(self) -> int:
        return self.dim

    @property
    def mu(self) -> int:
        return min(self.multiplicities[: self.dim])

    @property
    def total_columns(self) -> int:
        return sum(self.multiplicities)

    @classmethod
    def from_matrix(cls, xi: Sequence[Sequence[int]]) -> "BoxSplineSpec":
        """Group the columns of ``Xi`` (given as a list of columns) in first-seen order."""
        dirs: list = []
        mult: list = []
        for col in xi:
            col = tuple(int(e) for e in col)
            if col in dirs:
                mult[dirs.index(col)] += 1
            else:
                dirs.append(col)
                mult.append(1)
        return cls(tuple(dirs), tuple(mult))

    def to_json(self) -> dict:
        out = {"directions": [list(d) for d in self.directions],
               "multiplicities": list(self.multiplicities)}
        if self.cosine_factors is not None:
            out["cosineFactors"] = [list(c) for c in self.cosine_factors]
        return out

    @classmethod
    def from_json(cls, obj) -> "BoxSplineSpec":
        return cls(tuple(map(tuple, obj["directions"])), tuple(obj["multiplicities"]),
                   cosine_factors=obj.get("cosineFactors"))


def elementary_factor(direction) -> TrigPoly:
    """``(1 + exp(-1j w . xi)) / 2``."""
    n = len(direction)
    return TrigPoly(n, {(0,) * n: Fraction(1, 2), tuple(direction): Fraction(1, 2)})


def boxspline_mask(spec: BoxSplineSpec) -> TrigPoly:
    """Exact lowpass mask ``prod_j factor_j ** m_j``; equals 1 at the origin."""
    tau = TrigPoly.constant(spec.dim, 1)
    for j, (xi, m) in enumerate(zip(spec.directions, spec.multiplicities)):
        if spec.cosine_factors is None:
            fac = elementary_factor(xi)
        else:
            fac = along(TrigPoly.from_cosines(spec.cosine_factors[j], normalize=True), xi)
        tau = tau * fac ** m
    return tau


def s_table(kind: int, m: int, ell: int) -> TrigPoly:
    """Tabulated univariate factor, normalized to value 1 at the origin."""
    table = {1: S1_TABLE, 2: S2_TABLE}.get(kind)
    if table is None:
        raise ValueError("kind must be 1 or 2")
    try:
        coeffs = table[(m, ell)]
    except KeyError:
        raise KeyError(f"no tabulated s_{kind} for m={m}, ell={ell}") from None
    return TrigPoly.from_cosines(coeffs, normalize=True)


def cos_half_power(m: int) -> TrigPoly:
    """``cos^{2m}(w/2)`` as an exact univariate polynomial."""
    return TrigPoly.from_cosines([Fraction(1, 2), Fraction(1, 2)]) ** m


def s_bracket(kind: int, s: TrigPoly, m: int) -> TrigPoly:
    c = cos_half_power(m) * s
    b = tp_dilate(s, [[2]]) - c
    if kind == 1:
        b = b - tp_shift(c, [math.pi])
    return b


@dataclass(frozen=True)
class SConditionReport:
    min_s: float
    min_bracket: float
    bracket_order: float
    identically_zero: bool
    ell: int

    @property
    def ok(self) -> bool:
        return (self.min_s > 0 and self.min_bracket >= -NONNEG_TOL
                and self.bracket_order >= 2 * self.ell)


def check_s_conditions(kind: int, s: TrigPoly, m: int, ell: int) -> SConditionReport:
    """Positivity, bracket nonnegativity and bracket order ``>= 2*ell`` for a table factor."""
    b = s_bracket(kind, s, m)
    return SConditionReport(
        min_s=float(s.eval_grid(GRID_POINTS).real.min()),
        min_bracket=float(b.eval_grid(GRID_POINTS).real.min()) if not b.is_zero() else 0.0,
        bracket_order=tp_vanishing_order(b),
        identically_zero=b.is_zero() if b.exact else False,
        ell=ell,
    )


@dataclass
class VmrFunction:
    """Vanishing-moment recovery function ``S`` stored through ``1/S``.

    ``reciprocal`` is the trigonometric polynomial ``1/S``; ``factors`` lists
    ``(direction, s, kind, m)`` with ``1/S = prod s(w . direction)``; ``sqrt``
    is a float-mode ``g`` with ``|g|^2 = 1/S`` when known.
    """
    reciprocal: TrigPoly
    factors: list = field(default_factory=list)
    sqrt: TrigPoly | None = None
    meta: dict = field(default_factory=dict)

    @property
    def dim(self) -> int:
        return self.reciprocal.dim

    @property
    def value(self) -> RationalTrigPoly:
        return RationalTrigPoly(TrigPoly.constant(self.dim, 1), self.reciprocal)

    def is_one(self) -> bool:
        return self.reciprocal.exact and self.reciprocal.terms == TrigPoly.constant(self.dim, 1).terms

    def at_origin(self):
        return sum(self.reciprocal.terms.values(), TrigPoly.constant(1, 0).constant_term())

    @classmethod
    def one(cls, dim: int) -> "VmrFunction":
        c = TrigPoly.constant(dim, 1)
        return cls(c, [], c, meta={"note": "S = 1 (unitary case)"})

    @classmethod
    def from_reciprocal(cls, recip: TrigPoly, sqrt: TrigPoly | None = None) -> "VmrFunction":
        return cls(recip, [], sqrt)

    def to_json(self) -> dict:
        return {"reciprocal": self.reciprocal.to_json(),
                "factors": [{"direction": list(d), "s": s.to_json(), "kind": kind, "m": m}
                            for d, s, kind, m in self.factors],
                "sqrt": None if self.sqrt is None else self.sqrt.to_json()}

    @classmethod
    def from_json(cls, obj) -> "VmrFunction":
        return cls(TrigPoly.from_json(obj["reciprocal"]),
                   [(tuple(f["direction"]), TrigPoly.from_json(f["s"]), f["kind"], f["m"])
                    for f in obj["factors"]],
                   None if obj.get("sqrt") is None else TrigPoly.from_json(obj["sqrt"]))


def default_ell(spec: BoxSplineSpec) -> int:
    return max(spec.mu, min(ell for _, ell in S1_TABLE))


def build_vmr(spec: BoxSplineSpec, ell: int | None = None) -> VmrFunction:
    """``1/S`` as kind-1 factors on the basis directions times kind-2 factors on the rest."""
    if ell is None:
        ell = default_ell(spec)
    if ell < spec.mu:
        raise ValueError(f"ell={ell} is below mu={spec.mu}")
    n = spec.dim
    recip = TrigPoly.constant(n, 1)
    sqrt = TrigPoly.constant(n, 1).to_float()
    factors = []
    for j, (xi, m) in enumerate(zip(spec.directions, spec.multiplicities)):
        kind = 1 if j < n else 2
        s = s_table(kind, m, ell)
        rep = check_s_conditions(kind, s, m, ell)
        if not rep.ok:
            raise ValueError(f"table factor s_{kind},{m},{ell} fails its conditions: {rep}")
        factors.append((xi, s, kind, m))
        recip = recip * along(s, xi)
        sqrt = sqrt * along(fejer_riesz(s), xi)
    return VmrFunction(recip, factors, sqrt, meta={"ell": ell, "K": 1})


def oblique_defect(vmr: VmrFunction, tau: TrigPoly, scheme: DilationScheme) -> TrigPoly:
    """``f(S, tau; w) = 1/S(M^T w) - sum_gamma |tau(w+gamma)|^2 / S(w+gamma)``.

    Since ``1/S`` is a polynomial this is one, and the coset sum is taken
    exactly, so the result is exact whenever the inputs are.
    """
    return tp_dilate(vmr.reciprocal, scheme.M) - tp_coset_sum(tau.abs2() * vmr.reciprocal, scheme)


@dataclass(frozen=True)
class SubQmfReport:
    min_f: float
    order_at_zero: float
    grid: int

    @property
    def holds(self) -> bool:
        return self.min_f >= -NONNEG_TOL


def subqmf_report(vmr: VmrFunction, tau: TrigPoly, scheme: DilationScheme,
                  grid: int = 64) -> SubQmfReport:
    f = oblique_defect(vmr, tau, scheme)
    min_f = float(f.eval_grid(grid).real.min()) if not f.is_zero() else 0.0
    return SubQmfReport(min_f=min_f, order_at_zero=tp_vanishing_order(f), grid=grid)


def _checked_sqrt(p: TrigPoly, what: str) -> TrigPoly:
    try:
        return fejer_riesz(p)
    except ValueError as exc:
        raise ValueError(f"{what} is not nonnegative; the construction does not apply "
                         f"(ell / table mismatch?): {exc}") from exc


def telescoping_sos(spec: BoxSplineSpec, vmr: VmrFunction, tau: TrigPoly,
                    scheme: DilationScheme) -> SosCertificate:
    """G-invariant sos certificate for ``f(S, tau; .)`` on a dyadic lattice.

    Generators are returned as functions of ``w`` of the form ``g(2w)``.  The
    base case contributes one product per basis direction whose bracket is not
    identically zero; each further direction contributes the ``2^n`` polyphase
    components of a single product.
    """
    if not scheme.is_dyadic:
        raise ValueError("telescoping_sos needs the dyadic dilation 2I")
    n = spec.dim
    if scheme.dim != n or vmr.dim != n:
        raise ValueError("dimension mismatch between spec, vmr and scheme")
    if len(vmr.factors) != len(spec.directions):
        raise ValueError("vmr factors do not match the spec's directions")
    M = scheme.M

    base = vmr.factors[:n]
    halves = [_checked_sqrt(s, f"s_1 factor {k}") for k, (_, s, _, _) in enumerate(base)]
    t_polys = []
    for xi, s, _, m in base:
        c = cos_half_power(m) * s
        t_polys.append(tp_undilate(c + tp_shift(c, [math.pi]), [[2]]))
    thetas = [_checked_sqrt(t, f"t factor {k}") for k, t in enumerate(t_polys)]

    gens: list[TrigPoly] = []
    provenance: list[str] = []
    for k, (xi, s, _, m) in enumerate(base):
        bracket = s - t_polys[k]
        if bracket.is_zero():
            continue
        g = along(_checked_sqrt(bracket, f"base bracket {k}"), xi)
        for j in range(k + 1, n):
            g = g * along(halves[j], base[j][0])
        for j in range(k):
            g = g * along(thetas[j], base[j][0])
        gens.append(tp_dilate(g, M))
        provenance.append(f"base:{k}")

    tau1 = TrigPoly.constant(n, 1)
    recip1 = TrigPoly.constant(n, 1)
    sqrt1 = TrigPoly.constant(n, 1).to_float()
    for (xi, s, _, m), h in zip(base, halves):
        tau1 = tau1 * elementary_factor(xi) ** m
        recip1 = recip1 * along(s, xi)
        sqrt1 = sqrt1 * along(h, xi)

    for idx, (xi, s2, _, m) in enumerate(vmr.factors[n:], start=n):
        sigma = _checked_sqrt(s2, f"s_2 factor {idx}")
        lift = tp_dilate(along(sigma, xi), M)
        gens = [g * lift for g in gens]
        bracket = s_bracket(2, s2, m)
        if not bracket.is_zero():
            g = tau1 * sqrt1 * along(_checked_sqrt(bracket, f"induction bracket {idx}"), xi)
            for nu, part in zip(scheme.Gamma, tp_polyphase(g, scheme).components()):
                if not part.is_zero():
                    gens.append(tp_dilate(part, M))
                    provenance.append(f"induction:{idx}:{nu}")
        tau1 = tau1 * elementary_factor(xi) ** m
        recip1 = recip1 * along(s2, xi)
        sqrt1 = sqrt1 * along(sigma, xi)

    if tau.exact and not tau.equals(tau1):
        raise ValueError("lowpass mask does not match the box-spline spec")
    if not vmr.reciprocal.equals(recip1, tol=0.0 if vmr.reciprocal.exact else 1e-12):
        raise ValueError("vmr function does not match the tabulated factors")
    bound = n + 2 ** n * (len(spec.directions) - n)
    if len(gens) > bound:
        raise RuntimeError(f"{len(gens)} generators exceed the bound {bound}")

    target = oblique_defect(vmr, tau, scheme)
    cert = SosCertificate(target, gens, g_invariant=True, scheme=scheme,
                          meta={"provenance": provenance})
    grid = {1: 256, 2: 64, 3: 16}.get(n, 8)
    rep = verify_sos_certificate(cert, grid)
    scale = max(1.0, float(np.max(np.abs(target.eval_grid(grid)))) if not target.is_zero() else 1.0)
    if rep.max_residual > SOS_RESIDUAL_TOL * scale:
        raise ArithmeticError(f"telescoping certificate residual {rep.max_residual:.3e}")
    cert.meta["residual"] = rep.max_residual
    return cert
