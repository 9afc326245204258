"""Highpass mask construction from an sos certificate and the oblique extension identity checks."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .boxframe import VmrFunction, oblique_defect, subqmf_report
from .lattice import DilationScheme, roll_to
from .specfactor import POLE_GUARD, SosCertificate
from .trigring import (RationalTrigPoly, TrigPoly, exp_monomial, tp_coset_sum, tp_dilate,
                       tp_vanishing_order)

OEP_TOL = 1e-9
AMATRIX_TOL = 1e-10
AMATRIX_POINTS = 64
DEN_GUARD = 1e-8
ZERO_MASK_REL = 1e-13


def default_grid(scheme: DilationScheme) -> int:
    """Per-dimension grid size: 64 up to 2-D, 16 in 3-D, 8 beyond, made compatible with Gamma*."""
    base = {1: 64, 2: 64, 3: 16}.get(scheme.dim, 8)
    step = 1
    for g in scheme.gamma_star_frac:
        for x in g:
            step = math.lcm(step, x.denominator)
    return step * max(1, -(-base // step)) if base % step else base


def inv_sqrt_q(Q: int):
    r = math.isqrt(Q)
    return Fraction(1, r) if r * r == Q else 1.0 / math.sqrt(Q)


@dataclass
class MaskBank:
    """Lowpass mask, vmr function and highpass masks on one dilation lattice."""
    scheme: DilationScheme
    lowpass: TrigPoly
    vmr: VmrFunction
    highpass: list
    provenance: list
    J: int = 0
    K: int = 1
    report: dict = field(default_factory=dict)
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.highpass = [RationalTrigPoly.lift(q) for q in self.highpass]
        if len(self.provenance) != len(self.highpass):
            raise ValueError("one provenance tag per highpass mask is required")

    @property
    def r(self) -> int:
        return len(self.highpass)

    @property
    def M_count(self) -> int:
        return self.scheme.Q * self.K

    @property
    def dim(self) -> int:
        return self.scheme.dim

    def r_bound(self) -> int:
        return 2 ** self.dim * (1 + self.scheme.Q)

    def with_highpass(self, highpass, provenance=None) -> "MaskBank":
        return MaskBank(self.scheme, self.lowpass, self.vmr, list(highpass),
                        list(provenance or self.provenance), self.J, self.K, {}, dict(self.meta))


@dataclass
class AMatrix:
    """Columns ``a_m`` whose Gamma*-shift vectors form a matrix ``A`` with ``A A^* = Sigma^{-1}``."""
    columns: list
    sors: list
    labels: list
    meta: dict = field(default_factory=dict)

    @property
    def count(self) -> int:
        return len(self.columns)

    def evaluate(self, scheme: DilationScheme, w) -> np.ndarray:
        """``A(w)``: rows indexed by ``gamma``, columns by ``m``."""
        w = np.asarray(w, dtype=float)
        pts = w[None, :] + scheme.GammaStar
        return np.stack([np.asarray(a(pts)) for a in self.columns], axis=1)


def build_amatrix(vmr: VmrFunction, scheme: DilationScheme, sors: list | None = None,
                  seed: int = 0) -> AMatrix:
    """``a_{(nu, j)}(w) = Q^{-1/2} exp(1j nu.w) s_j(w)`` from a sum of squares ``1/S = sum |s_j|^2``."""
    if sors is None:
        if vmr.sqrt is None:
            raise ValueError("no sum-of-squares representation of 1/S is available")
        sors = [vmr.sqrt]
    sors = list(sors)
    scale = inv_sqrt_q(scheme.Q)
    cols, labels = [], []
    for j, s in enumerate(sors):
        for nu in scheme.Gamma:
            cols.append(exp_monomial(nu, +1) * s * scale)
            labels.append((tuple(nu), j))
    amat = AMatrix(cols, sors, labels, meta={})
    if amat.count > 2 ** scheme.dim * scheme.Q:
        raise ValueError("too many A-matrix columns")

    rng = np.random.default_rng(seed)
    worst = 0.0
    for w in rng.uniform(-np.pi, np.pi, size=(AMATRIX_POINTS, scheme.dim)):
        pts = w[None, :] + scheme.GammaStar
        recip = np.asarray(vmr.reciprocal(pts))
        A = amat.evaluate(scheme, w)
        worst = max(worst, float(np.max(np.abs(A @ A.conj().T - np.diag(recip)))))
    if worst > AMATRIX_TOL * max(1.0, vmr.reciprocal.coefficient_l1()):
        raise ValueError(f"supplied sors does not reproduce 1/S (A A* residual {worst:.3e})")
    amat.meta["residual"] = worst
    return amat


def _mask_is_zero(q: RationalTrigPoly) -> bool:
    if q.num.is_zero():
        return True
    if q.num.exact:
        return False
    scale = max(1.0, q.den.coefficient_l1())
    return max(abs(c) for c in q.num.terms.values()) <= ZERO_MASK_REL * scale


def q1_mask(tau: TrigPoly, vmr: VmrFunction, G: RationalTrigPoly, scheme: DilationScheme
            ) -> RationalTrigPoly:
    """``S(M^T w) tau(w) conj(G(w))`` for a G-invariant generator ``G``."""
    G = RationalTrigPoly.lift(G)
    return RationalTrigPoly(tau * G.num.conj(), tp_dilate(vmr.reciprocal, scheme.M) * G.den.conj())


def q2_mask(tau: TrigPoly, vmr: VmrFunction, a: TrigPoly, scheme: DilationScheme
            ) -> RationalTrigPoly:
    """``S(w) a(w) - S(M^T w) tau(w) sum_gamma conj(tau(w+gamma)) a(w+gamma)``."""
    recip = vmr.reciprocal
    drecip = tp_dilate(recip, scheme.M)
    coset = tp_coset_sum(tau.conj() * a, scheme)
    return RationalTrigPoly(a * drecip - tau * coset * recip, recip * drecip)


def construct_highpass(tau: TrigPoly, vmr: VmrFunction, cert: SosCertificate, amat: AMatrix,
                       scheme: DilationScheme, grid: int | None = None,
                       tol: float = OEP_TOL) -> MaskBank:
    """Highpass masks from a G-invariant sos of ``f(S, tau; .)`` and an A-matrix."""
    if not cert.g_invariant:
        raise ValueError("certificate must be G-invariant")
    cert.scheme = cert.scheme or scheme
    cert.check_g_invariance()
    grid = grid or default_grid(scheme)
    sub = subqmf_report(vmr, tau, scheme, grid)
    if not sub.holds:
        raise ValueError(f"oblique sub-QMF condition fails (min f = {sub.min_f:.3e})")

    masks, tags, dropped = [], [], []
    candidates = [(f"q1:{j}", q1_mask(tau, vmr, G, scheme))
                  for j, G in enumerate(cert.generators)]
    candidates += [(f"q2:{m}", q2_mask(tau, vmr, a, scheme))
                   for m, a in enumerate(amat.columns)]
    for tag, q in candidates:
        if _mask_is_zero(q):
            dropped.append(tag)
        else:
            masks.append(q)
            tags.append(tag)

    K = max(1, len(amat.sors))
    bank = MaskBank(scheme, tau, vmr, masks, tags, J=len(cert.generators), K=K,
                    meta={"dropped": dropped, "construction": "sos+amatrix"})
    if bank.r > bank.r_bound():
        raise RuntimeError(f"r = {bank.r} exceeds the bound {bank.r_bound()}")
    rep = verify_oep(bank, grid)
    if rep.max_residual > tol:
        raise ArithmeticError(f"OEP residual {rep.max_residual:.3e} at gamma {rep.worst_gamma}, "
                              f"w = {rep.worst_point}")
    bank.report["oep"] = rep.as_dict()
    return bank


@dataclass(frozen=True)
class OepReport:
    max_residual: float
    per_gamma: dict
    worst_gamma: tuple
    worst_point: tuple
    points: int
    uep_min_f: float | None = None

    def as_dict(self) -> dict:
        out = {"maxResidual": self.max_residual, "perGamma": dict(self.per_gamma),
               "points": self.points}
        if self.uep_min_f is not None:
            out["uepMinF"] = self.uep_min_f
        return out


def _grid_dims(scheme: DilationScheme, grid) -> tuple:
    return (grid,) * scheme.dim if np.isscalar(grid) else tuple(grid)


def _gamma_key(frac) -> str:
    return "(" + ", ".join(str(x) for x in frac) + ")*2pi"


def verify_oep(bank: MaskBank, grid: int | None = None) -> OepReport:
    """Grid residual of ``S(M^T w) tau tau^gamma* + sum q q^gamma* - S(w) delta(gamma)``."""
    scheme = bank.scheme
    Ns = _grid_dims(scheme, grid or default_grid(scheme))
    shifts = scheme.grid_shift(Ns)
    recip = bank.vmr.reciprocal.eval_grid(Ns)
    drecip = tp_dilate(bank.vmr.reciprocal, scheme.M).eval_grid(Ns)
    tau = RationalTrigPoly.lift(bank.lowpass)
    tau_v = tau.eval_grid(Ns)
    ok = (np.abs(recip) > DEN_GUARD) & (np.abs(drecip) > DEN_GUARD) & (np.abs(tau.den.eval_grid(Ns)) > POLE_GUARD)
    qs = []
    for q in bank.highpass:
        d = q.den.eval_grid(Ns)
        ok &= np.abs(d) > POLE_GUARD
        qs.append(q.num.eval_grid(Ns) / np.where(ok, d, 1.0))
    S = 1.0 / np.where(ok, recip, 1.0)
    SM = 1.0 / np.where(ok, drecip, 1.0)

    per, worst, worst_g, worst_pt = {}, -1.0, None, None
    for idx, s in enumerate(shifts):
        mask = ok & roll_to(ok, s)
        acc = SM * tau_v * np.conj(roll_to(tau_v, s))
        for q in qs:
            acc = acc + q * np.conj(roll_to(q, s))
        if scheme.is_zero_shift(idx):
            acc = acc - S
        res = np.where(mask, np.abs(acc), 0.0)
        r = float(res.max())
        per[_gamma_key(scheme.gamma_star_frac[idx])] = r
        if r > worst:
            worst, worst_g = r, scheme.gamma_star_frac[idx]
            j = np.unravel_index(int(np.argmax(res)), Ns)
            worst_pt = tuple(float(2 * np.pi * a / n) for a, n in zip(j, Ns))

    uep = None
    if bank.vmr.is_one():
        tot = sum(np.abs(roll_to(tau_v, s)) ** 2 for s in shifts)
        uep = float(np.min(1.0 - tot))
    return OepReport(max_residual=worst, per_gamma=per, worst_gamma=worst_g,
                     worst_point=worst_pt, points=int(ok.sum()), uep_min_f=uep)


@dataclass(frozen=True)
class BankSubQmfReport:
    min_f: float

    @property
    def holds(self) -> bool:
        return self.min_f >= -OEP_TOL


def subqmf_from_oep(bank: MaskBank, grid: int | None = None) -> BankSubQmfReport:
    """``1/S(M^T w) - sum_gamma |tau^gamma|^2 / S^gamma`` sampled directly on the grid."""
    scheme = bank.scheme
    Ns = _grid_dims(scheme, grid or default_grid(scheme))
    shifts = scheme.grid_shift(Ns)
    recip = bank.vmr.reciprocal.eval_grid(Ns).real
    drecip = tp_dilate(bank.vmr.reciprocal, scheme.M).eval_grid(Ns).real
    tau_v = RationalTrigPoly.lift(bank.lowpass).eval_grid(Ns)
    f = drecip - sum(np.abs(roll_to(tau_v, s)) ** 2 * roll_to(recip, s) for s in shifts)
    return BankSubQmfReport(min_f=float(np.min(f)))


@dataclass(frozen=True)
class AdmissibilityReport:
    S0: object
    min_den: float
    min_S: float
    max_S: float

    @property
    def passed(self) -> bool:
        return self.S0 == 1 and self.min_den > DEN_GUARD and self.min_S > 0


def vmr_admissible(vmr: VmrFunction, grid: int = 64) -> AdmissibilityReport:
    """``S(0) = 1`` exactly, ``1/S`` bounded away from zero, and the range of ``S`` on the grid."""
    recip = vmr.reciprocal
    total = sum(recip.terms.values()) if recip.terms else 0
    if recip.exact:
        S0 = Fraction(1, 1) / _to_fraction(total) if total else math.inf
    else:
        S0 = 1.0 / complex(total).real if total else math.inf
    vals = recip.eval_grid(grid).real
    min_den = float(np.min(np.abs(vals)))
    S = 1.0 / vals
    return AdmissibilityReport(S0=S0, min_den=min_den, min_S=float(S.min()), max_S=float(S.max()))


def _to_fraction(q) -> Fraction:
    if q.y:
        raise ValueError("S(0) is not real")
    return Fraction(int(q.x.numerator), int(q.x.denominator))


@dataclass(frozen=True)
class MomentReport:
    accuracy: float
    f_order: float
    diff_order: float
    min_mask_order: float
    mask_orders: tuple

    @property
    def mask_bound_holds(self) -> bool:
        return self.min_mask_order >= (math.inf if self.diff_order == math.inf
                                       else self.diff_order // 2)

    @property
    def diff_bound_holds(self) -> bool:
        return self.diff_order >= min(self.f_order, 2 * self.accuracy)

    @property
    def holds(self) -> bool:
        return self.mask_bound_holds and self.diff_bound_holds


def moment_report(bank: MaskBank, strict: bool = False) -> MomentReport:
    """Accuracy of ``tau``, orders of ``f(S,tau;.)`` and ``S - S(M^T.)|tau|^2``, and mask orders."""
    scheme = bank.scheme
    tau = bank.lowpass
    if not isinstance(tau, TrigPoly):
        raise TypeError("moment_report needs a polynomial lowpass mask")
    a = min((tp_vanishing_order(tau, g) for g in scheme.GammaStar[1:]), default=math.inf)
    m = tp_vanishing_order(oblique_defect(bank.vmr, tau, scheme))
    recip = bank.vmr.reciprocal
    j = tp_vanishing_order(tp_dilate(recip, scheme.M) - tau.abs2() * recip)
    orders = tuple(tp_vanishing_order(q) for q in bank.highpass)
    rep = MomentReport(accuracy=a, f_order=m, diff_order=j,
                       min_mask_order=min(orders, default=math.inf), mask_orders=orders)
    if strict and not rep.holds:
        raise AssertionError(f"moment bounds violated (implementation bug): {rep}")
    return rep
