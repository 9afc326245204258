"""Oblique Laplacian pyramid matrix, its diagonal rescaling, and the three factorization variants."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .boxframe import VmrFunction, oblique_defect
from .lattice import DilationScheme, fourier_matrix
from .oepkit import (OEP_TOL, AMatrix, MaskBank, _mask_is_zero, build_amatrix, default_grid,
                     inv_sqrt_q, q1_mask, verify_oep)
from .specfactor import POLE_GUARD, SosCertificate, fejer_riesz, verify_sos_certificate
from .trigring import (RationalTrigPoly, TrigPoly, exp_monomial, tp_coset_sum, tp_dilate,
                       tp_polyphase, tp_undilate)

CERT_TOL = 1e-9


@dataclass(frozen=True)
class PyramidEval:
    """Pyramid quantities at one frequency ``w``."""
    w: np.ndarray
    H: np.ndarray
    X: np.ndarray
    Sigma: np.ndarray
    Phi: np.ndarray
    SM: float
    a: float

    @property
    def Q(self) -> int:
        return self.H.shape[0]

    def right_inverse_residual(self) -> float:
        R = np.vstack([self.SM * self.H.conj().T, self.X.conj().T])
        return float(np.max(np.abs(self.Phi @ R - self.Sigma)))

    def scaling_matrix(self) -> np.ndarray:
        Q = self.Q
        D = np.zeros((Q + 1, Q + 1), dtype=complex)
        D[0, 0] = self.a
        D[1:, 1:] = self.X.conj().T @ np.linalg.inv(self.Sigma) @ self.X
        return D

    def scaling_residual(self) -> float:
        return float(np.max(np.abs(self.Phi @ self.scaling_matrix() @ self.Phi.conj().T
                                   - self.Sigma)))


def _dilated_point(scheme: DilationScheme, w: np.ndarray) -> np.ndarray:
    return np.asarray(scheme.M, dtype=float).T @ w


def eval_pyramid(vmr: VmrFunction, tau, scheme: DilationScheme, w) -> PyramidEval:
    """``Phi = [H | (Sigma - S(M^T w) H H^*) X]`` and ``a(M^T w)`` at a single frequency."""
    w = np.asarray(w, dtype=float).reshape(-1)
    pts = w[None, :] + scheme.GammaStar
    recip = np.asarray(vmr.reciprocal(pts))
    recip_m = complex(vmr.reciprocal(_dilated_point(scheme, w)))
    if np.min(np.abs(recip)) < POLE_GUARD or abs(recip_m) < POLE_GUARD:
        raise ZeroDivisionError(f"S has a pole near w = {w}")
    H = np.asarray(tau(pts)).reshape(-1, 1)
    X = fourier_matrix(scheme, w)
    Sigma = np.diag(1.0 / recip)
    SM = (1.0 / recip_m).real
    Phi = np.hstack([H, (Sigma - SM * H @ H.conj().T) @ X])
    quad = (H.conj().T @ np.diag(recip) @ H).item().real
    a = SM * (2.0 - SM * quad)
    return PyramidEval(w=w, H=H, X=X, Sigma=Sigma, Phi=Phi, SM=SM, a=a)


@dataclass(frozen=True)
class ScalingReport:
    max_residual: float
    right_inverse_residual: float
    points: int

    @property
    def passed(self) -> bool:
        return self.max_residual <= OEP_TOL


def _grid_points(dim: int, grid) -> np.ndarray:
    Ns = (grid,) * dim if np.isscalar(grid) else tuple(grid)
    axes = [2 * np.pi * np.arange(n) / n for n in Ns]
    return np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, dim)


def verify_scaling_identity(vmr: VmrFunction, tau, scheme: DilationScheme,
                            grid: int | None = None) -> ScalingReport:
    """Max over the grid of ``|Phi D Phi^* - Sigma|`` with ``D = diag(a, X^* Sigma^{-1} X)``."""
    worst = worst_ri = 0.0
    count = 0
    for w in _grid_points(scheme.dim, grid or default_grid(scheme)):
        try:
            ev = eval_pyramid(vmr, tau, scheme, w)
        except ZeroDivisionError:
            continue
        worst = max(worst, ev.scaling_residual())
        worst_ri = max(worst_ri, ev.right_inverse_residual())
        count += 1
    return ScalingReport(max_residual=worst, right_inverse_residual=worst_ri, points=count)


def pyramid_columns(vmr: VmrFunction, tau: TrigPoly, scheme: DilationScheme) -> list:
    """Rational functions ``p_nu`` whose Gamma*-shifts form the block ``(Sigma - S(M^T) H H^*) X``."""
    recip = vmr.reciprocal
    drecip = tp_dilate(recip, scheme.M)
    scale = inv_sqrt_q(scheme.Q)
    cols = []
    for nu in scheme.Gamma:
        e = exp_monomial(nu, +1)
        num = e * drecip - tau * tp_coset_sum(tau.conj() * e, scheme) * recip
        cols.append(RationalTrigPoly(num * scale, recip * drecip))
    return cols


def _b_block_masks(vmr: VmrFunction, tau: TrigPoly, amat: AMatrix, scheme: DilationScheme) -> list:
    """``Phi``'s second block times ``X^* A``: entry ``(nu, m)`` of ``X^* A`` is the dilated polyphase part."""
    cols = pyramid_columns(vmr, tau, scheme)
    out = []
    for a in amat.columns:
        pp = tp_polyphase(a, scheme)
        acc = None
        for p_nu, nu in zip(cols, scheme.Gamma):
            term = p_nu * tp_dilate(pp.component(nu), scheme.M)
            acc = term if acc is None else acc + term
        out.append(acc)
    return out


def _check_cert_identity(lhs: TrigPoly, what: str) -> None:
    if lhs.exact:
        if not lhs.is_zero():
            raise ValueError(f"{what} certificate identity fails exactly")
        return
    if not lhs.is_zero() and max(abs(c) for c in lhs.terms.values()) > CERT_TOL:
        raise ValueError(f"{what} certificate identity fails "
                         f"(max coefficient {max(abs(c) for c in lhs.terms.values()):.3e})")


def _normalize_at_origin(g: TrigPoly) -> TrigPoly:
    v = complex(g(np.zeros(g.dim)))
    if abs(v) < 1e-12:
        raise ValueError("modified lowpass factor vanishes at the origin")
    if g.exact and v == 1:
        return g
    return g * (abs(v) / v)


def factorize_variant(variant: int, vmr: VmrFunction, tau: TrigPoly, scheme: DilationScheme,
                      cert: SosCertificate | None = None, g: TrigPoly | None = None,
                      g0: TrigPoly | None = None, amat: AMatrix | None = None,
                      grid: int | None = None) -> MaskBank:
    """Masks read off ``Phi_{S,tau}(w) B(M^T w)`` for one of three block forms of ``B``.

    ``variant=1``: ``B = [[1, S G^*, 0], [0, 0, X^* A]]`` with ``cert`` a G-invariant sos of
    ``f(S, tau; .)`` (generators written in ``w``).
    ``variant=2``: ``B = [[g, 0], [0, X^* A]]`` with ``|g(xi)|^2 = a(xi)/S(xi)``.
    ``variant=3``: ``B = [[g0, S G^*, 0], [0, 0, X^* A]]`` with
    ``|g0|^2 + S sum |g_j|^2 = a/S`` and ``g0(0) = 1``.
    ``g`` and ``g0`` are functions of ``xi = M^T w``.
    """
    if amat is None:
        amat = build_amatrix(vmr, scheme)
    recip = vmr.reciprocal
    drecip = tp_dilate(recip, scheme.M)
    f = oblique_defect(vmr, tau, scheme)
    q2 = _b_block_masks(vmr, tau, amat, scheme)
    tags2 = [f"pyramid:v{variant}:q2:{m}" for m in range(len(q2))]

    if variant == 1:
        if cert is None:
            raise ValueError("variant 1 needs an sos certificate of f(S, tau; .)")
        _check_cert(cert, f, scheme)
        lowpass = tau
        q1 = [q1_mask(tau, vmr, G, scheme) for G in cert.generators]
    elif variant == 2:
        if g is None:
            raise ValueError("variant 2 needs a square-root factor g")
        gd = tp_dilate(g, scheme.M)
        # |g(M^T w)|^2 = a(M^T w)/S(M^T w) = 1 + S(M^T w) f(w)
        _check_cert_identity(drecip * gd.abs2() - drecip - f, "a/S")
        lowpass = tp_dilate(_normalize_at_origin(g), scheme.M) * tau
        q1 = []
    elif variant == 3:
        if g0 is None or cert is None:
            raise ValueError("variant 3 needs g0 and an sos certificate")
        if abs(complex(g0(np.zeros(g0.dim))) - 1) > 1e-12:
            raise ValueError("variant 3 requires g0(0) = 1")
        gd = tp_dilate(g0, scheme.M)
        resid = drecip * (gd.abs2() - 1) - f
        for G in cert.generators:
            G = RationalTrigPoly.lift(G)
            if not G.is_polynomial():
                raise ValueError("variant 3 takes polynomial generators")
            resid = resid + G.num.abs2()
        _check_cert_identity(resid, "mixed")
        lowpass = gd * tau
        q1 = [q1_mask(tau, vmr, G, scheme) for G in cert.generators]
    else:
        raise ValueError("variant must be 1, 2 or 3")

    masks, tags = [], []
    for j, q in enumerate(q1):
        if not q.is_zero():
            masks.append(q)
            tags.append(f"pyramid:v{variant}:q1:{j}")
    for q, t in zip(q2, tags2):
        if not _mask_is_zero(q):
            masks.append(q)
            tags.append(t)
    bank = MaskBank(scheme, lowpass, vmr, masks, tags, J=len(q1), K=max(1, len(amat.sors)),
                    meta={"construction": f"pyramid variant {variant}"})
    rep = verify_oep(bank, grid or default_grid(scheme))
    if rep.max_residual > OEP_TOL:
        raise ArithmeticError(f"variant {variant} bank fails the OEP check ({rep.max_residual:.3e})")
    bank.report["oep"] = rep.as_dict()
    return bank


def _check_cert(cert: SosCertificate, f: TrigPoly, scheme: DilationScheme) -> None:
    cert.scheme = cert.scheme or scheme
    if not cert.g_invariant:
        raise ValueError("certificate must be G-invariant")
    cert.check_g_invariance()
    if not RationalTrigPoly.lift(cert.target).equals(f, tol=0.0 if f.exact and cert.target.exact
                                                     else CERT_TOL):
        raise ValueError("certificate target is not f(S, tau; .)")
    rep = verify_sos_certificate(cert, max(8, default_grid(scheme)))
    if rep.max_residual > CERT_TOL:
        raise ValueError(f"certificate residual {rep.max_residual:.3e}")


def sqrt_of_ratio_univariate(vmr: VmrFunction, tau: TrigPoly, scheme: DilationScheme) -> TrigPoly:
    """Fejer-Riesz factor ``g`` of ``a/S`` for univariate inputs with constant ``S``.

    ``a(xi)/S(xi) = 1 + S f(w)`` at ``xi = M^T w``; with ``S`` constant this is a
    polynomial in ``xi`` and can be factored directly.
    """
    if scheme.dim != 1:
        raise ValueError("only univariate inputs are supported")
    recip = vmr.reciprocal
    if len(recip.terms) != 1 or (0,) not in recip.terms:
        raise ValueError("S must be constant for a polynomial square-root factor")
    f = oblique_defect(vmr, tau, scheme)
    ratio = TrigPoly.constant(1, 1) + tp_undilate(f, scheme.M) / recip.constant_term()
    return _normalize_at_origin(fejer_riesz(ratio))
