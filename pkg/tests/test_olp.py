from fractions import Fraction

import numpy as np
import pytest

from obliqueframes.boxframe import VmrFunction
from obliqueframes.lattice import build_scheme
from obliqueframes.oepkit import build_amatrix, construct_highpass, verify_oep
from obliqueframes.olp import (eval_pyramid, factorize_variant, sqrt_of_ratio_univariate,
                               verify_scaling_identity)
from obliqueframes.specfactor import SosCertificate
from obliqueframes.trigring import TrigPoly

D1 = build_scheme([[2]])
D2 = build_scheme([[2, 0], [0, 2]])
HAAR = TrigPoly(1, {(0,): Fraction(1, 2), (1,): Fraction(1, 2)})


def test_haar_pyramid_at_origin():
    ev = eval_pyramid(VmrFunction.one(1), HAAR, D1, [0.0])
    np.testing.assert_allclose(ev.H.ravel(), [1, 0], atol=1e-15)
    R = np.vstack([ev.SM * ev.H.conj().T, ev.X.conj().T])
    np.testing.assert_allclose(ev.Phi @ R, np.eye(2), atol=1e-15)
    assert ev.a == pytest.approx(1.0)


def test_example_pyramid(box2d):
    bank, _ = box2d
    ev = eval_pyramid(bank.vmr, bank.lowpass, D2, [0.3, -1.1])
    assert ev.right_inverse_residual() <= 1e-10
    assert ev.Phi.shape == (4, 5)
    origin = eval_pyramid(bank.vmr, bank.lowpass, D2, [0.0, 0.0])
    assert origin.a == pytest.approx(1.0, abs=1e-12)


def test_scaling_identity(box2d):
    bank, _ = box2d
    assert verify_scaling_identity(bank.vmr, bank.lowpass, D2, 64).max_residual <= 1e-9
    assert verify_scaling_identity(VmrFunction.one(1), HAAR, D1, 64).max_residual <= 1e-12


def test_scaling_identity_without_subqmf(rng):
    # the identity is algebraic: it holds even when 1 - sum |tau^gamma|^2 is negative
    tau = TrigPoly(1, {(0,): 0.9, (1,): 0.4, (2,): -0.3})
    assert tau(np.zeros(1)) == pytest.approx(1.0)
    rep = verify_scaling_identity(VmrFunction.one(1), tau, D1, 32)
    assert rep.max_residual <= 1e-12


def test_variant1_matches_construct_highpass_float(box2d):
    bank, cert = box2d
    b1 = factorize_variant(1, bank.vmr, bank.lowpass, D2, cert=cert)
    assert b1.r == bank.r
    for p, q in zip(b1.highpass, bank.highpass):
        np.testing.assert_allclose(p.eval_grid(16), q.eval_grid(16), atol=1e-12)


def test_variant1_exact_equality():
    tau = TrigPoly(2, {(0, 0): Fraction(1, 4), (1, 0): Fraction(1, 4), (0, 1): Fraction(1, 4),
                       (1, 1): Fraction(1, 4)})
    one = VmrFunction.one(2)
    cert = SosCertificate(TrigPoly.zero(2), [], g_invariant=True, scheme=D2)
    A = build_amatrix(one, D2)
    bank = construct_highpass(tau, one, cert, A, D2)
    b1 = factorize_variant(1, one, tau, D2, cert=cert, amat=A)
    assert all(q.exact for q in bank.highpass)
    assert len(b1.highpass) == len(bank.highpass)
    assert all(p.equals(q) for p, q in zip(b1.highpass, bank.highpass))


def test_variant2_univariate():
    tau = HAAR ** 2
    one = VmrFunction.one(1)
    g = sqrt_of_ratio_univariate(one, tau, D1)
    # a/S = 2 - cos^4 - sin^4 at half angle = (5 - cos xi)/4
    want = TrigPoly.from_cosines([Fraction(5, 4), Fraction(-1, 4)])
    assert g.abs2().equals(want, tol=1e-12)
    bank = factorize_variant(2, one, tau, D1, g=g)
    assert bank.lowpass(np.zeros(1)) == pytest.approx(1.0)
    assert bank.r == 2 and verify_oep(bank, 64).max_residual <= 1e-12
    with pytest.raises(ValueError):
        factorize_variant(2, one, tau, D1, g=TrigPoly.constant(1, 1))


def test_variant3_degenerates_to_variant1():
    one = VmrFunction.one(1)
    cert = SosCertificate(TrigPoly.zero(1), [], g_invariant=True, scheme=D1)
    b3 = factorize_variant(3, one, HAAR, D1, cert=cert, g0=TrigPoly.constant(1, 1))
    b1 = factorize_variant(1, one, HAAR, D1, cert=cert)
    assert all(p.equals(q, tol=1e-15) for p, q in zip(b3.highpass, b1.highpass))
    with pytest.raises(ValueError):
        factorize_variant(3, one, HAAR, D1, cert=cert, g0=TrigPoly.constant(1, 2))


def test_variant3_with_nontrivial_g0():
    # tau = haar^2, S = 1: a/S = 1 + f with f = sin^2(xi)/2 at xi = 2w; take g0 = FR factor
    tau = HAAR ** 2
    one = VmrFunction.one(1)
    g0 = sqrt_of_ratio_univariate(one, tau, D1)
    cert = SosCertificate(TrigPoly.zero(1), [], g_invariant=True, scheme=D1)
    bank = factorize_variant(3, one, tau, D1, cert=cert, g0=g0)
    assert verify_oep(bank, 64).max_residual <= 1e-12


def test_variant_errors(box2d):
    bank, _ = box2d
    with pytest.raises(ValueError):
        factorize_variant(1, bank.vmr, bank.lowpass, D2)
    with pytest.raises(ValueError):
        factorize_variant(4, bank.vmr, bank.lowpass, D2)
