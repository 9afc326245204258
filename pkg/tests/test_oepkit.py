import math
from fractions import Fraction

import numpy as np
import pytest

from obliqueframes.boxframe import VmrFunction, build_vmr
from obliqueframes.lattice import build_scheme
from obliqueframes.oepkit import (MaskBank, build_amatrix, construct_highpass, moment_report,
                                  subqmf_from_oep, verify_oep, vmr_admissible)
from obliqueframes.pipeline import example_spec
from obliqueframes.specfactor import SosCertificate, verify_sos_certificate
from obliqueframes.trigring import TrigPoly

D1 = build_scheme([[2]])


def sigma_inverse(vmr, scheme, w):
    return np.diag(np.asarray(vmr.reciprocal(w[None, :] + scheme.GammaStar)))


def test_amatrix_unitary_case():
    A = build_amatrix(VmrFunction.one(1), D1)
    assert A.count == 2
    w = np.array([0.9])
    vals = [complex(a(w)) for a in A.columns]
    np.testing.assert_allclose(vals, [2 ** -0.5, 2 ** -0.5 * np.exp(0.9j)], atol=1e-15)


def test_amatrix_example(rng):
    scheme = build_scheme([[2, 0], [0, 2]])
    vmr = build_vmr(example_spec(2))
    A = build_amatrix(vmr, scheme)
    assert A.count == 4 and A.meta["residual"] <= 1e-10
    w = np.array([0.3, -1.1])
    np.testing.assert_allclose(complex(A.columns[0](w)), 0.5 * complex(vmr.sqrt(w)))
    for w in rng.uniform(-np.pi, np.pi, size=(8, 2)):
        Am = A.evaluate(scheme, w)
        np.testing.assert_allclose(Am @ Am.conj().T, sigma_inverse(vmr, scheme, w), atol=1e-10)


def test_amatrix_rejects_wrong_sors():
    vmr = build_vmr(example_spec(2))
    with pytest.raises(ValueError):
        build_amatrix(vmr, build_scheme([[2, 0], [0, 2]]), sors=[TrigPoly.constant(2, 1.0)])


def test_haar_masks(haar_bank):
    bank, _ = haar_bank
    assert bank.r == 2 and bank.J == 0
    w = np.linspace(-3, 3, 7)[:, None]
    tau = (1 + np.exp(-1j * w[:, 0])) / 2
    e = np.exp(1j * w[:, 0])
    np.testing.assert_allclose(bank.highpass[0](w), 2 ** -0.5 * (1 - tau), atol=1e-15)
    # conj(tau) e^{iw} = (e^{iw} + e^{2iw})/2 keeps only e^{2iw}/2 after the coset sum
    np.testing.assert_allclose(bank.highpass[1](w), 2 ** -0.5 * (e - tau * e ** 2), atol=1e-15)
    assert verify_oep(bank, 64).max_residual <= 1e-12


def test_example_bank(box2d):
    bank, cert = box2d
    assert bank.r == 8 and bank.r <= bank.r_bound() == 20
    assert [t.split(":")[0] for t in bank.provenance] == ["q1"] * 4 + ["q2"] * 4
    rep = verify_oep(bank, 64)
    assert rep.max_residual <= 1e-9 and len(rep.per_gamma) == 4
    assert verify_sos_certificate(cert, 64).max_residual <= 1e-10


def test_corrupted_bank_is_detected(box2d):
    bank, _ = box2d
    hp = list(bank.highpass)
    hp[3] = hp[3] * 1.01
    assert verify_oep(bank.with_highpass(hp), 64).max_residual > 1e-4


def test_subqmf_required():
    tau = TrigPoly.constant(1, 1)
    with pytest.raises(ValueError):
        construct_highpass(tau, VmrFunction.one(1), SosCertificate(TrigPoly.zero(1), [], True, D1),
                           build_amatrix(VmrFunction.one(1), D1), D1)


def test_non_square_q_bank():
    scheme = build_scheme([[3]])
    tau = TrigPoly(1, {(0,): Fraction(1, 3), (1,): Fraction(1, 3), (2,): Fraction(1, 3)})
    one = VmrFunction.one(1)
    cert = SosCertificate(TrigPoly.zero(1), [], g_invariant=True, scheme=scheme)
    bank = construct_highpass(tau, one, cert, build_amatrix(one, scheme), scheme, grid=48)
    # tau is a QMF for M = 3, so there are no q1 masks and one q2 mask per coset
    assert bank.J == 0 and bank.r == 3 and bank.meta["dropped"] == []
    assert bank.r <= bank.r_bound()
    assert verify_oep(bank, 48).max_residual <= 1e-12


def test_subqmf_from_oep(haar_bank, box2d, box3d):
    assert abs(subqmf_from_oep(haar_bank[0], 64).min_f) <= 1e-12
    assert subqmf_from_oep(box2d[0], 64).holds
    assert subqmf_from_oep(box3d[0], 16).min_f >= -1e-9


def test_vmr_admissible():
    rep = vmr_admissible(build_vmr(example_spec(2)))
    assert rep.passed and 0 < rep.min_S <= rep.max_S < math.inf
    rep = vmr_admissible(VmrFunction.one(2))
    assert rep.passed and rep.min_S == rep.max_S == 1
    bad = VmrFunction.from_reciprocal(TrigPoly.from_cosines([Fraction(1, 2) + Fraction(1, 1000),
                                                             Fraction(-1, 2)]))
    rep = vmr_admissible(bad)
    assert not rep.passed and rep.S0 == 1000


def test_moment_reports(haar_bank, box2d, box3d):
    h = moment_report(haar_bank[0], strict=True)
    assert (h.accuracy, h.f_order, h.diff_order) == (1, math.inf, 2) and h.min_mask_order >= 1
    e = moment_report(box2d[0], strict=True)
    assert (e.accuracy, e.f_order) == (3, 4) and e.min_mask_order >= 2
    assert moment_report(box3d[0], strict=True).min_mask_order >= 2


def test_block_matrix_identity(box2d, rng):
    """``[H | S(M^T) H G^* | Sigma - S(M^T) H H^*]`` with weights ``diag(S(M^T), I, Sigma^{-1})``."""
    bank, cert = box2d
    scheme = bank.scheme
    Mt = np.asarray(scheme.M, float).T
    for w in rng.uniform(-np.pi, np.pi, size=(64, 2)):
        pts = w[None, :] + scheme.GammaStar
        H = np.asarray(bank.lowpass(pts)).reshape(-1, 1)
        Sig = np.diag(1 / np.asarray(bank.vmr.reciprocal(pts)))
        SM = 1 / complex(bank.vmr.reciprocal(Mt @ w)).real
        G = np.array([[complex(g(w)) for g in cert.generators]])
        P = np.hstack([H, SM * H @ G.conj(), Sig - SM * H @ H.conj().T])
        J = G.shape[1]
        D = np.zeros((1 + J + 4, 1 + J + 4), complex)
        D[0, 0] = SM
        D[1:1 + J, 1:1 + J] = np.eye(J)
        D[1 + J:, 1 + J:] = np.linalg.inv(Sig)
        np.testing.assert_allclose(P @ D @ P.conj().T, Sig, atol=1e-9)


def test_mask_bank_provenance_length():
    with pytest.raises(ValueError):
        MaskBank(D1, TrigPoly.constant(1, 1), VmrFunction.one(1), [TrigPoly.zero(1)], [])
