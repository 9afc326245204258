"""Acceptance suite: one printed PASS/FAIL line per criterion.

Run under pytest (``pytest tests/test_acceptance.py -s``) or directly with
``python3 tests/test_acceptance.py``.
"""
import functools
import math
import sys
import time
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))
from conftest import random_poly  # noqa: E402

from obliqueframes.boxframe import VmrFunction, build_vmr, subqmf_report
from obliqueframes.fbtransform import PeriodicSignal, analyze, synthesize
from obliqueframes.lattice import build_scheme
from obliqueframes.oepkit import build_amatrix, construct_highpass, moment_report, verify_oep
from obliqueframes.olp import factorize_variant, verify_scaling_identity
from obliqueframes.pipeline import BuildConfig, build_bank, dilation3_lowpass, example_spec, haar_spec
from obliqueframes.specfactor import SosCertificate, fejer_riesz
from obliqueframes.trigring import RationalTrigPoly, TrigPoly, tp_coset_sum, tp_polyphase

OEP_TOL = 1e-9
FR_TOL = 1e-9
SCALING_TOL = 1e-9
PR_TOL = 1e-9
HAAR_PR_TOL = 1e-12
SUBQMF_FLOOR = -1e-10
PERTURB = 0.01
PERTURB_FLOOR = 1e-4
FLOAT_VARIANT_TOL = 1e-12
SQ3, SQ6 = math.sqrt(3), math.sqrt(6)


@functools.lru_cache(maxsize=None)
def timed_bank(name):
    """Build and verify a bank once; returns ``(bank, cert, seconds, oep_residual)``."""
    spec = haar_spec() if name == "haar" else example_spec({"box2d": 2, "n3": 3, "n4": 4}[name])
    grid = {"haar": 64, "box2d": 64, "n3": 16, "n4": 8}[name]
    t0 = time.perf_counter()
    bank, cert = build_bank(BuildConfig(spec), grid=grid)
    res = verify_oep(bank, grid).max_residual
    moment_report(bank)
    return bank, cert, time.perf_counter() - t0, res


BANKS = ("haar", "box2d", "n3", "n4")


@pytest.fixture
def say(capsys):
    def emit(tag, ok, detail):
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] {tag}: {detail}")
    return emit


def test_c1_dyadic_2d_example(say):
    bank, _, secs, res = timed_bank("box2d")
    mom = moment_report(bank)
    ok = (bank.r == 8 and res <= OEP_TOL and mom.f_order == 4 and mom.min_mask_order >= 2
          and secs < 10)
    say("C1 2D box-spline bank", ok,
        f"r={bank.r} oep={res:.2e} fOrder={mom.f_order} minMaskOrder={mom.min_mask_order} "
        f"t={secs:.2f}s")
    assert ok


def test_c2_higher_dimensions(say):
    parts, ok = [], True
    for name, n in (("n3", 3), ("n4", 4)):
        bank, _, secs, res = timed_bank(name)
        mom = moment_report(bank)
        good = (bank.r == 2 ** (n + 1) and mom.min_mask_order >= 2 and res <= OEP_TOL
                and secs < 60)
        ok &= good
        parts.append(f"n={n}: r={bank.r} minMaskOrder={mom.min_mask_order} oep={res:.2e} "
                     f"t={secs:.1f}s")
    say("C2 n=3,4 banks", ok, "; ".join(parts))
    assert ok


def test_c3_mask_count_bound(say):
    rows = [(name, timed_bank(name)[0]) for name in BANKS]
    ok = all(b.r <= b.r_bound() for _, b in rows)
    say("C3 r <= 2^n(1+Q)", ok, " ".join(f"{n}:{b.r}<={b.r_bound()}" for n, b in rows))
    assert ok


def _coeffs_1d(p):
    return np.array([complex(p.terms.get((-j,), 0)) for j in range(2)])


def test_c4_spectral_factors(say):
    f1 = _coeffs_1d(fejer_riesz(TrigPoly.from_cosines([2, 1], normalize=True)))
    f2 = _coeffs_1d(fejer_riesz(TrigPoly.from_cosines([5, 1], normalize=True)))
    e1 = np.max(np.abs(f1 - [(1 + SQ3) / (2 * SQ3), (SQ3 - 1) / (2 * SQ3)]))
    e2 = np.max(np.abs(f2 - [(2 + SQ6) / (2 * SQ6), (SQ6 - 2) / (2 * SQ6)]))
    # product of the three factors, with the shared constant 1/(24 sqrt 6) pulled out
    a, b, c, d = 1 + SQ3, SQ3 - 1, 2 + SQ6, SQ6 - 2
    want = {}
    for i, u in ((0, a), (1, b)):
        for j, v in ((0, a), (1, b)):
            for k, w in ((0, c), (1, d)):
                key = (-(i + k), -(j + k))
                want[key] = want.get(key, 0) + u * v * w / (24 * SQ6)
    got = build_vmr(example_spec(2)).sqrt
    keys = set(want) | set(got.terms)
    e3 = max(abs(complex(got.terms.get(k, 0)) - want.get(k, 0)) for k in keys)
    rng = np.random.default_rng(2024)
    worst = 0.0
    for _ in range(50):
        deg = int(rng.integers(1, 9))
        p = TrigPoly(1, {(-j,): complex(*rng.standard_normal(2)) for j in range(deg + 1)})
        target = p.abs2()
        back = fejer_riesz(target).abs2()
        worst = max(worst, max(abs(complex(back.terms.get(k, 0)) - complex(target.terms.get(k, 0)))
                               for k in set(back.terms) | set(target.terms)))
    ok = max(e1, e2, e3, worst) <= FR_TOL
    say("C4 Fejer-Riesz", ok,
        f"sqrt3 factor {e1:.1e}, sqrt6 factor {e2:.1e}, 2D product {e3:.1e}, "
        f"50 round trips worst {worst:.1e}")
    assert ok


def test_c5_polyphase_identities(say):
    schemes = {"2I": [[2, 0], [0, 2]], "3I": [[3, 0], [0, 3]], "quincunx": [[1, 1], [1, -1]]}
    rng = np.random.default_rng(7)
    bad = []
    for name, M in schemes.items():
        scheme = build_scheme(M)
        for _ in range(100):
            f = random_poly(rng, 2, nterms=int(rng.integers(1, 9)), radius=4)
            pp = tp_polyphase(f, scheme, check=False)
            if pp.reconstruct().terms != f.terms:
                bad.append(f"{name} round trip")
            if pp.energy().terms != tp_coset_sum(f.abs2(), scheme).terms:
                bad.append(f"{name} parseval")
    ok = not bad
    say("C5 polyphase round trip and Parseval (exact)", ok,
        "300 polynomials, all exact" if ok else f"{len(bad)} failures: {bad[:3]}")
    assert ok


def _tensor_haar_exact():
    scheme = build_scheme([[2, 0], [0, 2]])
    tau = TrigPoly(2, {k: Fraction(1, 4) for k in ((0, 0), (1, 0), (0, 1), (1, 1))})
    one = VmrFunction.one(2)
    cert = SosCertificate(TrigPoly.zero(2), [], g_invariant=True, scheme=scheme)
    return scheme, tau, one, cert, build_amatrix(one, scheme)


def test_c6_scaling_identity_and_variant1(say):
    bank, cert, _, _ = timed_bank("box2d")
    haar, _, _, _ = timed_bank("haar")
    s_ex = verify_scaling_identity(bank.vmr, bank.lowpass, bank.scheme, 64).max_residual
    s_haar = verify_scaling_identity(haar.vmr, haar.lowpass, haar.scheme, 64).max_residual
    scheme, tau, one, hcert, A = _tensor_haar_exact()
    direct = construct_highpass(tau, one, hcert, A, scheme)
    v1 = factorize_variant(1, one, tau, scheme, cert=hcert, amat=A)
    exact_eq = (len(v1.highpass) == len(direct.highpass)
                and all(p.exact and p.equals(q) for p, q in zip(v1.highpass, direct.highpass)))
    f1 = factorize_variant(1, bank.vmr, bank.lowpass, bank.scheme, cert=cert)
    float_dev = max(float(np.max(np.abs(p.eval_grid(16) - q.eval_grid(16))))
                    for p, q in zip(f1.highpass, bank.highpass))
    ok = (s_ex <= SCALING_TOL and s_haar <= SCALING_TOL and exact_eq
          and f1.r == bank.r and float_dev <= FLOAT_VARIANT_TOL)
    say("C6 pyramid scaling identity and variant 1", ok,
        f"scaling box2d={s_ex:.1e} haar={s_haar:.1e}; variant 1 exact-mode equal={exact_eq}, "
        f"float-mode deviation {float_dev:.1e}")
    assert ok


def test_c7_filter_bank(say):
    bank, _, _, _ = timed_bank("box2d")
    rng = np.random.default_rng(99)
    worst = 0.0
    for _ in range(20):
        _, rep = synthesize(analyze(PeriodicSignal(rng.standard_normal((32, 32))), bank), bank)
        worst = max(worst, rep.pr_residual)
    haar, _, _, _ = timed_bank("haar")
    x = PeriodicSignal(rng.standard_normal(64))
    y, _ = synthesize(analyze(x, haar), haar)
    haar_err = float(np.max(np.abs(y.samples - x.samples)))
    ok = worst <= PR_TOL and haar_err <= HAAR_PR_TOL
    say("C7 filter bank reconstruction", ok,
        f"20 signals 32x32 worst relative {worst:.1e}; Haar max error {haar_err:.1e}")
    assert ok


def test_c8_dilation3_partial(say):
    _, tau = dilation3_lowpass()
    rep = subqmf_report(build_vmr(example_spec(2)), tau, build_scheme([[3, 0], [0, 3]]), 48)
    ok = rep.min_f >= SUBQMF_FLOOR and rep.order_at_zero == 4
    say("C8 dilation-3 sub-QMF (partial; 13-mask bank not built)", ok,
        f"minF={rep.min_f:.2e} on 48^2, fOrder={rep.order_at_zero}")
    assert ok


def test_c9_moment_bounds(say):
    parts, ok = [], True
    for name in BANKS:
        m = moment_report(timed_bank(name)[0])
        ok &= m.holds
        parts.append(f"{name}: a={m.accuracy} m={m.f_order} j={m.diff_order} "
                     f"min={m.min_mask_order}")
    say("C9 vanishing-moment bounds", ok, "; ".join(parts))
    assert ok


def _perturbed(bank, i, k):
    q = RationalTrigPoly.lift(bank.highpass[i])
    num = q.num.to_float()
    terms = dict(num.terms)
    terms[k] = terms[k] * (1 + PERTURB)
    hp = list(bank.highpass)
    hp[i] = RationalTrigPoly(TrigPoly(num.dim, terms), q.den)
    return bank.with_highpass(hp)


def test_c10_negative_control(say):
    # each mask's dominant numerator coefficient; a sweep over every coefficient of the
    # 2D bank is printed alongside, since tiny coefficients cannot move the residual by 1e-4
    worst, count = math.inf, 0
    for name in ("haar", "box2d", "n3"):
        bank = timed_bank(name)[0]
        grid = 32 if bank.dim <= 2 else 16
        for i, q in enumerate(bank.highpass):
            num = RationalTrigPoly.lift(q).num
            k = max(num.terms, key=lambda e: abs(complex(num.terms[e])))
            worst = min(worst, verify_oep(_perturbed(bank, i, k), grid).max_residual)
            count += 1
    bank = timed_bank("box2d")[0]
    sweep = [verify_oep(_perturbed(bank, i, k), 16).max_residual
             for i, q in enumerate(bank.highpass) for k in RationalTrigPoly.lift(q).num.terms]
    frac = float(np.mean(np.array(sweep) > PERTURB_FLOOR))
    ok = worst > PERTURB_FLOOR
    say("C10 1% perturbation detected", ok,
        f"dominant coefficient of {count} masks: min residual {worst:.2e}; all {len(sweep)} "
        f"coefficients of the 2D bank: {frac:.0%} exceed 1e-4, smallest {min(sweep):.1e}")
    assert ok


if __name__ == "__main__":
    def emit(tag, ok, detail):
        print(f"[{'PASS' if ok else 'FAIL'}] {tag}: {detail}")

    failed = 0
    tests = [v for k, v in globals().items() if k.startswith("test_c")]
    for fn in sorted(tests, key=lambda f: int(f.__name__.split("_")[1][1:])):
        try:
            fn(emit)
        except AssertionError:
            failed += 1
    sys.exit(1 if failed else 0)
