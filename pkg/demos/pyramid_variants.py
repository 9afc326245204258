"""Highpass masks from the oblique Laplacian pyramid, three ways."""
from fractions import Fraction

import numpy as np

from obliqueframes import VmrFunction, build_scheme, verify_oep
from obliqueframes.olp import eval_pyramid, factorize_variant, sqrt_of_ratio_univariate
from obliqueframes.specfactor import SosCertificate
from obliqueframes.trigring import TrigPoly

scheme = build_scheme([[2]])
tau = TrigPoly(1, {(0,): Fraction(1, 4), (1,): Fraction(1, 2), (2,): Fraction(1, 4)})
one = VmrFunction.one(1)

# the pyramid matrix and its right inverse at one frequency
ev = eval_pyramid(one, tau, scheme, [0.7])
print("Phi shape:", ev.Phi.shape, "right-inverse residual:", ev.right_inverse_residual())

# variant 1: sos of f(S, tau) plus a sors of 1/S; here f is |sin w|^2 / 2
g = TrigPoly(1, {(0,): Fraction(1, 2), (2,): Fraction(-1, 2)}) * TrigPoly.constant(1, 2 ** -0.5)
cert = SosCertificate(g.abs2(), [g], g_invariant=True, scheme=scheme)
b1 = factorize_variant(1, one, tau, scheme, cert=cert)
print("variant 1 masks:", b1.r, "OEP:", verify_oep(b1, 64).max_residual)

# variant 2: fold a square root of 1 + f into a new lowpass, no generators needed
g2 = sqrt_of_ratio_univariate(one, tau, scheme)
b2 = factorize_variant(2, one, tau, scheme, g=g2)
print("variant 2 masks:", b2.r, "new lowpass at 0:", b2.lowpass(np.zeros(1)))

# variant 3 with g0 = 1 reduces to variant 1
b3 = factorize_variant(3, one, tau, scheme, cert=cert, g0=TrigPoly.constant(1, 1))
print("variant 3 masks:", b3.r, "OEP:", verify_oep(b3, 64).max_residual)
