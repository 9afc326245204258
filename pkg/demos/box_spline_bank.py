"""Build a tight wavelet frame from a 2D box-spline mask and check it."""
import numpy as np

from obliqueframes import BuildConfig, build_bank, moment_report, verify_oep
from obliqueframes.pipeline import example_spec

# directions e1, e2 (each twice) and e1+e2, dilation 2I
spec = example_spec(2)
bank, cert = build_bank(BuildConfig(spec))
print("lowpass terms:", len(bank.lowpass.terms))
print("sos generators of f(S, tau):", len(cert.generators))
print("highpass masks:", bank.r, "bound:", bank.r_bound())
print("provenance:", bank.provenance)

# the OEP identity, checked at every coset shift on a 64 x 64 grid
rep = verify_oep(bank, 64)
print("OEP residual:", rep.max_residual)

# vanishing moments: accuracy a, order m of f(S, tau), order j, and the masks
mom = moment_report(bank)
print("a, m, j:", mom.accuracy, mom.f_order, mom.diff_order)
print("mask orders:", mom.mask_orders)

# highpass masks vanish at the origin; the lowpass is 1 there
print("tau(0):", bank.lowpass(np.zeros(2)))
print("max |q(0)|:", max(abs(q(np.zeros(2))) for q in bank.highpass))
