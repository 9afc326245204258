"""One analysis/synthesis level of the 2D box-spline frame on a periodic image."""
import numpy as np

from obliqueframes import BuildConfig, PeriodicSignal, analyze, build_bank, synthesize
from obliqueframes.pipeline import example_spec

bank, _ = build_bank(BuildConfig(example_spec(2)))

# a smooth ramp with a sharp square in the middle
n = 32
yy, xx = np.mgrid[0:n, 0:n]
img = xx / n + ((abs(xx - n / 2) < 6) & (abs(yy - n / 2) < 6)).astype(float)
x = PeriodicSignal(img)

ch = analyze(x, bank)
energies = ch.energies()
print("coarse energy:", round(energies[0], 3))
print("detail energies:", np.round(energies[1:], 4))

# with a vmr function the synthesis returns S x rather than x
r, rep = synthesize(ch, bank)
print("relative residual against S x:", rep.pr_residual)
