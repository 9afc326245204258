"""Fejer-Riesz factors of the cosine polynomials that make up 1/S."""
import numpy as np

from obliqueframes import TrigPoly, fejer_riesz
from obliqueframes.specfactor import reversed_roots

# (2 + cos w)/3 and (5 + cos w)/6 are strictly positive, so each is |p|^2 for a linear p
for c in ([2, 1], [5, 1]):
    f = TrigPoly.from_cosines(c, normalize=True)
    p = fejer_riesz(f)
    print(c, "->", {k: complex(v).real for k, v in sorted(p.terms.items())})
    print("  roots of reversed p:", reversed_roots(p))

# zeros on the circle are split evenly between p and its conjugate
s2 = TrigPoly.from_cosines([0.5, -0.5])  # sin^2(w/2)
q = fejer_riesz(s2 ** 2 * TrigPoly.from_cosines([2, 1], normalize=True))
w = np.linspace(-np.pi, np.pi, 9)[:, None]
print("max | |q|^2 - f |:", np.max(np.abs(np.abs(q(w)) ** 2 - (s2 ** 2)(w).real
                                         * (2 + np.cos(w[:, 0])) / 3)))
