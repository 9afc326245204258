from fractions import Fraction

import numpy as np
import pytest

from obliqueframes.pipeline import BuildConfig, build_bank, example_spec, haar_spec
from obliqueframes.trigring import TrigPoly


def random_poly(rng, dim, nterms=6, radius=3, exact=True):
    terms = {}
    for _ in range(nterms):
        k = tuple(int(v) for v in rng.integers(-radius, radius + 1, size=dim))
        if exact:
            terms[k] = Fraction(int(rng.integers(-9, 10)), int(rng.integers(1, 6)))
        else:
            terms[k] = complex(rng.standard_normal(), rng.standard_normal())
    return TrigPoly(dim, terms, exact=exact)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def haar_bank():
    return build_bank(BuildConfig(haar_spec()))


@pytest.fixture(scope="session")
def box2d():
    return build_bank(BuildConfig(example_spec(2)))


@pytest.fixture(scope="session")
def box3d():
    return build_bank(BuildConfig(example_spec(3)))
