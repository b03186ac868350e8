import random

import pytest
from hypothesis import settings, strategies as st

from detpres.field import make_field
from detpres.matrix import Matrix
from detpres.space import Space

settings.register_profile("default", deadline=None, max_examples=60, derandomize=True)
settings.load_profile("default")

PRIMES = [3, 5, 7, 11]


@pytest.fixture
def gf5():
    return make_field("prime", 5)


@pytest.fixture
def gf7():
    return make_field("prime", 7)


@pytest.fixture
def rng():
    return random.Random(1234)


@st.composite
def prime_fields(draw, primes=PRIMES):
    return make_field("prime", draw(st.sampled_from(primes)))


@st.composite
def square_matrices(draw, F, n):
    vals = draw(st.lists(st.integers(0, F.order - 1), min_size=n * n, max_size=n * n))
    return Matrix(F, [vals[r * n:(r + 1) * n] for r in range(n)])


@st.composite
def space_points(draw, F, space: Space):
    return space.from_coords(F, draw(st.lists(st.integers(0, F.order - 1), min_size=space.dim,
                                              max_size=space.dim)))
