import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from ffzeta import TThetaPoly, ThetaPoly, field

settings.register_profile(
    "default",
    deadline=None,
    max_examples=60,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)
settings.load_profile("default")

FIELD_SIZES = (2, 3, 4, 5, 9)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@st.composite
def theta_polys(draw, q=None, max_degree=6):
    q = q or draw(st.sampled_from(FIELD_SIZES))
    codes = draw(st.lists(st.integers(0, q - 1), max_size=max_degree + 1))
    return ThetaPoly(field(q), codes)


@st.composite
def tpoly_arrays(draw, q, max_t=4, max_theta=4):
    rows = draw(st.integers(0, max_t + 1))
    cols = draw(st.integers(1, max_theta + 1))
    flat = draw(st.lists(st.integers(0, q - 1), min_size=rows * cols, max_size=rows * cols))
    return np.array(flat, dtype=np.int64).reshape(rows, cols)


@st.composite
def tpoly_pairs(draw, count=2):
    """A field size and ``count`` polynomials in A[t] over it."""
    q = draw(st.sampled_from(FIELD_SIZES))
    ctx = field(q)
    return (ctx, *[TThetaPoly(ctx, draw(tpoly_arrays(q))) for _ in range(count)])
