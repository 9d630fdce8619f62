import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import FIELD_SIZES, theta_polys
from ffzeta import PiSeries, PrecisionError, PrecisionPlan, ThetaPoly, embed_theta_poly, field, pi_tilde
from ffzeta.series import pis_add, pis_frobenius, pis_inv, pis_mul, pis_valuation


@st.composite
def series(draw, q=None, unit=False):
    q = q or draw(st.sampled_from(FIELD_SIZES))
    ctx = field(q)
    val = 0 if unit else draw(st.integers(-8, 8))
    length = draw(st.integers(1, 40))
    codes = draw(st.lists(st.integers(0, q - 1), min_size=length, max_size=length))
    codes[0] = draw(st.integers(1, q - 1))
    return PiSeries(ctx, val, codes, val + length)


@st.composite
def series_pair(draw):
    q = draw(st.sampled_from(FIELD_SIZES))
    return draw(series(q)), draw(series(q))


def rescale_root(x: PiSeries, c: int) -> PiSeries:
    """Apply varpi -> c*varpi, the automorphism moving between (q-1)-th roots."""
    ctx = x.ctx
    codes = [ctx.mul_table[int(code), ctx.power(c, (x.start + k) % (ctx.q - 1))] for k, code in enumerate(x.c)]
    return PiSeries(ctx, x.start, codes, x.prec)


# -- embedding of A ------------------------------------------------------------


def test_embed_examples():
    ctx = field(3)
    theta = embed_theta_poly(ThetaPoly.theta(ctx))
    assert theta == PiSeries.monomial(ctx, -2, 2)
    assert embed_theta_poly(ThetaPoly.constant(ctx, 1)) == PiSeries.one(ctx)
    d1 = embed_theta_poly(ThetaPoly.from_coeffs(ctx, [0, 2, 0, 1]))  # theta^3 - theta
    assert d1.val == -6
    assert d1.coefficient(-6) == 2 and d1.coefficient(-2) == 1
    assert int(np.count_nonzero(d1.c)) == 2


@given(theta_polys(q=3, max_degree=10), theta_polys(q=3, max_degree=10))
def test_embed_is_ring_homomorphism(a, b):
    assert embed_theta_poly(a * b) == embed_theta_poly(a) * embed_theta_poly(b)
    assert embed_theta_poly(a + b) == embed_theta_poly(a) + embed_theta_poly(b)


@given(theta_polys(max_degree=20))
def test_embed_is_injective(a):
    assert embed_theta_poly(a).is_zero() == a.is_zero()
    if not a.is_zero():
        assert pis_valuation(embed_theta_poly(a)) == -(a.ctx.q - 1) * a.degree


def test_theta_powers_multiply():
    ctx = field(5)
    t1 = embed_theta_poly(ThetaPoly.theta(ctx))
    t2 = embed_theta_poly(ThetaPoly.monomial(ctx, 2))
    assert t1 * t2 == embed_theta_poly(ThetaPoly.monomial(ctx, 3))


# -- field operations ------------------------------------------------------------


@given(series())
def test_inverse(x):
    y = pis_inv(x)
    prod = pis_mul(x, y)
    ok, prec = prod.agrees_with(PiSeries.one(x.ctx))
    assert ok and prec == x.prec - x.val


def test_geometric_series():
    ctx = field(3)
    x = PiSeries(ctx, 0, [1, 2])  # 1 - varpi, exact
    inv = x.inverse(prec=50)
    assert inv == PiSeries(ctx, 0, [1] * 50, 50)


def test_exact_inverse_needs_target():
    ctx = field(3)
    with pytest.raises(ValueError):
        PiSeries(ctx, 0, [1, 1]).inverse()
    with pytest.raises(PrecisionError):
        PiSeries.zero(ctx, 10).inverse()


@given(series_pair())
def test_ultrametric_laws(pair):
    x, y = pair
    assert (x * y).val == x.val + y.val
    s = pis_add(x, y)
    assert s.val >= min(x.val, y.val)
    if x.val != y.val:
        assert s.val == min(x.val, y.val)


def test_ultrametric_laws_bulk():
    rng = np.random.default_rng(0)
    for k in range(10_000):
        ctx = field(FIELD_SIZES[k % len(FIELD_SIZES)])
        x = PiSeries.random(ctx, rng, int(rng.integers(-5, 6)), 12)
        y = PiSeries.random(ctx, rng, int(rng.integers(-5, 6)), 12)
        assert (x * y).val == x.val + y.val
        assert (x + y).val >= min(x.val, y.val)


def test_precision_propagates():
    ctx = field(3)
    x = PiSeries(ctx, 2, [1, 1], 10)
    y = PiSeries(ctx, -1, [2], 5)
    assert (x * y).prec == min(10 - 1, 5 + 2)
    assert (x + y).prec == 5
    with pytest.raises(PrecisionError):
        x.coefficient(10)


# -- Frobenius -----------------------------------------------------------------


def test_frobenius_examples():
    for q in (2, 3, 4):
        ctx = field(q)
        varpi = PiSeries.monomial(ctx, 1)
        assert pis_frobenius(varpi, 1) == PiSeries.monomial(ctx, q)
        theta = ThetaPoly.theta(ctx)
        assert pis_frobenius(embed_theta_poly(theta)) == embed_theta_poly(theta.twist(1))


@given(series_pair(), st.integers(1, 2))
def test_frobenius_is_endomorphism(pair, k):
    x, y = pair
    assert pis_frobenius(x * y, k) == pis_frobenius(x, k) * pis_frobenius(y, k)
    assert pis_frobenius(x + y, k) == pis_frobenius(x, k) + pis_frobenius(y, k)


@pytest.mark.parametrize("q", FIELD_SIZES)
def test_frobenius_fixes_constants(q):
    ctx = field(q)
    for code in range(q):
        c = PiSeries(ctx, 0, [code])
        assert pis_frobenius(c, 1) == c


# -- valuations ------------------------------------------------------------------


def test_valuation_examples():
    for q in (2, 3, 5):
        ctx = field(q)
        assert pis_valuation(embed_theta_poly(ThetaPoly.theta(ctx))) == -(q - 1)
        assert pis_valuation(PiSeries.monomial(ctx, 5)) == 5
        assert pis_valuation(pi_tilde(ctx, PrecisionPlan(80))) == -q
    with pytest.raises(PrecisionError):
        pis_valuation(PiSeries.zero(field(3), 20))


@pytest.mark.parametrize("q", [3, 4, 5])
def test_pi_tilde_power_independent_of_root(q):
    ctx = field(q)
    pi = pi_tilde(ctx, PrecisionPlan(120))
    target = pi ** (q - 1)
    for c in range(2, q):
        assert (rescale_root(pi, c) ** (q - 1)).agrees_with(target)[0]


def test_render_and_json_roundtrip():
    ctx = field(9)
    x = PiSeries(ctx, -3, [1, 0, 5, 7], 20)
    assert PiSeries.from_json(ctx, x.to_json()) == x
    assert "O(ϖ^20)" in x.render()
    assert "θ^" in embed_theta_poly(ThetaPoly.theta(ctx)).render(theta_form=True)
