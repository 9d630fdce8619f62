from math import comb

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import tpoly_pairs
from ffzeta import Index, TThetaPoly, ThetaPoly, at_condition_check, at_polynomial, field
from ffzeta.fq import FqContext, binom_mod_p, prime_power
from ffzeta.poly import tpoly_gauss_norm_exponent, tpoly_hyperderiv, tpoly_twist


def tp(ctx, rows):
    """A[t] element from rows indexed by t-degree, each a theta-coefficient list."""
    return TThetaPoly.from_coeffs(ctx, rows)


# -- finite fields -------------------------------------------------------------


@pytest.mark.parametrize("q", [2, 3, 4, 5, 7, 8, 9, 16, 25, 27])
def test_field_axioms(q):
    ctx = field(q)
    els = ctx.elements()
    zero, one = els[0], ctx.elem(1)
    for a in els:
        assert a + zero == a and a * one == a
        assert a - a == zero
        if a:
            assert a * a.inverse() == one
            assert a ** (q - 1) == one
    # multiplication table is commutative and distributes over addition
    assert np.array_equal(ctx.mul_table, ctx.mul_table.T)
    a, b, c = np.meshgrid(np.arange(q), np.arange(q), np.arange(q), indexing="ij")
    lhs = ctx.mul_table[a, ctx.add_table[b, c]]
    rhs = ctx.add_table[ctx.mul_table[a, b], ctx.mul_table[a, c]]
    assert np.array_equal(lhs, rhs)


def test_prime_power_and_moduli():
    assert prime_power(27) == (3, 3)
    assert prime_power(2) == (2, 1)
    for bad in (1, 6, 12, 100):
        with pytest.raises(ValueError):
            prime_power(bad)
    with pytest.raises(ValueError):
        FqContext(4, (1, 0, 1))  # t^2 + 1 = (t + 1)^2 over F_2
    with pytest.raises(ValueError):
        FqContext(32)  # outside the built-in table, needs a modulus
    assert FqContext(32, (1, 0, 1, 0, 0, 1)).q == 32


def test_user_modulus_gives_isomorphic_field():
    # both are fields of order 4: the multiplicative group is cyclic of order 3
    ctx = field(4, (1, 1, 1))
    assert all(ctx.power(c, 3) == 1 for c in range(1, 4))


# -- Lucas binomials -----------------------------------------------------------


@pytest.mark.parametrize(
    "i, n, p, expected",
    [(7, 3, 2, 1), (5, 2, 2, 0), (9, 9, 3, 1), (4, 9, 3, 0), (0, 0, 5, 1)],
)
def test_binom_examples(i, n, p, expected):
    assert binom_mod_p(i, n, p) == expected


@pytest.mark.parametrize("p", [2, 3, 5])
def test_lucas_matches_pascal(p):
    for i in range(201):
        for n in range(i + 1):
            assert binom_mod_p(i, n, p) == comb(i, n) % p


# -- twists ------------------------------------------------------------------


def test_twist_examples():
    ctx = field(3)
    u = tp(ctx, [[1], [0, 1]])  # theta*t + 1
    assert tpoly_twist(u, 1) == tp(ctx, [[1], [0, 0, 0, 1]])
    assert tpoly_twist(TThetaPoly(ctx), 3).is_zero()
    assert tpoly_twist(u, 0) == u


@given(tpoly_pairs())
def test_twist_is_ring_homomorphism(data):
    ctx, u, v = data
    for k in (1, 2):
        assert tpoly_twist(u * v, k) == tpoly_twist(u, k) * tpoly_twist(v, k)
        assert tpoly_twist(u + v, k) == tpoly_twist(u, k) + tpoly_twist(v, k)
    assert tpoly_twist(tpoly_twist(u, 1), 1) == tpoly_twist(u, 2)


def test_theta_twist_is_frobenius():
    ctx = field(5)
    a = ThetaPoly.from_coeffs(ctx, [1, 2, 0, 3])
    assert a.twist(1) == a**5


# -- hyperderivatives ------------------------------------------------------------


def test_hyperderiv_examples():
    ctx = field(3)
    t = TThetaPoly.t(ctx)
    assert tpoly_hyperderiv(t**2, 1) == t * 2
    assert tpoly_hyperderiv(t**3, 1).is_zero()
    assert tpoly_hyperderiv(t**3, 3) == TThetaPoly.constant(ctx, 1)


@given(tpoly_pairs(count=1), st.integers(0, 4), st.integers(0, 4))
def test_hyperderiv_composition(data, a, b):
    ctx, u = data
    lhs = tpoly_hyperderiv(tpoly_hyperderiv(u, b), a)
    rhs = tpoly_hyperderiv(u, a + b) * binom_mod_p(a + b, a, ctx.p)
    assert lhs == rhs


@given(tpoly_pairs(), st.integers(0, 5))
def test_hyperderiv_leibniz(data, n):
    ctx, u, v = data
    rhs = TThetaPoly(ctx)
    for a in range(n + 1):
        rhs = rhs + tpoly_hyperderiv(u, a) * tpoly_hyperderiv(v, n - a)
    assert tpoly_hyperderiv(u * v, n) == rhs


@given(tpoly_pairs(count=1), st.integers(0, 4), st.integers(1, 2))
def test_hyperderiv_commutes_with_twist(data, n, k):
    _, u = data
    assert tpoly_hyperderiv(tpoly_twist(u, k), n) == tpoly_twist(tpoly_hyperderiv(u, n), k)


def test_taylor_at_theta_reconstructs():
    ctx = field(3)
    rng = np.random.default_rng(7)
    u = TThetaPoly.random(ctx, rng, 3, 2)
    eps = TThetaPoly.t(ctx) - TThetaPoly.constant(ctx, ThetaPoly.theta(ctx))
    rebuilt = TThetaPoly(ctx)
    for k, c in enumerate(u.taylor_at_theta()):
        rebuilt = rebuilt + TThetaPoly.constant(ctx, c) * eps**k
    assert rebuilt == u


# -- Gauss norms and the convergence condition -----------------------------------------


def test_gauss_norm_examples():
    ctx = field(3)
    assert tpoly_gauss_norm_exponent(tp(ctx, [[0, 1], [0, 0, 1]])) == 2
    assert tpoly_gauss_norm_exponent(TThetaPoly.constant(ctx, 1)) == 0
    with pytest.raises(ValueError):
        tpoly_gauss_norm_exponent(TThetaPoly(ctx))


def test_gauss_norm_of_low_at_polynomial():
    # H_1 for q = 3 satisfies the bound attached to s = 2
    h1 = at_polynomial(field(3), 1)
    assert 2 * tpoly_gauss_norm_exponent(h1) < 2 * 3


def test_convergence_condition_examples():
    ctx = field(3)
    assert at_condition_check(TThetaPoly.constant(ctx, 1), 1)
    assert not at_condition_check(tp(ctx, [[0, 0, 1]]), 1)


@pytest.mark.parametrize("q", [2, 3, 4, 5])
def test_at_polynomials_meet_norm_bound(q):
    # the non-strict bound (q-1) deg <= s q always holds for H_{s-1}
    ctx = field(q)
    for s in range(1, 9):
        h = at_polynomial(ctx, s - 1)
        assert (q - 1) * tpoly_gauss_norm_exponent(h) <= s * q


def test_index_parsing():
    assert Index.parse("5,1").parts == (5, 1)
    assert Index.parse(" 1, 5 ,7").weight == 13
    for bad in ("", "0", "1,-2"):
        with pytest.raises(ValueError):
            Index.parse(bad)
