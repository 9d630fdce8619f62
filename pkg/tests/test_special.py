import numpy as np
import pytest

from ffzeta import (
    Index,
    PiSeries,
    PrecisionPlan,
    TateJet,
    TThetaPoly,
    ThetaPoly,
    at_polynomial,
    at_series_jet,
    carlitz_D,
    carlitz_gamma,
    cmpl_jet,
    embed_theta_poly,
    field,
    jet_inv,
    jet_twist,
    mzv_oracle,
    omega_jet,
    pi_tilde,
    random_admissible_us,
    twist_working_order,
    zeta_via_at,
)
from ffzeta.special import carlitz_D_bruteforce, divide_by_poly, gamma_product, mzv_naive, power_sum

PLAN = PrecisionPlan(120, 2)


def poly(ctx, coeffs):
    return ThetaPoly.from_coeffs(ctx, coeffs)


# -- Carlitz factorials ------------------------------------------------------------


def test_carlitz_D_examples():
    ctx = field(3)
    assert carlitz_D(ctx, 0) == 1
    assert carlitz_D(ctx, 1) == poly(ctx, [0, 2, 0, 1])


@pytest.mark.parametrize("q", [2, 3])
def test_carlitz_D_matches_enumeration(q):
    ctx = field(q)
    for i in range(3):
        assert carlitz_D(ctx, i) == carlitz_D_bruteforce(ctx, i)


@pytest.mark.parametrize("q", [2, 3, 4, 5])
def test_carlitz_gamma_digit_oracle(q):
    ctx = field(q)
    for n in range(1, q + 1):
        assert carlitz_gamma(ctx, n) == 1
    for n in range(1, 40):
        expected = ThetaPoly.constant(ctx, 1)
        for i, digit in enumerate(reversed(np.base_repr(n - 1, q))):
            expected = expected * carlitz_D(ctx, i) ** int(digit, q)
        assert carlitz_gamma(ctx, n) == expected
    assert carlitz_gamma(ctx, q + 1) == carlitz_D(ctx, 1)
    assert carlitz_gamma(ctx, q * q + 1) == carlitz_D(ctx, 2)


def test_gamma_4_for_q_3():
    ctx = field(3)
    assert carlitz_gamma(ctx, 4) == poly(ctx, [0, 2, 0, 1])


# -- Anderson-Thakur polynomials ------------------------------------------------------


@pytest.mark.parametrize("q", [2, 3, 4, 5])
def test_low_at_polynomials(q):
    ctx = field(q)
    assert at_polynomial(ctx, 0) == 1
    for s in range(1, q + 1):
        assert at_polynomial(ctx, s - 1) == 1
    for s in range(1, 9):
        h = at_polynomial(ctx, s - 1)
        assert (q - 1) * h.theta_degree <= s * q


# -- Omega and the period ---------------------------------------------------------------


@pytest.mark.parametrize("q", [2, 3, 4, 5])
def test_omega_leading_term(q):
    ctx = field(q)
    omega = omega_jet(ctx, PLAN)
    a0 = omega.coeff(0)
    assert a0.val == q and a0.coefficient(q) == 1
    inv = jet_inv(omega)
    assert (inv * omega - TateJet.one(ctx, omega.order)).is_zero_within_precision()


@pytest.mark.parametrize("q", [2, 3, 5])
def test_pi_tilde_valuation_and_precision(q):
    ctx = field(q)
    pi = pi_tilde(ctx, PLAN)
    assert pi.val == -q
    assert pi.prec == PLAN.pi_prec


def test_omega_precision_grows_with_target():
    ctx = field(3)
    lo = omega_jet(ctx, PrecisionPlan(100, 2))
    hi = omega_jet(ctx, PrecisionPlan(200, 2))
    assert hi.certified_precision() > lo.certified_precision() >= 100
    assert (lo - hi).is_zero_within_precision()


# -- power sums and zeta values -----------------------------------------------------------


def test_power_sum_examples():
    ctx = field(3)
    assert power_sum(ctx, 0, 5, 50) == PiSeries.one(ctx, 50)
    d1 = embed_theta_poly(carlitz_D(ctx, 1))
    assert (power_sum(ctx, 1, 1, 60) + d1.inverse(60)).is_zero()


@pytest.mark.parametrize("q", [2, 3])
def test_power_sum_valuation_bound(q):
    ctx = field(q)
    for d in range(4):
        for k in range(1, 6):
            x = power_sum(ctx, d, k, 200)
            assert x.val >= (q - 1) * k * d


@pytest.mark.parametrize("q", [2, 3, 4])
def test_zeta_depth_one_leading_terms(q):
    ctx = field(q)
    for s in range(1, 6):
        z, cert = mzv_oracle(ctx, Index((s,)))
        assert cert == (q - 1) * s * 4
        assert (z - PiSeries.one(ctx)).val >= (q - 1) * s


def test_zeta_depth_two_leading_part():
    ctx = field(3)
    z, cert = mzv_oracle(ctx, Index((2, 3)))
    lead = power_sum(ctx, 1, 2, cert) * power_sum(ctx, 0, 3, cert)
    assert z.val >= (3 - 1) * 2
    assert (z - lead).val > lead.val


@pytest.mark.parametrize("q", [2, 3])
def test_oracle_matches_naive_enumeration(q):
    ctx = field(q)
    for parts in ((1,), (3,), (2, 1), (1, 2)):
        s = Index(parts)
        z, cert = mzv_oracle(ctx, s, 2)
        assert (z - mzv_naive(ctx, s, 2, cert)).truncate(cert).is_zero()


def test_pth_power_relation():
    ctx = field(3)
    big, cert = mzv_oracle(ctx, Index((3,)), 3)
    small, _ = mzv_oracle(ctx, Index((1,)), 3)
    assert (big - small**3).truncate(min(cert, (small**3).prec)).is_zero()


# -- CMPLs and the AT series ---------------------------------------------------------------


def test_cmpl_examples():
    ctx = field(3)
    s = Index((2,))
    zero = cmpl_jet([TThetaPoly(ctx)], s, PLAN)
    assert zero.is_zero_within_precision()
    one = cmpl_jet([TThetaPoly.constant(ctx, 1)], s, PLAN)
    d = embed_theta_poly(ThetaPoly.theta(ctx) - ThetaPoly.monomial(ctx, 3))
    two_terms = PiSeries.one(ctx) + d.inverse(200) ** 2
    # the next term Q_2^{-2} at t = theta has valuation 2 (q - 1)(q + q^2) = 48
    diff = one.coeff(0) - two_terms
    assert diff.val == 48


def _frobenius_residual(us, s, plan, q):
    """L - [(t - theta^q)^-w' u_d twist(L') + (t - theta^q)^-w twist(L)], truncated to the plan order."""
    ctx = field(q)
    n = plan.jet_order
    order = twist_working_order(q, n, plan.tail_bound_log)
    lin_inv = jet_inv(TateJet.from_tpoly(TThetaPoly.t_minus_theta_power(ctx, 1), order), prec=plan.tail_bound_log + 40)
    L = cmpl_jet(us, s, plan, order=order)
    w = s.weight
    rhs = lin_inv**w * jet_twist(L)
    u_d = TateJet.from_tpoly(us[-1], order)
    if s.depth == 1:
        rhs = rhs + lin_inv ** (w - s[-1]) * u_d
    else:
        sub = Index(s.parts[:-1])
        Lp = cmpl_jet(us[:-1], sub, plan, order=order)
        rhs = rhs + lin_inv ** sub.weight * u_d * jet_twist(Lp)
    return (L - rhs).truncate_order(n)


@pytest.mark.parametrize("q", [2, 3])
@pytest.mark.parametrize("parts", [(1,), (3,), (2, 1), (1, 4)])
def test_cmpl_frobenius_equation(q, parts):
    ctx = field(q)
    s = Index(parts)
    plan = PrecisionPlan(150, 2)
    for us in ([at_polynomial(ctx, k - 1) for k in parts], random_admissible_us(ctx, np.random.default_rng(q), s)):
        res = _frobenius_residual(us, s, plan, q)
        assert res.is_zero_within_precision()
        assert res.certified_precision() >= 100


def test_cmpl_stable_under_more_terms():
    ctx = field(3)
    s = Index((1, 2))
    us = [at_polynomial(ctx, k - 1) for k in s]
    a = cmpl_jet(us, s, PrecisionPlan(100, 2))
    b = cmpl_jet(us, s, PrecisionPlan(180, 2))
    d = a - b
    assert d.is_zero_within_precision() and d.certified_precision() >= 100


@pytest.mark.parametrize("q, parts", [(2, (3,)), (3, (2,)), (3, (5, 1)), (2, (1, 2))])
def test_at_series_matches_oracle(q, parts):
    ctx = field(q)
    s = Index(parts)
    oracle, cert = mzv_oracle(ctx, s, 3)
    beta0 = at_series_jet(ctx, s, PrecisionPlan(240, 0)).coeff(0)
    lhs = divide_by_poly(beta0, gamma_product(ctx, s))
    assert (lhs - oracle).truncate(cert).is_zero()
    assert zeta_via_at(ctx, s, PrecisionPlan(240, 0)).agrees_with(oracle)[0]


def test_at_series_pth_power_with_gamma_ratio():
    ctx = field(3)
    plan = PrecisionPlan(200, 0)
    big = at_series_jet(ctx, Index((6,)), plan).coeff(0)
    small = at_series_jet(ctx, Index((2,)), plan).coeff(0)
    lhs = big * embed_theta_poly(carlitz_gamma(ctx, 2) ** 3)
    rhs = small**3 * embed_theta_poly(carlitz_gamma(ctx, 6))
    ok, prec = lhs.agrees_with(rhs)
    assert ok and prec >= 150
