import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ffzeta import (
    Index,
    PiSeries,
    PrecisionError,
    PrecisionPlan,
    RelationQuery,
    TateJet,
    ThetaPoly,
    at_series_jet,
    carlitz_D,
    embed_theta_poly,
    field,
    gamma_reconstruct,
    linear_scan,
    monomial_scan,
    omega_jet,
    pi_tilde,
    zeta_via_at,
)
from ffzeta.relations import nullspace, rref

PLAN = PrecisionPlan(240, 4)


# -- linear algebra over F_q ---------------------------------------------------------


@given(st.sampled_from([2, 3, 4, 5, 9]), st.integers(1, 6), st.integers(1, 8), st.integers(0, 2**32 - 1))
def test_nullspace(q, rows, cols, seed):
    ctx = field(q)
    A = ctx.random_codes(np.random.default_rng(seed), (rows, cols))
    basis = nullspace(ctx, A)
    _, pivots = rref(ctx, A)
    assert len(basis) + len(pivots) == cols
    for v in basis:
        prod = np.zeros(rows, dtype=np.int64)
        for j in range(cols):
            prod = ctx.add(prod, ctx.mul(A[:, j], np.full(rows, v[j])))
        assert not prod.any()


# -- linear scans ------------------------------------------------------------


def random_values(ctx, rng, count, prec=200):
    return [PiSeries.random(ctx, rng, int(rng.integers(-4, 4)), prec) for _ in range(count)]


def test_duplicate_values():
    ctx = field(3)
    x = random_values(ctx, np.random.default_rng(0), 1)[0]
    res = linear_scan(RelationQuery([("x", x), ("y", x)], 0))
    assert res.verdict == "RELATION-FOUND"
    (rel,) = res.relations
    assert rel.coeffs[0] == 1 and rel.coeffs[1] == 2


def test_pth_power_relation():
    ctx = field(3)
    big = zeta_via_at(ctx, Index((3,)), PLAN)
    small = zeta_via_at(ctx, Index((1,)), PLAN)
    res = linear_scan(RelationQuery([("z3", big), ("z1^3", small**3)], 0))
    (rel,) = res.relations
    assert rel.coeffs[0] == 1 and rel.coeffs[1] == -1 % 3


def euler_values(q):
    ctx = field(q)
    return ctx, [("zeta", zeta_via_at(ctx, Index((q - 1,)), PLAN)), ("pi", pi_tilde(ctx, PLAN) ** (q - 1))]


@pytest.mark.parametrize("q", [3, 4, 5])
def test_carlitz_euler_relation_has_theta_degree_q(q):
    # (theta^q - theta) zeta(q-1) + pi^(q-1) = 0, unique up to F_q^x
    ctx, values = euler_values(q)
    (rel,) = linear_scan(RelationQuery(values, q)).relations
    a, b = rel.coeffs
    assert b.degree == 0 and a == b * carlitz_D(ctx, 1)
    assert not linear_scan(RelationQuery(values, q - 1)).relations


def test_monomial_scan_euler_restatement():
    q = 3
    ctx, values = euler_values(q)
    pi = pi_tilde(ctx, PLAN)
    found = monomial_scan(RelationQuery([("pi", pi), values[0]], q, q - 1))
    assert found.relations
    # pi alone satisfies nothing at this height
    alone = monomial_scan(RelationQuery([("pi", pi)], 2, q - 1))
    assert alone.verdict == f"NO-RELATION-AT-HEIGHT(2,{q - 1},{alone.window[1]})"


def test_omega_taylor_coefficients_show_no_relation():
    ctx = field(3)
    omega = omega_jet(ctx, PLAN.with_order(1), order=1)
    res = monomial_scan(RelationQuery([("a0", omega.coeff(0)), ("a1", omega.coeff(1))], 3, 2))
    assert not res.relations
    assert res.verdict.startswith("NO-RELATION-AT-HEIGHT(3,2,")
    assert "independent" not in res.verdict.lower()


@pytest.mark.parametrize("seed", range(100))
def test_planted_relations_are_recovered(seed):
    rng = np.random.default_rng(seed)
    q = (2, 3, 4, 5)[seed % 4]
    ctx = field(q)
    D = int(rng.integers(0, 3))
    k = int(rng.integers(2, 4))
    vals = random_values(ctx, rng, k - 1)
    coeffs = [ThetaPoly.random(ctx, rng, D) for _ in range(k - 1)]
    planted = sum((embed_theta_poly(a) * v for a, v in zip(coeffs, vals)), PiSeries.zero(ctx))
    values = [(f"v{j}", v) for j, v in enumerate(vals)] + [("w", planted)]
    res = linear_scan(RelationQuery(values, D))
    assert res.relations
    top = res.window[1]
    for rel in res.relations:
        assert rel.residual_valuation >= top


def test_empty_scan_stays_empty_with_more_precision():
    ctx = field(3)
    rng = np.random.default_rng(3)
    vals = random_values(ctx, rng, 3, prec=300)
    short = [(f"v{j}", v.truncate(150)) for j, v in enumerate(vals)]
    full = [(f"v{j}", v) for j, v in enumerate(vals)]
    assert not linear_scan(RelationQuery(short, 2)).relations
    assert not linear_scan(RelationQuery(full, 2)).relations


def test_insufficient_precision():
    ctx = field(3)
    vals = [(f"v{j}", v) for j, v in enumerate(random_values(ctx, np.random.default_rng(1), 3, prec=30))]
    with pytest.raises(PrecisionError, match="insufficient precision for requested bounds"):
        linear_scan(RelationQuery(vals, 5))


def test_monomial_guard():
    ctx = field(3)
    vals = [(f"v{j}", v) for j, v in enumerate(random_values(ctx, np.random.default_rng(1), 12))]
    with pytest.raises(ValueError, match="too many monomials"):
        monomial_scan(RelationQuery(vals, 0, 6))


# -- gamma reconstruction ---------------------------------------------------------------


def test_gamma_identical_jets():
    ctx = field(3)
    f = TateJet.random(ctx, np.random.default_rng(2), 3, prec=80, slope=6)
    res = gamma_reconstruct(f, f, 2)
    assert res.ok and res.a == [1] and res.b == [1]


def test_gamma_pth_power():
    ctx = field(3)
    f = at_series_jet(ctx, Index((3,)), PLAN)
    g = at_series_jet(ctx, Index((1,)), PLAN) ** 3
    res = gamma_reconstruct(f, g, 4)
    assert res.ok and any(res.a) and any(res.b)


def test_gamma_unrelated_jets():
    ctx = field(3)
    rng = np.random.default_rng(6)
    f = TateJet.random(ctx, rng, 3, prec=120, slope=6)
    g = TateJet.random(ctx, rng, 3, prec=120, slope=6)
    assert not gamma_reconstruct(f, g, 2).ok
