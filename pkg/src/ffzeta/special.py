"""Concrete special values: Carlitz factorials, Anderson-Thakur polynomials,
the period series Omega, power sums and multiple zeta values, and jets of
Carlitz multiple polylogarithms (CMPLs).
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass, replace

import numpy as np

from .fq import FqContext, binom_mod_p
from .jets import INF, TateJet, jet_mul
from .poly import Index, TThetaPoly, ThetaPoly, at_condition_check
from .series import PiSeries, PrecisionError, embed_theta_poly


@dataclass(frozen=True)
class PrecisionPlan:
    """Working precision for special-value computations.

    ``pi_prec`` is the requested number of varpi-digits, ``jet_order`` the
    reported jet order and ``tail_bound_log`` the varpi-valuation that every
    truncated infinite sum or product must certifiably exceed (defaults to
    ``pi_prec``).
    """

    pi_prec: int = 240
    jet_order: int = 4
    tail_bound_log: int | None = None

    def __post_init__(self):
        if self.pi_prec < 1:
            raise ValueError("pi_prec must be positive")
        if self.jet_order < 0:
            raise ValueError("jet_order must be nonnegative")
        if self.tail_bound_log is None:
            object.__setattr__(self, "tail_bound_log", self.pi_prec)
        if self.tail_bound_log < self.pi_prec:
            raise ValueError("tail_bound_log must be at least pi_prec")

    def with_order(self, order: int) -> "PrecisionPlan":
        return replace(self, jet_order=order)

    def to_json(self) -> dict:
        return {"pi_prec": self.pi_prec, "jet_order": self.jet_order, "tail_bound_log": self.tail_bound_log}


# ---------------------------------------------------------------------------
# Carlitz factorials
# ---------------------------------------------------------------------------


@functools.lru_cache(maxsize=None)
def carlitz_D(ctx: FqContext, i: int) -> ThetaPoly:
    """D_i = (theta^(q^i) - theta) * D_{i-1}^q, D_0 = 1."""
    if i < 0:
        raise ValueError("i must be nonnegative")
    if i == 0:
        return ThetaPoly.constant(ctx, 1)
    theta = ThetaPoly.theta(ctx)
    return (ThetaPoly.monomial(ctx, ctx.q**i) - theta) * carlitz_D(ctx, i - 1).twist(1)


def monic_polys(ctx: FqContext, d: int):
    """All monic polynomials of degree d, as ThetaPolys."""
    one = np.array([1], dtype=np.int64)
    for tail in itertools.product(range(ctx.q), repeat=d):
        yield ThetaPoly(ctx, np.concatenate([np.array(tail, dtype=np.int64), one]))


def carlitz_D_bruteforce(ctx: FqContext, i: int) -> ThetaPoly:
    """Product of all monic polynomials of degree i (test oracle)."""
    out = ThetaPoly.constant(ctx, 1)
    for a in monic_polys(ctx, i):
        out = out * a
    return out


def q_digits(n: int, q: int) -> list[int]:
    digits = []
    while n:
        digits.append(n % q)
        n //= q
    return digits


@functools.lru_cache(maxsize=None)
def carlitz_gamma(ctx: FqContext, n: int) -> ThetaPoly:
    """Gamma_n = prod_i D_i^(s_i) where s_i are the q-adic digits of n - 1."""
    if n < 1:
        raise ValueError("carlitz_gamma needs n >= 1")
    out = ThetaPoly.constant(ctx, 1)
    for i, digit in enumerate(q_digits(n - 1, ctx.q)):
        if digit:
            out = out * carlitz_D(ctx, i) ** digit
    return out


def _in_t(poly: ThetaPoly) -> TThetaPoly:
    """Rename theta to t: a polynomial in t with F_q coefficients."""
    return TThetaPoly(poly.ctx, np.asarray(poly.c).reshape(-1, 1))


# ---------------------------------------------------------------------------
# Anderson-Thakur polynomials
# ---------------------------------------------------------------------------


@functools.lru_cache(maxsize=None)
def _at_numerator(ctx: FqContext, i: int) -> TThetaPoly:
    """prod_{j=1}^{i} (t^(q^i) - theta^(q^j))."""
    q = ctx.q
    t_qi = TThetaPoly(ctx, np.eye(q**i + 1, 1, -q**i, dtype=np.int64))
    out = TThetaPoly.constant(ctx, 1)
    for j in range(1, i + 1):
        out = out * (t_qi - TThetaPoly.constant(ctx, ThetaPoly.monomial(ctx, q**j)))
    return out


@functools.lru_cache(maxsize=None)
def _at_generating_coeff(ctx: FqContext, s: int) -> tuple[TThetaPoly, tuple[int, ...]]:
    """Coefficient of x^s in the inverse generating series.

    Returned as (numerator, exponents e) meaning numerator / prod_i D_i(t)^e_i.
    Uses h_s = sum_{q^i <= s} g_i h_{s - q^i} with g_i = N_i / D_i(t).
    """
    if s == 0:
        return TThetaPoly.constant(ctx, 1), ()
    q = ctx.q
    terms = []
    i = 0
    while q**i <= s:
        num, exps = _at_generating_coeff(ctx, s - q**i)
        exps = list(exps) + [0] * max(0, i + 1 - len(exps))
        exps[i] += 1
        terms.append((_at_numerator(ctx, i) * num, exps))
        i += 1
    width = max(len(e) for _, e in terms)
    common = [max((e[k] if k < len(e) else 0) for _, e in terms) for k in range(width)]
    total = TThetaPoly(ctx)
    for num, e in terms:
        factor = TThetaPoly.constant(ctx, 1)
        for k in range(width):
            missing = common[k] - (e[k] if k < len(e) else 0)
            if missing:
                factor = factor * _in_t(carlitz_D(ctx, k)) ** missing
        total = total + num * factor
    return total, tuple(common)


@functools.lru_cache(maxsize=None)
def at_polynomial(ctx: FqContext, s: int) -> TThetaPoly:
    """Anderson-Thakur polynomial H_s in A[t].

    The coefficient of x^s in the inverse of
    1 - sum_i [prod_{j=1}^i (t^(q^i) - theta^(q^j)) / prod_{j=0}^{i-1} (t^(q^i) - t^(q^j))] x^(q^i)
    equals H_s / Gamma_{s+1}|_{theta=t}.
    """
    if s < 0:
        raise ValueError("s must be nonnegative")
    num, exps = _at_generating_coeff(ctx, s)
    digits = q_digits(s, ctx.q)
    width = max(len(exps), len(digits))
    result = num
    divisor = TThetaPoly.constant(ctx, 1)
    for k in range(width):
        net = (digits[k] if k < len(digits) else 0) - (exps[k] if k < len(exps) else 0)
        Dk = _in_t(carlitz_D(ctx, k))
        if net > 0:
            result = result * Dk**net
        elif net < 0:
            divisor = divisor * Dk ** (-net)
    return result.exact_div_t_poly(divisor)


# ---------------------------------------------------------------------------
# Omega and the Carlitz period
# ---------------------------------------------------------------------------


def _theta_neg_power(ctx: FqContext, m: int) -> PiSeries:
    """theta^(-m) = (-1)^m varpi^((q-1)m), exact."""
    coeff = 1 if m % 2 == 0 else int(ctx.neg(np.int64(1)))
    return PiSeries.monomial(ctx, (ctx.q - 1) * m, coeff)


def _omega_factor_count(q: int, target: float) -> int:
    """Least I with q + (q-1)(q^(I+1) - 1) >= target."""
    I = 1
    while q + (q - 1) * (q ** (I + 1) - 1) < target:
        I += 1
    return I


def omega_jet(ctx: FqContext, plan: PrecisionPlan = PrecisionPlan(), order: int | None = None, target=None) -> TateJet:
    """Expansion of Omega at t = theta.

    Omega = varpi^q prod_{i>=1} (1 - t/theta^(q^i)).  Each factor is exactly
    (1 - theta^(1-q^i)) - theta^(-q^i) eps.  The omitted factors i > I differ
    from 1 by something of Gauss valuation >= (q-1)(q^(I+1) - 1) on the disc
    |eps| <= |theta|, which bounds both the coefficient precision and the tail.
    """
    q = ctx.q
    N = plan.jet_order if order is None else order
    target = plan.tail_bound_log if target is None else target
    I = _omega_factor_count(q, target)
    jet = TateJet.constant(ctx, N, PiSeries.monomial(ctx, q))
    for i in range(1, I + 1):
        qi = q**i
        factor = TateJet.from_coeffs(
            ctx,
            [PiSeries.one(ctx) - _theta_neg_power(ctx, qi - 1), -_theta_neg_power(ctx, qi)],
            order=N,
        )
        jet = jet_mul(jet, factor)
    bound = jet.gauss_val() + (q - 1) * (q ** (I + 1) - 1)
    return with_tail_bound(jet, bound)


def with_tail_bound(jet: TateJet, bound: float) -> TateJet:
    """Account for an omitted remainder of Gauss valuation >= bound."""
    lam = jet.ctx.q - 1
    precs = np.minimum(jet.precs, bound + lam * np.arange(jet.order + 1))
    return TateJet(jet.ctx, jet.order, jet.lo, jet.data, precs, min(jet.tail, bound))


def pi_tilde(ctx: FqContext, plan: PrecisionPlan = PrecisionPlan()) -> PiSeries:
    """The Carlitz period 1/Omega(theta), to ``plan.pi_prec`` digits."""
    q = ctx.q
    alpha0 = omega_jet(ctx, plan, order=0, target=plan.tail_bound_log + 2 * q).coeff(0)
    return alpha0.inverse().truncate(plan.pi_prec)


# ---------------------------------------------------------------------------
# Power sums and MZVs by enumeration
# ---------------------------------------------------------------------------

ORACLE_MAX_DEGREE = 4


@functools.lru_cache(maxsize=None)
def power_sum(ctx: FqContext, d: int, k: int, prec: int) -> PiSeries:
    """S_d(k) = sum over monic a of degree d of a^(-k), modulo varpi^prec."""
    if d > ORACLE_MAX_DEGREE:
        raise ValueError("oracle cutoff exceeded")
    if d < 0 or k < 1:
        raise ValueError("power_sum needs d >= 0 and k >= 1")
    total = PiSeries.zero(ctx, prec)
    for a in monic_polys(ctx, d):
        total = total + embed_theta_poly(a**k).inverse(prec)
    return total


def mzv_certificate(ctx: FqContext, s: Index, dmax: int) -> int:
    """Chains with d_1 > dmax contribute valuation >= (q-1) s_1 (dmax+1)."""
    return (ctx.q - 1) * s[0] * (dmax + 1)


def _degree_chains(depth: int, dmax: int):
    return itertools.combinations(range(dmax, -1, -1), depth)


def mzv_oracle(ctx: FqContext, s: Index, dmax: int = 3, prec: int | None = None) -> tuple[PiSeries, int]:
    """zeta_A(s) summed over degree chains dmax >= d_1 > ... > d_r >= 0.

    Returns (value, certificate); the value is truncated at the certificate.
    """
    if dmax > ORACLE_MAX_DEGREE:
        raise ValueError("oracle cutoff exceeded")
    cert = mzv_certificate(ctx, s, dmax)
    prec = cert if prec is None else min(prec, cert)
    total = PiSeries.zero(ctx, prec)
    for chain in _degree_chains(s.depth, dmax):
        term = PiSeries.one(ctx)
        for d, k in zip(chain, s):
            term = term * power_sum(ctx, d, k, prec)
        total = total + term
    return total.truncate(prec), cert


def mzv_naive(ctx: FqContext, s: Index, dmax: int, prec: int) -> PiSeries:
    """Tuple-by-tuple enumeration of the same truncated sum (cross-check, dmax <= 2)."""
    if dmax > 2:
        raise ValueError("oracle cutoff exceeded")
    total = PiSeries.zero(ctx, prec)
    for chain in _degree_chains(s.depth, dmax):
        for tup in itertools.product(*(list(monic_polys(ctx, d)) for d in chain)):
            denom = ThetaPoly.constant(ctx, 1)
            for a, k in zip(tup, s):
                denom = denom * a**k
            total = total + embed_theta_poly(denom).inverse(prec)
    return total


# ---------------------------------------------------------------------------
# Carlitz multiple polylogarithms
# ---------------------------------------------------------------------------


def _norm_bound(u: TThetaPoly, s: int, i: int, q: int) -> int:
    """Lower bound for the Gauss valuation of u^(i) / Q_i^s on |t| <= |theta|."""
    worst = max(q**i * (row.size - 1) + m for m, row in enumerate(u.a) if row.any())
    return s * (q ** (i + 1) - q) - (q - 1) * worst


def _pole_factor(ctx: FqContext, k: int, s: int, order: int, abs_prec) -> TateJet:
    """Jet of (t - theta^(q^k))^(-s) = (d + eps)^(-s), d = theta - theta^(q^k).

    Coefficient m is C(-s, m) d^(-s-m); every row is known to at least
    ``abs_prec`` (rounded up so that nearby requests share one cache entry).
    """
    return _pole_factor_cached(ctx, k, s, order, -(-int(abs_prec) // 8) * 8)


@functools.lru_cache(maxsize=1024)
def _pole_factor_cached(ctx: FqContext, k: int, s: int, order: int, abs_prec: int) -> TateJet:
    q, p = ctx.q, ctx.p
    d = embed_theta_poly(ThetaPoly.theta(ctx) - ThetaPoly.monomial(ctx, q**k))
    vx = (q - 1) * q**k
    # at least one relative digit, so powers of x never lose precision
    rel = max(abs_prec - s * vx, 1)
    x = d.inverse(rel + vx)
    power = x**s
    coeffs = []
    for m in range(order + 1):
        b = binom_mod_p(s + m - 1, m, p)
        c = power.scale(b if m % 2 == 0 else -b) if b else PiSeries.zero(ctx)
        coeffs.append(c.truncate(abs_prec))
        power = power * x
    lam = q - 1
    tail = vx * (s + order + 1) - lam * (order + 1)
    return TateJet.from_coeffs(ctx, coeffs, order=order, tail=tail)


def _factor_terms(u: TThetaPoly, s: int, I: int, order: int, abs_target) -> list[TateJet | None]:
    """F(i) = u^(i)(theta+eps) * Q_i^(-s) for 0 <= i <= I, each to abs_target."""
    ctx = u.ctx
    q = ctx.q
    ujets, vmin = [], []
    for i in range(I + 1):
        uj = TateJet.from_tpoly(u.twist(i), order)
        ujets.append(uj)
        vmin.append(uj.residual_valuation() if uj.data.shape[1] else INF)
    # val of Q_i^(-s) is s * V_i with V_i = (q-1)(q + ... + q^i)
    V = [s * (q ** (i + 1) - q) for i in range(I + 1)]
    need = [abs_target - vmin[i] if vmin[i] != INF else -INF for i in range(I + 1)]
    # precision P_i to keep for Q_i^(-s) so that every later step still works
    keep = [-INF] * (I + 1)
    best = -INF
    for i in range(I, -1, -1):
        best = max(best - (V[i + 1] - V[i]) if i < I else best, need[i])
        # never drop the leading digit: a truncated-to-zero Q forgets its valuation
        keep[i] = max(best, V[i] + 1)
    # rounding up only adds precision, and lets different u share one chain
    keeps = tuple(_round_up(k, 16) for k in keep[1:])
    out = []
    for i in range(I + 1):
        if vmin[i] == INF:
            out.append(None)
        else:
            Q = _pole_chain(ctx, s, order, keeps[:i])
            out.append(jet_mul(ujets[i], Q).truncate_precision(abs_target))
    return out


def _round_up(x, step: int):
    return x if x in (INF, -INF) else -(-int(x) // step) * step


@functools.lru_cache(maxsize=512)
def _pole_chain(ctx: FqContext, s: int, order: int, keeps: tuple) -> TateJet:
    """Q_i^(-s) with i = len(keeps), row k of every partial product kept to keeps[k-1]."""
    i = len(keeps)
    if i == 0:
        return TateJet.one(ctx, order)
    V_prev = s * (ctx.q**i - ctx.q)
    factor = _pole_factor(ctx, i, s, order, keeps[-1] - V_prev + 2)
    return jet_mul(_pole_chain(ctx, s, order, keeps[:-1]), factor).truncate_precision(keeps[-1] + 2)


def _outer_cutoff(us, s: Index, q: int, target) -> tuple[int, float]:
    """Least I whose omitted terms i_1 > I have Gauss valuation >= target."""
    inner = 0
    for u, sj in zip(us[1:], s.parts[1:]):
        inner += min(_norm_bound(u, sj, i, q) for i in range(4))
    I = s.depth - 1
    while True:
        bound = _norm_bound(us[0], s[0], I + 1, q) + inner
        if bound >= target:
            return I, bound
        if I > 64:
            raise PrecisionError("convergence too slow for the requested precision")
        I += 1


def cmpl_jet(
    us,
    s: Index,
    plan: PrecisionPlan = PrecisionPlan(),
    order: int | None = None,
    builtin: bool = False,
    target=None,
) -> TateJet:
    """Jet of the CMPL sum_{i_1 > ... > i_d >= 0} prod_j u_j^(i_j) / Q_{i_j}^(s_j).

    Q_i = prod_{k=1}^i (t - theta^(q^k)).  The outer index stops at the least I
    whose omitted tail is certified beyond the target; that bound also caps the
    precision of every returned coefficient and the jet's own tail bound.
    """
    us = tuple(us)
    if len(us) != s.depth:
        raise ValueError("u and s must have the same length")
    N = plan.jet_order if order is None else order
    target = plan.tail_bound_log if target is None else target
    if not builtin:
        for u, sj in zip(us, s):
            if not at_condition_check(u, sj):
                raise ValueError("convergence condition violated")
    return _cmpl_cached(us, s, N, target)


@functools.lru_cache(maxsize=256)
def _cmpl_cached(us: tuple, s: Index, N: int, target) -> TateJet:
    ctx = us[0].ctx
    q = ctx.q
    if any(u.is_zero() for u in us):
        return TateJet.zero(ctx, N)
    I, tail_bound = _outer_cutoff(us, s, q, target)
    lows = [min(0, min(_norm_bound(u, sj, i, q) for i in range(4))) for u, sj in zip(us, s)]
    total_low = sum(lows)
    terms = []
    for u, sj, low in zip(us, s, lows):
        terms.append(_factor_terms(u, sj, I, N, target - (total_low - low)))
    # innermost partial sums, then work outwards
    d = s.depth
    acc = None
    for j in range(d - 1, -1, -1):
        prefix = [None] * (I + 2)
        running = None
        for i in range(I + 1):
            prefix[i] = running
            term = terms[j][i]
            if term is not None and j < d - 1:
                term = None if acc[i] is None else jet_mul(term, acc[i])
            if term is not None:
                running = term if running is None else running + term
        prefix[I + 1] = running
        acc = prefix
    result = acc[I + 1] if acc[I + 1] is not None else TateJet.zero(ctx, N)
    return with_tail_bound(result, tail_bound)


def at_series_jet(ctx: FqContext, s: Index, plan: PrecisionPlan = PrecisionPlan(), order=None, target=None) -> TateJet:
    """The Anderson-Thakur series: the CMPL with u_j = H_{s_j - 1}."""
    us = [at_polynomial(ctx, sj - 1) for sj in s]
    return cmpl_jet(us, s, plan, order=order, builtin=True, target=target)


def gamma_product(ctx: FqContext, s: Index) -> ThetaPoly:
    out = ThetaPoly.constant(ctx, 1)
    for sj in s:
        out = out * carlitz_gamma(ctx, sj)
    return out


def divide_by_poly(x: PiSeries, a: ThetaPoly) -> PiSeries:
    """x / a for a nonzero polynomial a, keeping all of x's precision."""
    e = embed_theta_poly(a)
    if x.prec == INF:
        raise ValueError("exact division needs a finite precision")
    vinv = -e.val
    xv = x.val if not x.is_zero() else x.prec
    return x * e.inverse(x.prec - xv + vinv)


def zeta_via_at(ctx: FqContext, s: Index, plan: PrecisionPlan = PrecisionPlan()) -> PiSeries:
    """zeta_A(s) = (coefficient 0 of the AT series) / (Gamma_{s_1} ... Gamma_{s_d})."""
    beta0 = at_series_jet(ctx, s, plan, order=0).coeff(0)
    return divide_by_poly(beta0, gamma_product(ctx, s)).truncate(plan.pi_prec)
