"""Bounded-height relation search among varpi-adic values.

A relation sum_i a_i(theta) v_i = 0 with deg a_i <= D is linear in the
F_q-coefficients of the a_i, and each varpi-exponent inside the certified
window gives one F_q-linear equation.  We assemble that system, take its
nullspace by Gaussian elimination over F_q and re-check every candidate by
substituting it back.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field as dc_field

import numpy as np

from .fq import FqContext, FqElem
from .jets import INF, TateJet
from .poly import TThetaPoly, ThetaPoly
from .series import PiSeries, PrecisionError, embed_theta_poly

EQUATION_MARGIN = 40
DEFAULT_SLACK = 10
MAX_MONOMIALS = 2000


# ---------------------------------------------------------------------------
# Linear algebra over F_q
# ---------------------------------------------------------------------------


def rref(ctx: FqContext, A: np.ndarray) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form of a code matrix and its pivot columns."""
    M = np.array(A, dtype=np.int64, copy=True)
    rows, cols = M.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(M[r:, c])
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            M[[r, piv]] = M[[piv, r]]
        M[r] = ctx.scale(ctx.inverse(int(M[r, c])), M[r])
        others = np.flatnonzero(M[:, c])
        others = others[others != r]
        if others.size:
            factors = M[others, c]
            M[others] = ctx.sub(M[others], ctx.mul(factors[:, None], M[r][None, :]))
        pivots.append(c)
        r += 1
    return M, pivots


def nullspace(ctx: FqContext, A: np.ndarray) -> list[np.ndarray]:
    """Basis of {x : A x = 0} over F_q."""
    A = np.asarray(A, dtype=np.int64)
    cols = A.shape[1]
    if A.shape[0] == 0:
        return [np.eye(cols, dtype=np.int64)[k] for k in range(cols)]
    R, pivots = rref(ctx, A)
    free = [c for c in range(cols) if c not in set(pivots)]
    basis = []
    for f in free:
        v = np.zeros(cols, dtype=np.int64)
        v[f] = 1
        for row, pc in enumerate(pivots):
            v[pc] = ctx.neg(R[row, f])
        basis.append(v)
    return basis


# ---------------------------------------------------------------------------
# Queries and relations
# ---------------------------------------------------------------------------


@dataclass
class RelationQuery:
    values: list  # (label, PiSeries)
    theta_degree_bound: int = 0
    monomial_degree_bound: int = 1
    slack: int = DEFAULT_SLACK

    @property
    def ctx(self) -> FqContext:
        return self.values[0][1].ctx

    def to_json(self) -> dict:
        return {
            "labels": [label for label, _ in self.values],
            "theta_degree_bound": self.theta_degree_bound,
            "monomial_degree_bound": self.monomial_degree_bound,
            "slack": self.slack,
        }


@dataclass
class Relation:
    labels: list
    coeffs: list  # ThetaPoly per column label
    residual_valuation: float

    def to_json(self) -> dict:
        return {
            "coeffs": {label: c.to_json() for label, c in zip(self.labels, self.coeffs) if not c.is_zero()},
            "residual_val": None if self.residual_valuation == INF else int(self.residual_valuation),
        }


@dataclass
class ScanResult:
    query: RelationQuery
    relations: list = dc_field(default_factory=list)
    window: tuple[int, int] = (0, 0)

    @property
    def verdict(self) -> str:
        if self.relations:
            return "RELATION-FOUND"
        return (
            f"NO-RELATION-AT-HEIGHT({self.query.theta_degree_bound},"
            f"{self.query.monomial_degree_bound},{self.window[1]})"
        )

    def to_json(self) -> dict:
        return {
            "query": self.query.to_json(),
            "window": list(self.window),
            "basis": [r.to_json() for r in self.relations],
            "verdict": self.verdict,
        }


def _theta_power_times(v: PiSeries, j: int) -> PiSeries:
    """theta^j * v, exact shift with sign (-1)^j."""
    q = v.ctx.q
    out = v.shift(-(q - 1) * j)
    return -out if j % 2 else out


def _normalise(ctx: FqContext, vec: np.ndarray) -> np.ndarray:
    nz = np.flatnonzero(vec)
    if nz.size == 0:
        return vec
    # first nonzero entry becomes 1
    return ctx.scale(ctx.inverse(int(vec[nz[0]])), vec)


def _scan_columns(labels, series, D: int, slack: int, ctx: FqContext):
    cols = []
    for v in series:
        for j in range(D + 1):
            cols.append(_theta_power_times(v, j))
    nonzero = [c for c in cols if not c.is_zero()]
    lo = min((c.val for c in nonzero), default=0)
    hi = min(c.prec for c in cols)
    if hi == INF:
        raise PrecisionError("insufficient precision for requested bounds")
    top = int(hi) - slack
    lo = int(min(lo, top))
    return cols, lo, top


def linear_scan(query: RelationQuery) -> ScanResult:
    """All F_q[theta]-linear relations of theta-degree <= D among the values."""
    ctx = query.ctx
    labels = [label for label, _ in query.values]
    series = [v for _, v in query.values]
    D = query.theta_degree_bound
    cols, lo, top = _scan_columns(labels, series, D, query.slack, ctx)
    unknowns = len(cols)
    if top - lo < unknowns + EQUATION_MARGIN:
        raise PrecisionError("insufficient precision for requested bounds")
    A = np.stack([c.window(lo, top) for c in cols], axis=1)
    basis = nullspace(ctx, A)
    rels = []
    for vec in basis:
        vec = _normalise(ctx, vec)
        coeffs = [ThetaPoly(ctx, vec[i * (D + 1) : (i + 1) * (D + 1)]) for i in range(len(series))]
        total = PiSeries.zero(ctx)
        for a, v in zip(coeffs, series):
            if not a.is_zero():
                total = total + embed_theta_poly(a) * v
        resid = total.prec if total.is_zero() else total.val
        if resid < min(c.prec for c in cols) - query.slack:
            raise ArithmeticError("relation failed re-verification")
        rels.append(Relation(labels, coeffs, resid))
    return ScanResult(query, rels, (lo, top))


def monomials(n_values: int, degree: int):
    """Exponent vectors of total degree <= degree (constant first)."""
    out = []
    for total in range(degree + 1):
        for combo in itertools.combinations_with_replacement(range(n_values), total):
            e = [0] * n_values
            for k in combo:
                e[k] += 1
            out.append(tuple(e))
    return out


def monomial_scan(query: RelationQuery) -> ScanResult:
    """linear_scan over all monomials of total degree <= Dm in the values."""
    ctx = query.ctx
    labels = [label for label, _ in query.values]
    series = [v for _, v in query.values]
    exps = monomials(len(series), query.monomial_degree_bound)
    if len(exps) > MAX_MONOMIALS:
        raise ValueError("too many monomials")
    cache: dict[tuple, PiSeries] = {}

    def mono(e):
        if e in cache:
            return cache[e]
        if sum(e) == 0:
            val = PiSeries.one(ctx)
        else:
            k = max(i for i, x in enumerate(e) if x)
            prev = list(e)
            prev[k] -= 1
            val = mono(tuple(prev)) * series[k]
        cache[e] = val
        return val

    mono_values = []
    for e in exps:
        name = "*".join(f"{labels[i]}^{x}" if x > 1 else labels[i] for i, x in enumerate(e) if x) or "1"
        mono_values.append((name, mono(e)))
    sub = RelationQuery(mono_values, query.theta_degree_bound, 1, query.slack)
    result = linear_scan(sub)
    return ScanResult(query, result.relations, result.window)


# ---------------------------------------------------------------------------
# Rational-function proportionality between jets
# ---------------------------------------------------------------------------


@dataclass
class GammaResult:
    ok: bool
    a: list | None = None  # F_q codes, t-degree ascending
    b: list | None = None
    residual_valuation: float | None = None

    def to_json(self, ctx: FqContext) -> dict:
        if not self.ok:
            return {"pass": False}
        return {
            "pass": True,
            "a": [list(ctx.coords(int(c))) for c in self.a],
            "b": [list(ctx.coords(int(c))) for c in self.b],
            "residual_val": None if self.residual_valuation == INF else int(self.residual_valuation),
        }


def _t_power_jet(ctx: FqContext, k: int, order: int) -> TateJet:
    arr = np.zeros((k + 1, 1), dtype=np.int64)
    arr[k, 0] = 1
    return TateJet.from_tpoly(TThetaPoly(ctx, arr), order)


def gamma_reconstruct(f: TateJet, g: TateJet, B: int = 4, slack: int = DEFAULT_SLACK) -> GammaResult:
    """Find a, b in F_q[t] of degree <= B with a(t) f = b(t) g, preferring least degree."""
    if f.order != g.order or f.ctx != g.ctx:
        raise ValueError("jets must share order and context")
    ctx = f.ctx
    order = f.order
    for D in range(B + 1):
        cols = []
        for k in range(D + 1):
            cols.append(_t_power_jet(ctx, k, order) * f)
        for k in range(D + 1):
            cols.append(-(_t_power_jet(ctx, k, order) * g))
        blocks = []
        for r in range(order + 1):
            cs = [c.coeff(r) for c in cols]
            nonzero = [c for c in cs if not c.is_zero()]
            lo = min((c.val for c in nonzero), default=0)
            top = int(min(c.prec for c in cs)) - slack
            if top > lo:
                blocks.append(np.stack([c.window(int(lo), top) for c in cs], axis=1))
        if not blocks:
            raise PrecisionError("insufficient precision for requested bounds")
        A = np.vstack(blocks)
        if A.shape[0] < len(cols) + EQUATION_MARGIN:
            raise PrecisionError("insufficient precision for requested bounds")
        basis = nullspace(ctx, A)
        if basis:
            vec = _normalise(ctx, basis[0])
            a, b = list(vec[: D + 1]), list(vec[D + 1 :])
            total = None
            for c, x in zip(cols, vec):
                if x:
                    term = c.scale(PiSeries.constant(ctx, FqElem(ctx, int(x))))
                    total = term if total is None else total + term
            resid = total.residual_valuation() if total is not None else INF
            return GammaResult(True, [int(x) for x in a], [int(x) for x in b], resid)
    return GammaResult(False)
