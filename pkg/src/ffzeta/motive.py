"""Difference-equation matrices for CMPL motives and their period matrices.

Phi is only ever stored after one forward twist (entries in A[t], with
t - theta^q in place of t - theta), so the rigidity check runs in the form
Psi = Phi^(1) Psi^(1).  Psi is a matrix of jets at t = theta.

The second half of the module builds elements of the explicit matrix varieties
G_{i,m} (block lower-triangular matrices parametrised by a_0..a_n and one
coordinate family x per subsequence of the index) and tests membership.
"""

from __future__ import annotations

import functools
import itertools
import warnings
from dataclasses import dataclass, field as dc_field

import numpy as np

from .fq import FqContext
from .jets import (
    INF,
    JetMatrix,
    TateJet,
    direct_sum,
    jet_direct_sum,
    jet_inv,
    jet_mul,
    prolong,
    prolong_entries,
)
from .poly import Index, TThetaPoly, ThetaPoly
from .series import PiSeries, PrecisionError, embed_theta_poly
from .special import PrecisionPlan, at_polynomial, cmpl_jet, omega_jet


# ---------------------------------------------------------------------------
# Sub-indices
# ---------------------------------------------------------------------------


def sub_prime_positions(s: Index) -> list[tuple[int, ...]]:
    """Position tuples of all nonempty subsequences, by depth then lexicographically."""
    r = s.depth
    return [c for d in range(1, r + 1) for c in itertools.combinations(range(r), d)]


def sub_prime(s: Index) -> list[Index]:
    """All nonempty subsequences of s in the enumeration order used for blocks."""
    if len(set(s.parts)) != s.depth:
        warnings.warn("index has repeated parts; subsequences may coincide", stacklevel=2)
    return [Index(tuple(s[k] for k in pos)) for pos in sub_prime_positions(s)]


def default_us(ctx: FqContext, s: Index) -> list[TThetaPoly]:
    """The Anderson-Thakur choice u_j = H_{s_j - 1}."""
    return [at_polynomial(ctx, sj - 1) for sj in s]


def random_admissible_us(ctx: FqContext, rng: np.random.Generator, s: Index, t_degree: int = 1) -> list[TThetaPoly]:
    """Random u_j in A[t] of the largest theta-degree the convergence condition allows."""
    q = ctx.q
    out = []
    for sj in s:
        deg = (sj * q - 1) // (q - 1)
        while True:
            u = TThetaPoly.random(ctx, rng, t_degree, deg)
            if not u.is_zero():
                break
        out.append(u)
    return out


def twist_working_order(q: int, n: int, target: int) -> int:
    """Jet order at which a once-twisted jet still certifies ``target`` up to order n.

    Each unstored coefficient costs (q-1)^2 per order under one twist, so the
    stored range has to reach about target / (q (q-1)^2) beyond n.
    """
    return n + -(-target // (q * (q - 1) ** 2)) + 2


# ---------------------------------------------------------------------------
# Phi (stored twisted)
# ---------------------------------------------------------------------------


class PhiMatrix:
    """Square matrix over A[t] holding Phi^(1), plus a descriptor."""

    def __init__(self, entries, descriptor: dict | None = None):
        self.entries = [list(row) for row in entries]
        self.rows = len(self.entries)
        self.cols = len(self.entries[0]) if self.rows else 0
        if self.rows != self.cols or any(len(r) != self.cols for r in self.entries):
            raise ValueError("PhiMatrix must be square")
        self.descriptor = descriptor or {}

    @property
    def ctx(self) -> FqContext:
        return self.entries[0][0].ctx

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    def __getitem__(self, idx) -> TThetaPoly:
        i, j = idx
        return self.entries[i][j]

    def prolong(self, m: int) -> "PhiMatrix":
        ctx = self.ctx
        grid = prolong_entries(self.entries, m, lambda e, k: e.hyperderiv(k), lambda: TThetaPoly(ctx))
        return PhiMatrix(grid, {**self.descriptor, "prolongation": self.descriptor.get("prolongation", 0) + m})

    def twist(self, k: int = 1) -> "PhiMatrix":
        return PhiMatrix([[e.twist(k) for e in row] for row in self.entries], self.descriptor)

    def eval_jet(self, order: int) -> JetMatrix:
        return JetMatrix([[TateJet.from_tpoly(e, order) for e in row] for row in self.entries])

    def is_lower_triangular(self) -> bool:
        return all(self.entries[i][j].is_zero() for i in range(self.rows) for j in range(i + 1, self.cols))

    def det(self) -> TThetaPoly:
        if self.is_lower_triangular():
            out = TThetaPoly.constant(self.ctx, 1)
            for i in range(self.rows):
                out = out * self.entries[i][i]
            return out
        return _laplace_det(self.entries)

    def to_json(self) -> dict:
        return {
            "descriptor": self.descriptor,
            "entries": [[e.to_json() for e in row] for row in self.entries],
        }


def _laplace_det(entries) -> TThetaPoly:
    n = len(entries)
    if n == 1:
        return entries[0][0]
    total = None
    for j in range(n):
        if entries[0][j].is_zero():
            continue
        minor = [row[:j] + row[j + 1 :] for row in entries[1:]]
        term = entries[0][j] * _laplace_det(minor)
        if j % 2:
            term = -term
        total = term if total is None else total + term
    return total if total is not None else TThetaPoly(entries[0][0].ctx)


def _lin_power(ctx: FqContext, w: int) -> TThetaPoly:
    return TThetaPoly.t_minus_theta_power(ctx, 1) ** w


def build_phi_twisted(us, s: Index) -> PhiMatrix:
    """Phi[u;s]^(1): diagonal (t-theta^q)^(s_j+...+s_d) (last entry 1), subdiagonal times u_j."""
    us = list(us)
    if len(us) != s.depth:
        raise ValueError("u and s must have the same length")
    ctx = us[0].ctx
    d = s.depth
    zero = TThetaPoly(ctx)
    grid = [[zero] * (d + 1) for _ in range(d + 1)]
    for j in range(d):
        lin = _lin_power(ctx, s.tail_weight(j))
        grid[j][j] = lin
        grid[j + 1][j] = lin * us[j]
    grid[d][d] = TThetaPoly.constant(ctx, 1)
    return PhiMatrix(grid, {"kind": "cmpl", "index": list(s.parts)})


def carlitz_phi_twisted(ctx: FqContext) -> PhiMatrix:
    return PhiMatrix([[TThetaPoly.t_minus_theta_power(ctx, 1)]], {"kind": "carlitz"})


# ---------------------------------------------------------------------------
# Psi (jets)
# ---------------------------------------------------------------------------


@functools.lru_cache(maxsize=256)
def _omega_power(ctx: FqContext, plan: PrecisionPlan, order: int, w: int) -> TateJet:
    if w == 0:
        return TateJet.one(ctx, order)
    return omega_jet(ctx, plan, order=order) ** w


def _omega_powers(ctx: FqContext, plan: PrecisionPlan, order: int, weights) -> dict[int, TateJet]:
    return {w: _omega_power(ctx, plan, order, w) for w in set(weights) | {0}}


def _contiguous_cmpls(us, s: Index, plan: PrecisionPlan, order: int, builtin: bool) -> dict:
    """L(l, k) = CMPL over positions l..k-1 for all 0 <= l < k <= d."""
    d = s.depth
    out = {}
    for l in range(d):
        for k in range(l + 1, d + 1):
            out[(l, k)] = cmpl_jet(us[l:k], Index(s.parts[l:k]), plan, order=order, builtin=builtin)
    return out


def _is_builtin(us, s: Index) -> bool:
    ctx = us[0].ctx
    return all(u == at_polynomial(ctx, sj - 1) for u, sj in zip(us, s))


def build_psi(us, s: Index, plan: PrecisionPlan = PrecisionPlan(), order: int | None = None) -> JetMatrix:
    """Lower-triangular Psi[u;s]: entry (k,l) = Omega^(s_l+...+s_d) * L(l..k-1)."""
    us = list(us)
    if len(us) != s.depth:
        raise ValueError("u and s must have the same length")
    ctx = us[0].ctx
    N = plan.jet_order if order is None else order
    d = s.depth
    weights = [s.tail_weight(l) for l in range(d + 1)]
    omegas = _omega_powers(ctx, plan, N, weights)
    L = _contiguous_cmpls(us, s, plan, N, _is_builtin(us, s))
    zero = TateJet.zero(ctx, N)
    grid = [[zero] * (d + 1) for _ in range(d + 1)]
    for l in range(d + 1):
        grid[l][l] = omegas[weights[l]]
        for k in range(l + 1, d + 1):
            grid[k][l] = jet_mul(omegas[weights[l]], L[(l, k)])
    return JetMatrix(grid)


def psi_inverse_explicit(us, s: Index, plan: PrecisionPlan = PrecisionPlan(), order: int | None = None) -> JetMatrix:
    """Closed-form inverse of Psi[u;s].

    Psi = Lr * diag(Omega^w) with Lr unit lower triangular, so the inverse is
    diag(Omega^-w) * sum_m (-1)^m (Lr - 1)^m, i.e. entry (i,n) sums signed
    products of L over chains n = k_0 < ... < k_m = i.
    """
    us = list(us)
    ctx = us[0].ctx
    N = plan.jet_order if order is None else order
    d = s.depth
    omega_inv = jet_inv(omega_jet(ctx, plan, order=N))
    L = _contiguous_cmpls(us, s, plan, N, _is_builtin(us, s))
    zero = TateJet.zero(ctx, N)
    # chains[(n, i)] = sum over chains of (-1)^m prod L, computed by dynamic programming
    chains: dict[tuple[int, int], TateJet] = {}
    for n in range(d + 1):
        chains[(n, n)] = TateJet.one(ctx, N)
        for i in range(n + 1, d + 1):
            acc = None
            for k in range(n, i):
                term = -jet_mul(L[(k, i)], chains[(n, k)])
                acc = term if acc is None else acc + term
            chains[(n, i)] = acc
    grid = [[zero] * (d + 1) for _ in range(d + 1)]
    for i in range(d + 1):
        scale = omega_inv ** s.tail_weight(i)
        for n in range(i + 1):
            grid[i][n] = jet_mul(scale, chains[(n, i)])
    return JetMatrix(grid)


# ---------------------------------------------------------------------------
# Aggregates Phi(i,m) / Psi(i,m)
# ---------------------------------------------------------------------------


def aggregate_size(i: int, m: int, n: int, s: Index) -> int:
    subs = sub_prime(s)
    head = sum(sub.depth + 1 for sub in subs[:i])
    rest = sum(sub.depth + 1 for sub in subs[i:])
    return (n + 1) + (m + 1) * head + (m * rest if m >= 1 else 0)


def _check_im(i: int, m: int, n: int, s: Index) -> None:
    count = 2**s.depth - 1
    if not 1 <= i <= count:
        raise ValueError(f"i must lie in [1, {count}]")
    if not 0 <= m <= n:
        raise ValueError("need 0 <= m <= n")


def _sub_us(us, s: Index):
    for pos in sub_prime_positions(s):
        yield [us[k] for k in pos], Index(tuple(s[k] for k in pos))


def build_phi_im(i: int, m: int, n: int, s: Index, us) -> PhiMatrix:
    """rho_n(t-theta) + rho_m Phi_j (j <= i) + rho_(m-1) Phi_j (j > i), all twisted once."""
    _check_im(i, m, n, s)
    us = list(us)
    ctx = us[0].ctx
    blocks = [carlitz_phi_twisted(ctx).prolong(n).entries]
    for j, (uj, sj) in enumerate(_sub_us(us, s), start=1):
        phi = build_phi_twisted(uj, sj)
        if j <= i:
            blocks.append(phi.prolong(m).entries)
        elif m >= 1:
            blocks.append(phi.prolong(m - 1).entries)
    grid = direct_sum(blocks, lambda: TThetaPoly(ctx))
    return PhiMatrix(grid, {"kind": "aggregate", "i": i, "m": m, "n": n, "index": list(s.parts)})


def build_psi_im(i: int, m: int, n: int, s: Index, us, plan: PrecisionPlan = PrecisionPlan(), order: int | None = None) -> JetMatrix:
    _check_im(i, m, n, s)
    us = list(us)
    ctx = us[0].ctx
    N = plan.jet_order if order is None else order
    if N < n:
        raise PrecisionError("order exhausted")
    omega = JetMatrix([[omega_jet(ctx, plan, order=N)]])
    blocks = [prolong(omega, n)]
    for j, (uj, sj) in enumerate(_sub_us(us, s), start=1):
        psi = build_psi(uj, sj, plan, order=N)
        if j <= i:
            blocks.append(prolong(psi, m))
        elif m >= 1:
            blocks.append(prolong(psi, m - 1))
    return jet_direct_sum(*blocks)


# ---------------------------------------------------------------------------
# Rigidity check
# ---------------------------------------------------------------------------


def verify_rigid(phi: PhiMatrix, psi: JetMatrix, report_order: int | None = None, required_precision: int = 1) -> dict:
    """Check Psi = Phi^(1) Psi^(1) on jets and report residual valuations.

    A residual that vanishes only below ``required_precision`` certifies
    nothing, so such a run is reported as a failure.
    """
    if phi.shape != psi.shape:
        raise ValueError(f"dimension mismatch: {phi.shape} vs {psi.shape}")
    order = psi.order
    rhs = phi.eval_jet(order) @ psi.twist()
    residual = psi - rhs
    if report_order is not None:
        residual = residual.truncate_order(min(report_order, residual.order))
    ok = True
    min_res = INF
    cert = INF
    for row in residual.entries:
        for e in row:
            ok = ok and e.is_zero_within_precision()
            min_res = min(min_res, e.residual_valuation())
            cert = min(cert, e.certified_precision())
    ok = ok and cert >= required_precision
    return {
        "pass": bool(ok),
        "min_residual_valuation": _num(min_res),
        "certified_precision": _num(cert),
        "matrix_shape": list(phi.shape),
        "report_order": residual.order,
        "descriptor": phi.descriptor,
    }


def _num(x):
    if x == INF:
        return None
    return int(x)


# ---------------------------------------------------------------------------
# Explicit varieties G_{i,m}
# ---------------------------------------------------------------------------


def underline_D_all(rows, m: int) -> list[PiSeries]:
    """[D^(0), ..., D^(m)] where D^(k) = sum_{j_1+...+j_s=k} X_{j_1,1} ... X_{j_s,s}."""
    rows = [list(r) for r in rows]
    if not rows:
        raise ValueError("row-count mismatch")
    for r in rows:
        if len(r) < m + 1:
            raise ValueError("row-count mismatch")
    acc = rows[0][: m + 1]
    for r in rows[1:]:
        acc = _trunc_convolve(acc, r, m)
    return acc


def underline_D(s: int, m: int, rows) -> PiSeries:
    """The polynomial D_s^(m) evaluated at an s x (m+1) table."""
    if len(rows) != s:
        raise ValueError("row-count mismatch")
    return underline_D_all(rows, m)[m]


def _trunc_convolve(a, b, m):
    out = []
    for k in range(m + 1):
        acc = None
        for j in range(k + 1):
            if a[j].is_zero() and a[j].prec == INF or b[k - j].is_zero() and b[k - j].prec == INF:
                continue
            term = a[j] * b[k - j]
            acc = term if acc is None else acc + term
        ctx = a[0].ctx
        out.append(acc if acc is not None else PiSeries.zero(ctx))
    return out


def _power_series_pow(a, w: int, m: int):
    ctx = a[0].ctx
    out = [PiSeries.one(ctx)] + [PiSeries.zero(ctx)] * m
    base = list(a[: m + 1])
    while w:
        if w & 1:
            out = _trunc_convolve(out, base, m)
        w >>= 1
        if w:
            base = _trunc_convolve(base, base, m)
    return out


@dataclass
class GParams:
    """Coordinates of a G_{i,m} element: a_0..a_n and x[(k, subindex)]."""

    a: list
    x: dict = dc_field(default_factory=dict)

    def x_series(self, sub: tuple[int, ...], m: int) -> list[PiSeries]:
        ctx = self.a[0].ctx
        return [self.x.get((k, sub), PiSeries.zero(ctx)) for k in range(m + 1)]

    @classmethod
    def identity(cls, ctx: FqContext, n: int) -> "GParams":
        return cls([PiSeries.one(ctx)] + [PiSeries.zero(ctx)] * n, {})

    @classmethod
    def random(cls, ctx: FqContext, rng: np.random.Generator, i: int, m: int, n: int, s: Index, degree: int = 2) -> "GParams":
        """Embedded random polynomials of small degree; a_0 is nonzero."""

        def sample():
            return embed_theta_poly(ThetaPoly.random(ctx, rng, degree))

        a0 = sample()
        while a0.is_zero():
            a0 = sample()
        a = [a0] + [sample() for _ in range(n)]
        x = {}
        for j, sub in enumerate(sub_prime(s), start=1):
            top = m if j <= i else m - 1
            for k in range(top + 1):
                x[(k, sub.parts)] = sample()
        return cls(a, x)

    def to_json(self) -> dict:
        return {
            "a": [c.to_json() for c in self.a],
            "x": [{"k": k, "sub": list(sub), "value": v.to_json()} for (k, sub), v in sorted(self.x.items())],
        }


def dim_G(i: int, m: int, n: int, s: Index) -> int:
    """Closed-form count of free coordinates: n+1 + (m+1)i + m(#Sub'(s) - i)."""
    _check_im(i, m, n, s)
    return n + 1 + (m + 1) * i + m * (2**s.depth - 1 - i)


def _s_block_entries(params: GParams, sub: Index, m: int) -> list[list[list[PiSeries]]]:
    """Entry series (coefficients 0..m) of the (d'+1)-square S-matrix for one subindex."""
    ctx = params.a[0].ctx
    d = sub.depth
    apows = {}
    zero_series = [PiSeries.zero(ctx)] * (m + 1)
    grid = [[zero_series] * (d + 1) for _ in range(d + 1)]
    for l in range(d + 1):
        w = sub.tail_weight(l)
        if w not in apows:
            apows[w] = _power_series_pow(params.a, w, m)
        grid[l][l] = apows[w]
        for k in range(l + 1, d + 1):
            grid[k][l] = _trunc_convolve(apows[w], params.x_series(sub.parts[l:k], m), m)
    return grid


def _block_from_series(grid, levels: int) -> list[list[PiSeries]]:
    """Block lower-triangular matrix whose (a,b) block is coefficient a-b of each entry."""
    size = len(grid)
    ctx = grid[0][0][0].ctx
    out = [[PiSeries.zero(ctx)] * (size * (levels + 1)) for _ in range(size * (levels + 1))]
    for a in range(levels + 1):
        for b in range(a + 1):
            for r in range(size):
                for c in range(size):
                    out[a * size + r][b * size + c] = grid[r][c][a - b]
    return out


def build_G_element(i: int, m: int, n: int, s: Index, params: GParams) -> list[list[PiSeries]]:
    """The block matrix of G_{i,m} with the given coordinates."""
    _check_im(i, m, n, s)
    ctx = params.a[0].ctx
    if len(params.a) != n + 1:
        raise ValueError("need a_0..a_n")
    blocks = [_block_from_series([[list(params.a)]], n)]
    for j, sub in enumerate(sub_prime(s), start=1):
        levels = m if j <= i else m - 1
        if levels < 0:
            continue
        blocks.append(_block_from_series(_s_block_entries(params, sub, levels), levels))
    return direct_sum(blocks, lambda: PiSeries.zero(ctx))


def pi_matmul(A, B):
    """Product of matrices of PiSeries (exact zeros skipped)."""
    ctx = A[0][0].ctx
    n, k, p = len(A), len(B), len(B[0])
    out = []
    for r in range(n):
        row = []
        for c in range(p):
            acc = None
            for j in range(k):
                x, y = A[r][j], B[j][c]
                if (x.is_zero() and x.prec == INF) or (y.is_zero() and y.prec == INF):
                    continue
                term = x * y
                acc = term if acc is None else acc + term
            row.append(acc if acc is not None else PiSeries.zero(ctx))
        out.append(row)
    return out


@dataclass
class MembershipResult:
    ok: bool
    params: GParams | None = None
    position: tuple[int, int] | None = None
    residual_valuation: float | None = None
    certified_precision: float | None = None

    def to_json(self) -> dict:
        out = {"pass": self.ok}
        if self.position is not None:
            out["position"] = list(self.position)
        if self.residual_valuation is not None:
            out["residual_valuation"] = _num(self.residual_valuation)
        if self.certified_precision is not None:
            out["certified_precision"] = _num(self.certified_precision)
        return out


def g_membership(M, i: int, m: int, n: int, s: Index, prec: int = 200) -> MembershipResult:
    """Read the coordinates off M, rebuild the G_{i,m} element and compare.

    a_k sits in the first column of the Carlitz block.  For each subindex the
    bottom-left entry of its S-matrix at level k equals
    sum_b [a^w]_(k-b) x_b, which is solved for x_k (division by a_0^w).
    """
    _check_im(i, m, n, s)
    size = aggregate_size(i, m, n, s)
    if len(M) != size or any(len(row) != size for row in M):
        return MembershipResult(False, position=(0, 0), residual_valuation=-INF)
    a = [M[k][0] for k in range(n + 1)]
    if a[0].is_zero():
        return MembershipResult(False, position=(0, 0), residual_valuation=a[0].prec)
    x: dict = {}
    offset = n + 1
    params = GParams(a, x)
    for j, sub in enumerate(sub_prime(s), start=1):
        levels = m if j <= i else m - 1
        if levels < 0:
            continue
        d = sub.depth
        width = d + 1
        w = sub.weight
        apow = _power_series_pow(a, w, levels)
        lead_inv = apow[0].inverse(prec) if apow[0].prec == INF else apow[0].inverse()
        for k in range(levels + 1):
            entry = M[offset + k * width + d][offset]
            acc = entry
            for b in range(k):
                acc = acc - apow[k - b] * x[(b, sub.parts)]
            x[(k, sub.parts)] = acc * lead_inv
        offset += width * (levels + 1)
    rebuilt = build_G_element(i, m, n, s, params)
    worst = INF
    for r in range(size):
        for c in range(size):
            diff = M[r][c] - rebuilt[r][c]
            worst = min(worst, diff.prec)
            if not diff.is_zero():
                return MembershipResult(False, params, (r, c), diff.val, diff.prec)
    return MembershipResult(True, params, certified_precision=worst)


def count_free_coordinates(i: int, m: int, n: int, s: Index) -> int:
    """Coordinates actually consumed when building an element (independent of dim_G)."""
    _check_im(i, m, n, s)
    used = {("a", k) for k in range(n + 1)}
    for j, sub in enumerate(sub_prime(s), start=1):
        levels = m if j <= i else m - 1
        for k in range(levels + 1):
            for l in range(sub.depth):
                for kk in range(l + 1, sub.depth + 1):
                    used.add(("x", k, sub.parts[l:kk]))
    return len(used)
