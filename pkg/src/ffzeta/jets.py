"""Truncated expansions at t = theta ("jets") with per-coefficient precision.

A :class:`TateJet` of order N models ``f = sum_k c_k eps^k`` with eps = t - theta.
Coefficients c_0..c_N are stored as one 2-D array of element codes sharing a
common lowest varpi-exponent ``lo``; ``precs[k]`` is the absolute precision of
c_k.  Everything beyond order N is summarised by ``tail``: a lower bound such
that val(c_k) >= tail + (q-1)*k for every k > N.  In other words ``tail`` bounds
the Gauss norm of the remainder on the disc |eps| <= |theta|.  That bound is
what lets :func:`jet_twist` certify its output: re-expanding the twist at theta
mixes every higher coefficient into every lower one.
"""

from __future__ import annotations

import functools
import math
from typing import Sequence

import numpy as np

from .fq import FqContext, binom_mod_p
from .poly import TThetaPoly
from .series import INF, PiSeries, PrecisionError

NEG_INF = -math.inf


def _badd(a, b):
    """Sum of valuation bounds where an exactly-zero factor (inf) wins."""
    if a == INF or b == INF:
        return INF
    return a + b


def minplus(a: np.ndarray, b: np.ndarray, length: int | None = None) -> np.ndarray:
    """out[k] = min_{i+j=k} a[i] + b[j] (inf-absorbing)."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    n = a.size + b.size - 1 if length is None else length
    out = np.full(n, INF)
    for i in range(a.size):
        if a[i] == INF:
            continue
        hi = min(b.size, n - i)
        if hi <= 0:
            continue
        seg = a[i] + b[:hi]
        np.minimum(out[i : i + hi], seg, out=out[i : i + hi])
    return out


class TateJet:
    """Order-N jet at t = theta with PiSeries coefficients."""

    __slots__ = ("ctx", "order", "lo", "data", "precs", "tail")

    def __init__(self, ctx: FqContext, order: int, lo: int, data, precs, tail=INF):
        self.ctx = ctx
        self.order = int(order)
        n = self.order + 1
        data = np.asarray(data, dtype=np.int64)
        if data.ndim != 2:
            data = data.reshape(n, -1)
        if data.shape[0] < n:
            pad = np.zeros((n - data.shape[0], data.shape[1]), dtype=np.int64)
            data = np.vstack([data, pad])
        data = data[:n]
        precs = np.asarray(precs, dtype=float).reshape(-1)[:n]
        if precs.size < n:
            precs = np.concatenate([precs, np.full(n - precs.size, INF)])
        # forget anything at or beyond each coefficient's precision
        width = data.shape[1]
        if width:
            limit = np.where(np.isfinite(precs), precs - lo, width).astype(np.int64)
            cols = np.arange(width)
            if np.any(limit < width):
                data = np.where(cols[None, :] < limit[:, None], data, 0)
            nzc = np.flatnonzero(data.any(axis=0))
            if nzc.size:
                data = data[:, nzc[0] : nzc[-1] + 1]
                lo += int(nzc[0])
            else:
                data = np.zeros((n, 0), dtype=np.int64)
                lo = 0
        self.lo = int(lo)
        self.data = data
        self.data.flags.writeable = False
        self.precs = precs
        self.precs.flags.writeable = False
        self.tail = float(tail)

    # -- constructors ----------------------------------------------------------
    @classmethod
    def zero(cls, ctx: FqContext, order: int) -> "TateJet":
        return cls(ctx, order, 0, np.zeros((order + 1, 0), dtype=np.int64), np.full(order + 1, INF))

    @classmethod
    def constant(cls, ctx: FqContext, order: int, c: PiSeries) -> "TateJet":
        return cls.from_coeffs(ctx, [c], order=order)

    @classmethod
    def one(cls, ctx: FqContext, order: int) -> "TateJet":
        return cls.constant(ctx, order, PiSeries.one(ctx))

    @classmethod
    def eps(cls, ctx: FqContext, order: int) -> "TateJet":
        """The jet of t - theta."""
        coeffs = [PiSeries.zero(ctx), PiSeries.one(ctx)]
        return cls.from_coeffs(ctx, coeffs, order=order)

    @classmethod
    def from_coeffs(cls, ctx: FqContext, coeffs: Sequence[PiSeries], order: int | None = None, tail=INF) -> "TateJet":
        """Jet with the given coefficients.

        Coefficients past ``order`` are folded into the tail bound; the default
        ``tail=inf`` means the jet is the polynomial in eps that was given.
        """
        coeffs = list(coeffs)
        if order is None:
            order = len(coeffs) - 1
        lam = ctx.q - 1
        for k in range(order + 1, len(coeffs)):
            tail = min(tail, _badd(coeffs[k].val, -lam * k) if coeffs[k].val != INF else INF)
        kept = coeffs[: order + 1]
        nonzero = [c for c in kept if c.c.size]
        if nonzero:
            lo = min(c.start for c in nonzero)
            hi = max(c.start + c.c.size for c in nonzero)
        else:
            lo = hi = 0
        data = np.zeros((order + 1, hi - lo), dtype=np.int64)
        precs = np.full(order + 1, INF)
        for k, c in enumerate(kept):
            data[k] = c.window(lo, hi)
            precs[k] = c.prec
        return cls(ctx, order, lo, data, precs, tail)

    @classmethod
    def from_tpoly(cls, u: TThetaPoly, order: int, prec=None) -> "TateJet":
        """Exact expansion of a polynomial in A[t] at t = theta (optionally capped at ``prec``)."""
        from .series import embed_theta_poly

        coeffs = [embed_theta_poly(c, prec) for c in u.taylor_at_theta()]
        if not coeffs:
            return cls.zero(u.ctx, order)
        return cls.from_coeffs(u.ctx, coeffs, order=order)

    @classmethod
    def random(
        cls, ctx: FqContext, rng: np.random.Generator, order: int, val: int = 0, prec: int = 60, slope: int = 0
    ) -> "TateJet":
        """Random eps-polynomial; coefficient k starts at val + slope*k and is known to prec + slope*k."""
        return cls.from_coeffs(
            ctx, [PiSeries.random(ctx, rng, val + slope * k, prec + slope * k) for k in range(order + 1)]
        )

    # -- access ------------------------------------------------------------------
    def coeff(self, k: int) -> PiSeries:
        if k > self.order:
            raise PrecisionError("order exhausted")
        return PiSeries(self.ctx, self.lo, self.data[k], self.precs[k])

    @property
    def coeffs(self) -> list[PiSeries]:
        return [self.coeff(k) for k in range(self.order + 1)]

    def vals(self) -> np.ndarray:
        """Per-coefficient valuations (precision for rows that vanish)."""
        out = self.precs.copy()
        if self.data.shape[1]:
            nz = self.data != 0
            has = nz.any(axis=1)
            first = np.argmax(nz, axis=1)
            out[has] = self.lo + first[has]
        return out

    def weighted_val(self) -> float:
        """min_k val(c_k) - (q-1)k over the stored coefficients."""
        lam = self.ctx.q - 1
        return float(np.min(self.vals() - lam * np.arange(self.order + 1)))

    def gauss_val(self) -> float:
        """Weighted valuation including the tail."""
        return min(self.weighted_val(), self.tail)

    def certified_precision(self) -> float:
        return float(np.min(self.precs))

    def is_exact_zero(self) -> bool:
        return self.data.shape[1] == 0 and np.all(np.isinf(self.precs)) and self.tail == INF

    def is_zero_within_precision(self) -> bool:
        return not self.data.any()

    def residual_valuation(self) -> float:
        """Smallest valuation among the coefficients (precision where they vanish)."""
        return float(np.min(self.vals()))

    # -- shape helpers -----------------------------------------------------------
    def truncate_order(self, order: int) -> "TateJet":
        if order >= self.order:
            return self
        lam = self.ctx.q - 1
        v = self.vals()
        extra = v[order + 1 :] - lam * np.arange(order + 1, self.order + 1)
        tail = min(self.tail, float(np.min(extra)))
        return TateJet(self.ctx, order, self.lo, self.data[: order + 1], self.precs[: order + 1], tail)

    def truncate_precision(self, prec) -> "TateJet":
        return TateJet(self.ctx, self.order, self.lo, self.data, np.minimum(self.precs, prec), self.tail)

    def _aligned(self, lo: int, hi: int) -> np.ndarray:
        out = np.zeros((self.order + 1, max(hi - lo, 0)), dtype=np.int64)
        w = self.data.shape[1]
        if w:
            a = max(lo, self.lo)
            b = min(hi, self.lo + w)
            if b > a:
                out[:, a - lo : b - lo] = self.data[:, a - self.lo : b - self.lo]
        return out

    # -- arithmetic ------------------------------------------------------------
    def _combine(self, other: "TateJet", op) -> "TateJet":
        order = min(self.order, other.order)
        f, g = self.truncate_order(order), other.truncate_order(order)
        spans = [(x.lo, x.lo + x.data.shape[1]) for x in (f, g) if x.data.shape[1]]
        lo = min((s[0] for s in spans), default=0)
        hi = max((s[1] for s in spans), default=0)
        data = op(f._aligned(lo, hi), g._aligned(lo, hi))
        return TateJet(self.ctx, order, lo, data, np.minimum(f.precs, g.precs), min(f.tail, g.tail))

    def _coerce(self, other) -> "TateJet":
        if isinstance(other, TateJet):
            return other
        if isinstance(other, PiSeries):
            return TateJet.constant(self.ctx, self.order, other)
        return TateJet.constant(self.ctx, self.order, PiSeries.constant(self.ctx, other))

    def __add__(self, other):
        return self._combine(self._coerce(other), self.ctx.add)

    __radd__ = __add__

    def __sub__(self, other):
        return self._combine(self._coerce(other), self.ctx.sub)

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __neg__(self):
        return TateJet(self.ctx, self.order, self.lo, self.ctx.neg(self.data), self.precs, self.tail)

    def __mul__(self, other):
        if isinstance(other, PiSeries):
            return self.scale(other)
        if not isinstance(other, TateJet):
            return self.scale(PiSeries.constant(self.ctx, other))
        return jet_mul(self, other)

    __rmul__ = __mul__

    def scale(self, c: PiSeries) -> "TateJet":
        """Multiply every coefficient by the scalar c."""
        n = self.order + 1
        vc = c.val
        precs = np.minimum(self.precs + vc, c.prec + self.vals())
        if c.is_zero() or self.data.shape[1] == 0:
            return TateJet(self.ctx, self.order, 0, np.zeros((n, 0), dtype=np.int64), precs, _badd(self.tail, vc))
        data = self.ctx.convolve(self.data, c.c[None, :])
        return TateJet(self.ctx, self.order, self.lo + c.start, data, precs, _badd(self.tail, vc))

    def __pow__(self, n: int) -> "TateJet":
        if n < 0:
            return jet_inv(self) ** (-n)
        result = TateJet.one(self.ctx, self.order)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __repr__(self) -> str:
        return f"TateJet(order={self.order}, prec={self.certified_precision()}, tail={self.tail})"

    def to_json(self) -> dict:
        return {
            "order": self.order,
            "coeffs": [c.to_json() for c in self.coeffs],
            "tail_bound": _tail_to_json(self.tail),
        }

    @classmethod
    def from_json(cls, ctx: FqContext, data: dict) -> "TateJet":
        coeffs = [PiSeries.from_json(ctx, c) for c in data["coeffs"]]
        return cls.from_coeffs(ctx, coeffs, order=data["order"], tail=_tail_from_json(data.get("tail_bound")))


def _tail_to_json(tail):
    # null: no tail (exact polynomial jet); "-inf": tail unbounded
    if tail == INF:
        return None
    if tail == NEG_INF:
        return "-inf"
    return int(tail)


def _tail_from_json(value):
    if value is None:
        return INF
    if value == "-inf":
        return NEG_INF
    return int(value)


def _trim_rows(data: np.ndarray) -> np.ndarray:
    nz = np.flatnonzero(data.any(axis=1))
    return data[: nz[-1] + 1] if nz.size else data[:0]


def jet_mul(f: TateJet, g: TateJet) -> TateJet:
    """Cauchy product truncated at the common order, with tail propagation."""
    ctx = f.ctx
    order = min(f.order, g.order)
    f, g = f.truncate_order(order), g.truncate_order(order)
    n = order + 1
    lam = ctx.q - 1
    vf, vg = f.vals(), g.vals()
    full = 2 * order + 1
    precs = np.minimum(minplus(f.precs, vg, full), minplus(vf, g.precs, full))
    if f.data.shape[1] == 0 or g.data.shape[1] == 0:
        data = np.zeros((full, 0), dtype=np.int64)
        lo = 0
    else:
        # polynomial jets often have only a few nonzero rows
        fd, gd = _trim_rows(f.data), _trim_rows(g.data)
        data = np.zeros((full, f.data.shape[1] + g.data.shape[1] - 1), dtype=np.int64)
        if fd.shape[0] and gd.shape[0]:
            part = ctx.convolve(fd, gd)
            data[: part.shape[0]] = part
        lo = f.lo + g.lo
    prod = TateJet(ctx, full - 1, lo, data, precs, INF)
    high = prod.vals()[n:] - lam * np.arange(n, full)
    w_high = float(np.min(high)) if high.size else INF
    tail = min(
        w_high,
        _badd(f.weighted_val(), g.tail),
        _badd(f.tail, g.weighted_val()),
        _badd(f.tail, g.tail),
    )
    return TateJet(ctx, order, prod.lo, prod.data[:n], prod.precs[:n], tail)


def jet_add(f: TateJet, g: TateJet) -> TateJet:
    return f + g


def jet_inv(f: TateJet, prec=None) -> TateJet:
    """Inverse of a unit jet by the recursion J_k = -c_0^{-1} sum_{a>=1} c_a J_{k-a}.

    ``prec`` caps the working precision (needed when c_0 is exact).  The tail
    bound comes from writing f*J = 1 + E with E supported in degrees > N:
    1/f - J = -J E (1+E)^{-1}, so its Gauss valuation is at least w(J) + w(E)
    whenever w(E) > 0.
    """
    ctx = f.ctx
    c0 = f.coeff(0)
    if c0.is_zero():
        raise PrecisionError("jet not invertible at t=θ")
    if c0.prec == INF and prec is None and c0.c.size > 1:
        raise ValueError("inverting an exact jet needs a target precision")
    inv0 = c0.inverse(prec)
    cs = f.coeffs
    J = [inv0]
    neg_inv0 = -inv0
    for k in range(1, f.order + 1):
        acc = None
        for a in range(1, k + 1):
            if cs[a].is_zero() and cs[a].prec == INF:
                continue
            term = cs[a] * J[k - a]
            acc = term if acc is None else acc + term
        J.append(neg_inv0 * acc if acc is not None else PiSeries.zero(ctx))
    out = TateJet.from_coeffs(ctx, J, order=f.order, tail=INF)
    # tail bound
    lam = ctx.q - 1
    n = f.order + 1
    full = 2 * f.order + 1
    vf, vj = f.vals(), out.vals()
    precs = np.minimum(minplus(f.precs, vj, full), minplus(vf, out.precs, full))
    data = ctx.convolve(f.data, out.data) if f.data.shape[1] and out.data.shape[1] else np.zeros((full, 0), dtype=np.int64)
    prod = TateJet(ctx, full - 1, f.lo + out.lo, data, precs, INF)
    high = prod.vals()[n:] - lam * np.arange(n, full)
    w_e = min(float(np.min(high)) if high.size else INF, _badd(f.tail, out.weighted_val()))
    tail = _badd(out.weighted_val(), w_e) if w_e > 0 else NEG_INF
    return TateJet(ctx, out.order, out.lo, out.data, out.precs, tail)


def _frobenius_rows(f: TateJet) -> TateJet:
    q = f.ctx.q
    n, w = f.data.shape
    if w == 0:
        data = np.zeros((n, 0), dtype=np.int64)
    else:
        data = np.zeros((n, (w - 1) * q + 1), dtype=np.int64)
        data[:, ::q] = f.data
    precs = np.where(np.isfinite(f.precs), f.precs * q, INF)
    return TateJet(f.ctx, f.order, f.lo * q, data, precs, INF)


def jet_twist(f: TateJet, k: int = 1) -> TateJet:
    """Twist c_k -> c_k^(q) followed by re-expansion around theta.

    f^(1)(t) = sum_k c_k^(1) (eps + theta - theta^q)^k.  The known coefficient
    j picks up c_k^(1) * C(k,j) (theta - theta^q)^(k-j) for every k >= j, so its
    precision is the minimum of q*prec_k - q(q-1)(k-j) over stored k, and
    q*tail + q(q-1)j for the unstored ones.
    """
    if k < 0:
        raise ValueError("twist order must be nonnegative")
    for _ in range(k):
        f = _twist_once(f)
    return f


def _shift_base(ctx: FqContext) -> tuple[int, np.ndarray]:
    """eps + (theta - theta^q) as a 2-D array (rows: eps powers, columns: varpi exponents)."""
    q = ctx.q
    lo = -q * (q - 1)
    arr = np.zeros((2, -lo + 1), dtype=np.int64)
    one = np.int64(1)
    # theta^q = (-1)^q varpi^(-q(q-1)), theta = -varpi^(-(q-1))
    arr[0, 0] = ctx.neg(one) if q % 2 == 0 else one
    arr[0, (q - 1) ** 2] = ctx.add(arr[0, (q - 1) ** 2], ctx.neg(one))
    arr[1, -lo] = 1
    return lo, arr


@functools.lru_cache(maxsize=None)
def _shift_power(ctx: FqContext, h: int) -> tuple[int, np.ndarray]:
    """(eps + theta - theta^q)^h."""
    if h == 1:
        return _shift_base(ctx)
    lo_a, a = _shift_power(ctx, h // 2)
    lo, arr = lo_a * 2, ctx.convolve(a, a)
    if h % 2:
        lo_b, b = _shift_base(ctx)
        lo, arr = lo + lo_b, ctx.convolve(arr, b)
    arr.flags.writeable = False
    return lo, arr


def _mul_sparse(ctx: FqContext, G: np.ndarray, base: np.ndarray) -> np.ndarray:
    """G * base for a base with a handful of nonzero entries, by shifted adds."""
    r, w = G.shape
    out = np.zeros((r + base.shape[0] - 1, w + base.shape[1] - 1), dtype=np.int64)
    for i, j in zip(*np.nonzero(base)):
        term = G if base[i, j] == 1 else ctx.scale(int(base[i, j]), G)
        out[i : i + r, j : j + w] = ctx.add(out[i : i + r, j : j + w], term)
    return out


def _taylor_shift_small(ctx: FqContext, lo: int, rows: np.ndarray) -> tuple[int, np.ndarray]:
    """Horner's rule for a short block: G <- G (eps + d) + rows[k]."""
    lo_b, base = _shift_base(ctx)
    n, w = rows.shape
    G, g_lo = rows[n - 1 : n], lo
    for k in range(n - 2, -1, -1):
        G = _mul_sparse(ctx, G, base)
        g_lo += lo_b
        off = lo - g_lo
        G[0, off : off + w] = ctx.add(G[0, off : off + w], rows[k])
    return g_lo, G


def _taylor_shift(ctx: FqContext, lo: int, rows: np.ndarray) -> tuple[int, np.ndarray]:
    """Coefficients of sum_k rows[k] (eps + d)^k by divide and conquer."""
    n = rows.shape[0]
    if n == 1:
        return lo, rows
    if n <= 8:
        return _taylor_shift_small(ctx, lo, rows)
    h = n // 2
    lo_a, A = _taylor_shift(ctx, lo, rows[:h])
    lo_b, B = _taylor_shift(ctx, lo, rows[h:])
    lo_p, P = _shift_power(ctx, h)
    C = ctx.convolve(B, P)
    lo_c = lo_b + lo_p
    new_lo = min(lo_a, lo_c)
    width = max(lo_a + A.shape[1], lo_c + C.shape[1]) - new_lo
    out = np.zeros((n, width), dtype=np.int64)
    out[:, lo_c - new_lo : lo_c - new_lo + C.shape[1]] = C[:n]
    seg = out[:h, lo_a - new_lo : lo_a - new_lo + A.shape[1]]
    out[:h, lo_a - new_lo : lo_a - new_lo + A.shape[1]] = ctx.add(seg, A)
    return new_lo, out


def _twist_once(f: TateJet) -> TateJet:
    ctx = f.ctx
    q = ctx.q
    N = f.order
    F = _frobenius_rows(f)
    if F.data.shape[1]:
        lo, G = _taylor_shift(ctx, F.lo, F.data)
    else:
        lo, G = 0, np.zeros((N + 1, 0), dtype=np.int64)
    # precision of coefficient j: min_{k>=j} q*P_k - c(k-j), and the tail term
    cost = q * (q - 1)
    ks = np.arange(N + 1)
    qp = np.where(np.isfinite(f.precs), f.precs * q, INF)
    suffix = np.minimum.accumulate((qp - cost * ks)[::-1])[::-1]
    precs = suffix + cost * ks
    if f.tail == NEG_INF:
        raise PrecisionError("twist precision lost: jet tail is unbounded")
    if f.tail != INF:
        precs = np.minimum(precs, q * f.tail + cost * ks)
        tail = q * f.tail + (q - 1) ** 2 * (N + 1)
    else:
        tail = INF
    return TateJet(ctx, N, lo, G, precs, tail)


def jet_hyperderiv(f: TateJet, n: int) -> TateJet:
    """n-th hyperderivative in t (= in eps); the order shrinks by n."""
    if n < 0:
        raise ValueError("hyperderivative order must be nonnegative")
    if n > f.order:
        raise PrecisionError("order exhausted")
    if n == 0:
        return f
    ctx = f.ctx
    p = ctx.p
    N = f.order - n
    data = np.zeros((N + 1, f.data.shape[1]), dtype=np.int64)
    precs = np.full(N + 1, INF)
    for k in range(N + 1):
        b = binom_mod_p(k + n, n, p)
        if b:
            data[k] = ctx.scale(b, f.data[k + n])
            precs[k] = f.precs[k + n]
    lam = ctx.q - 1
    tail = _badd(f.tail, lam * n) if f.tail != NEG_INF else NEG_INF
    return TateJet(ctx, N, f.lo, data, precs, tail)


class JetMatrix:
    """Dense matrix of TateJets sharing a context."""

    def __init__(self, entries: Sequence[Sequence[TateJet]]):
        self.entries = [list(row) for row in entries]
        self.rows = len(self.entries)
        self.cols = len(self.entries[0]) if self.rows else 0
        if any(len(r) != self.cols for r in self.entries):
            raise ValueError("ragged matrix")

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    @property
    def ctx(self) -> FqContext:
        return self.entries[0][0].ctx

    @property
    def order(self) -> int:
        return min(e.order for row in self.entries for e in row)

    def __getitem__(self, idx) -> TateJet:
        i, j = idx
        return self.entries[i][j]

    @classmethod
    def identity(cls, ctx: FqContext, size: int, order: int) -> "JetMatrix":
        one, zero = TateJet.one(ctx, order), TateJet.zero(ctx, order)
        return cls([[one if i == j else zero for j in range(size)] for i in range(size)])

    @classmethod
    def zeros(cls, ctx: FqContext, rows: int, cols: int, order: int) -> "JetMatrix":
        zero = TateJet.zero(ctx, order)
        return cls([[zero] * cols for _ in range(rows)])

    def map(self, fn) -> "JetMatrix":
        return JetMatrix([[fn(e) for e in row] for row in self.entries])

    def __matmul__(self, other: "JetMatrix") -> "JetMatrix":
        return jet_matmul(self, other)

    def __sub__(self, other: "JetMatrix") -> "JetMatrix":
        if self.shape != other.shape:
            raise ValueError("dimension mismatch")
        return JetMatrix([[a - b for a, b in zip(r1, r2)] for r1, r2 in zip(self.entries, other.entries)])

    def __add__(self, other: "JetMatrix") -> "JetMatrix":
        if self.shape != other.shape:
            raise ValueError("dimension mismatch")
        return JetMatrix([[a + b for a, b in zip(r1, r2)] for r1, r2 in zip(self.entries, other.entries)])

    def twist(self, k: int = 1) -> "JetMatrix":
        return self.map(lambda e: e if e.is_exact_zero() else jet_twist(e, k))

    def hyperderiv(self, n: int) -> "JetMatrix":
        return self.map(lambda e: jet_hyperderiv(e, n))

    def truncate_order(self, order: int) -> "JetMatrix":
        return self.map(lambda e: e.truncate_order(order))

    def certified_precision(self) -> float:
        return min(e.certified_precision() for row in self.entries for e in row)

    def to_json(self) -> list:
        return [[e.to_json() for e in row] for row in self.entries]


def jet_matmul(A: JetMatrix, B: JetMatrix) -> JetMatrix:
    if A.cols != B.rows:
        raise ValueError(f"dimension mismatch: {A.shape} @ {B.shape}")
    order = min(A.order, B.order)
    ctx = A.ctx
    out = []
    for i in range(A.rows):
        row = []
        for j in range(B.cols):
            acc = None
            for l in range(A.cols):
                a, b = A.entries[i][l], B.entries[l][j]
                if a.is_exact_zero() or b.is_exact_zero():
                    continue
                term = jet_mul(a, b)
                acc = term if acc is None else acc + term
            row.append(acc.truncate_order(order) if acc is not None else TateJet.zero(ctx, order))
        out.append(row)
    return JetMatrix(out)


def direct_sum(blocks: Sequence, zero_factory):
    """Block-diagonal assembly of square or rectangular entry grids."""
    rows = sum(len(b) for b in blocks)
    cols = sum(len(b[0]) if len(b) else 0 for b in blocks)
    grid = [[None] * cols for _ in range(rows)]
    r0 = c0 = 0
    for b in blocks:
        for i, row in enumerate(b):
            for j, e in enumerate(row):
                grid[r0 + i][c0 + j] = e
        r0 += len(b)
        c0 += len(b[0]) if len(b) else 0
    for i in range(rows):
        for j in range(cols):
            if grid[i][j] is None:
                grid[i][j] = zero_factory()
    return grid


def jet_direct_sum(*mats: JetMatrix) -> JetMatrix:
    ctx = mats[0].ctx
    order = min(m.order for m in mats)
    return JetMatrix(direct_sum([m.entries for m in mats], lambda: TateJet.zero(ctx, order)))


def prolong_entries(entries, m: int, hyper, zero):
    """Block lower-triangular (m+1)x(m+1) arrangement with block (a,b) = d^(a-b) X."""
    n = len(entries)
    derived = [[[hyper(e, k) for e in row] for row in entries] for k in range(m + 1)]
    size = n * (m + 1)
    grid = [[None] * size for _ in range(size)]
    for a in range(m + 1):
        for b in range(m + 1):
            for i in range(n):
                for j in range(n):
                    grid[a * n + i][b * n + j] = derived[a - b][i][j] if a >= b else zero()
    return grid


def prolong(X, m: int):
    """The m-th prolongation rho_m of a square JetMatrix or PhiMatrix."""
    if m < 0:
        raise ValueError("prolongation level must be nonnegative")
    if X.rows != X.cols:
        raise ValueError("prolongation needs a square matrix")
    if isinstance(X, JetMatrix):
        order = X.order - m
        if order < 0:
            raise PrecisionError("order exhausted")
        ctx = X.ctx
        grid = prolong_entries(
            X.entries,
            m,
            lambda e, k: jet_hyperderiv(e, k).truncate_order(order),
            lambda: TateJet.zero(ctx, order),
        )
        return JetMatrix(grid)
    return X.prolong(m)


def jet_matrix_inverse(M: JetMatrix, prec=None) -> JetMatrix:
    """Gauss-Jordan inverse over jets (pivots must be units at t = theta)."""
    n = M.rows
    if n != M.cols:
        raise ValueError("inverse of a non-square matrix")
    ctx = M.ctx
    order = M.order
    A = [list(row) for row in M.entries]
    I = [[TateJet.one(ctx, order) if i == j else TateJet.zero(ctx, order) for j in range(n)] for i in range(n)]
    for col in range(n):
        piv = None
        for r in range(col, n):
            if not A[r][col].coeff(0).is_zero():
                piv = r
                break
        if piv is None:
            raise PrecisionError("jet not invertible at t=θ")
        A[col], A[piv] = A[piv], A[col]
        I[col], I[piv] = I[piv], I[col]
        inv = jet_inv(A[col][col], prec)
        A[col] = [e if e.is_exact_zero() else jet_mul(e, inv) for e in A[col]]
        I[col] = [e if e.is_exact_zero() else jet_mul(e, inv) for e in I[col]]
        for r in range(n):
            if r == col or A[r][col].is_exact_zero():
                continue
            factor = A[r][col]
            A[r] = [x if y.is_exact_zero() else x - jet_mul(factor, y) for x, y in zip(A[r], A[col])]
            I[r] = [x if y.is_exact_zero() else x - jet_mul(factor, y) for x, y in zip(I[r], I[col])]
    return JetMatrix(I)
