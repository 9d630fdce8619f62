"""Truncated Laurent series in the uniformizer varpi, varpi^(q-1) = -1/theta.

A :class:`PiSeries` is ``sum_k c_k varpi^(start+k) + O(varpi^prec)`` with an
absolute precision ``prec``.  ``prec`` may be ``math.inf`` for exactly known
values (images of polynomials, monomials), which is how exact inputs avoid
spurious precision loss.  Valuations follow |x| = q^(-val/(q-1)), so
val(theta) = -(q-1) and |theta| = q.
"""

from __future__ import annotations

import math

import numpy as np

from .fq import FqContext, FqElem
from .poly import ThetaPoly, _scalar_code

INF = math.inf


class PrecisionError(ArithmeticError):
    """Raised when a result cannot be certified at the available precision."""


def _norm_prec(prec):
    if prec is None or prec == INF:
        return INF
    return int(prec)


def inverse_codes(ctx: FqContext, u: np.ndarray, n: int) -> np.ndarray:
    """First n coefficients of 1/u for a power series u with u[0] != 0 (Newton iteration)."""
    if n <= 0:
        return np.zeros(0, dtype=np.int64)
    u = np.asarray(u, dtype=np.int64)
    y = np.array([ctx.inverse(int(u[0]))], dtype=np.int64)
    k = 1
    while k < n:
        k = min(2 * k, n)
        uk = u[:k]
        e = ctx.convolve(uk, y)[:k]
        r = np.zeros(k, dtype=np.int64)
        r[: e.size] = ctx.neg(e)
        r[0] = ctx.add(r[0], 1)
        corr = ctx.convolve(y, r)[:k]
        ynew = np.zeros(k, dtype=np.int64)
        ynew[: y.size] = y
        ynew[: corr.size] = ctx.add(ynew[: corr.size], corr)
        y = ynew
    return y[:n]


class PiSeries:
    """Element of F_q((varpi)) known modulo varpi^prec."""

    __slots__ = ("ctx", "start", "c", "prec")

    def __init__(self, ctx: FqContext, start: int, codes, prec=INF):
        self.ctx = ctx
        prec = _norm_prec(prec)
        c = np.asarray(codes, dtype=np.int64).reshape(-1)
        start = int(start)
        if prec != INF and c.size > prec - start:
            c = c[: max(prec - start, 0)]
        nz = np.flatnonzero(c)
        if nz.size == 0:
            c = c[:0]
            start = prec if prec != INF else 0
        else:
            c = c[nz[0] : nz[-1] + 1]
            start += int(nz[0])
        c.flags.writeable = False
        self.start = start
        self.c = c
        self.prec = prec

    # -- constructors ----------------------------------------------------------
    @classmethod
    def zero(cls, ctx: FqContext, prec=INF) -> "PiSeries":
        return cls(ctx, 0, [], prec)

    @classmethod
    def one(cls, ctx: FqContext, prec=INF) -> "PiSeries":
        return cls(ctx, 0, [1], prec)

    @classmethod
    def monomial(cls, ctx: FqContext, exponent: int, coeff=1, prec=INF) -> "PiSeries":
        return cls(ctx, exponent, [_scalar_code(ctx, coeff)], prec)

    @classmethod
    def constant(cls, ctx: FqContext, coeff, prec=INF) -> "PiSeries":
        return cls.monomial(ctx, 0, coeff, prec)

    @classmethod
    def random(cls, ctx: FqContext, rng: np.random.Generator, val: int, prec: int) -> "PiSeries":
        codes = ctx.random_codes(rng, prec - val)
        if codes.size:
            codes[0] = rng.integers(1, ctx.q)
        return cls(ctx, val, codes, prec)

    # -- queries ---------------------------------------------------------------
    @property
    def val(self):
        """Valuation of the stored part (equal to prec when zero within precision)."""
        return self.start if self.c.size else self.prec

    @property
    def coeffs(self) -> list[FqElem]:
        return [FqElem(self.ctx, int(x)) for x in self.c]

    def is_zero(self) -> bool:
        return self.c.size == 0

    def is_exact(self) -> bool:
        return self.prec == INF

    def coefficient(self, exponent: int) -> FqElem:
        if self.prec != INF and exponent >= self.prec:
            raise PrecisionError(f"coefficient of varpi^{exponent} unknown at precision {self.prec}")
        k = exponent - self.start
        if 0 <= k < self.c.size:
            return FqElem(self.ctx, int(self.c[k]))
        return FqElem(self.ctx, 0)

    def window(self, lo: int, hi: int) -> np.ndarray:
        """Codes of the coefficients of varpi^lo .. varpi^(hi-1)."""
        out = np.zeros(max(hi - lo, 0), dtype=np.int64)
        if self.c.size and hi > lo:
            a = max(lo, self.start)
            b = min(hi, self.start + self.c.size)
            if b > a:
                out[a - lo : b - lo] = self.c[a - self.start : b - self.start]
        return out

    def valuation(self) -> int:
        if self.is_zero():
            raise PrecisionError("valuation undefined at this precision")
        return self.start

    # -- arithmetic ------------------------------------------------------------
    def _coerce(self, other) -> "PiSeries":
        if isinstance(other, PiSeries):
            return other
        if isinstance(other, ThetaPoly):
            return embed_theta_poly(other)
        return PiSeries.constant(self.ctx, other)

    def _combine(self, other: "PiSeries", op) -> "PiSeries":
        prec = min(self.prec, other.prec)
        if self.is_zero() and other.is_zero():
            return PiSeries.zero(self.ctx, prec)
        lo = min(x.start for x in (self, other) if x.c.size)
        hi = max(x.start + x.c.size for x in (self, other) if x.c.size)
        if prec != INF:
            hi = min(hi, prec)
        if hi <= lo:
            return PiSeries.zero(self.ctx, prec)
        return PiSeries(self.ctx, lo, op(self.window(lo, hi), other.window(lo, hi)), prec)

    def __add__(self, other):
        return self._combine(self._coerce(other), self.ctx.add)

    __radd__ = __add__

    def __sub__(self, other):
        return self._combine(self._coerce(other), self.ctx.sub)

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __neg__(self):
        return PiSeries(self.ctx, self.start, self.ctx.neg(self.c), self.prec)

    def __mul__(self, other):
        if isinstance(other, FqElem) or isinstance(other, int):
            return self.scale(other)
        other = self._coerce(other)
        prec = min(self.prec + other.val, other.prec + self.val)
        if self.is_zero() or other.is_zero():
            return PiSeries.zero(self.ctx, prec)
        a, b = self.c, other.c
        start = self.start + other.start
        if prec != INF:
            keep = prec - start
            if keep <= 0:
                return PiSeries.zero(self.ctx, prec)
            a, b = a[:keep], b[:keep]
        return PiSeries(self.ctx, start, self.ctx.convolve(a, b), prec)

    __rmul__ = __mul__

    def scale(self, c) -> "PiSeries":
        code = _scalar_code(self.ctx, c)
        if code == 0:
            return PiSeries.zero(self.ctx, self.prec)
        return PiSeries(self.ctx, self.start, self.ctx.scale(code, self.c), self.prec)

    def shift(self, k: int) -> "PiSeries":
        """Multiply by varpi^k."""
        return PiSeries(self.ctx, self.start + k, self.c, self.prec + k)

    def truncate(self, prec) -> "PiSeries":
        """Forget everything from varpi^prec on (never raises the precision)."""
        prec = min(self.prec, _norm_prec(prec))
        return PiSeries(self.ctx, self.start, self.c, prec)

    def inverse(self, prec=None) -> "PiSeries":
        """Multiplicative inverse.

        If x = varpi^v (u + delta) with val(delta) >= prec - v then 1/x is known
        modulo varpi^(prec - 2v); exact inputs need an explicit target ``prec``.
        """
        if self.is_zero():
            raise PrecisionError("insufficient precision")
        v = self.start
        if self.prec == INF and self.c.size == 1 and prec is None:
            return PiSeries(self.ctx, -v, [self.ctx.inverse(int(self.c[0]))])
        out_prec = self.prec - 2 * v if self.prec != INF else INF
        if prec is not None:
            out_prec = min(out_prec, int(prec))
        if out_prec == INF:
            raise ValueError("inverting an exact series needs a target precision")
        n = out_prec + v
        if n <= 0:
            return PiSeries.zero(self.ctx, out_prec)
        return PiSeries(self.ctx, -v, inverse_codes(self.ctx, self.c, n), out_prec)

    def __truediv__(self, other):
        other = self._coerce(other)
        return self * other.inverse(None if other.prec != INF else _div_target(self, other))

    def __pow__(self, n: int) -> "PiSeries":
        if n < 0:
            return self.inverse() ** (-n)
        result = PiSeries.one(self.ctx)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def frobenius(self, k: int = 1) -> "PiSeries":
        """Exponent dilation i -> i*q^k (coefficients are Frobenius-fixed)."""
        if k < 0:
            raise ValueError("Frobenius order must be nonnegative")
        if k == 0:
            return self
        step = self.ctx.q**k
        prec = self.prec * step if self.prec != INF else INF
        if self.is_zero():
            return PiSeries.zero(self.ctx, prec)
        out = np.zeros((self.c.size - 1) * step + 1, dtype=np.int64)
        out[::step] = self.c
        return PiSeries(self.ctx, self.start * step, out, prec)

    # -- comparison ------------------------------------------------------------
    def agrees_with(self, other: "PiSeries") -> tuple[bool, float]:
        """(equal within the joint precision, that precision)."""
        diff = self - other
        return diff.is_zero(), diff.prec

    def __eq__(self, other) -> bool:
        if not isinstance(other, PiSeries):
            return NotImplemented
        return (
            self.ctx == other.ctx
            and self.prec == other.prec
            and self.val == other.val
            and np.array_equal(self.c, other.c)
        )

    def __hash__(self) -> int:
        return hash((self.ctx.q, self.start, self.prec, self.c.tobytes()))

    def __repr__(self) -> str:
        return f"PiSeries({self.render()})"

    # -- output --------------------------------------------------------------
    def render(self, theta_form: bool = False, max_terms: int = 12) -> str:
        q = self.ctx.q
        terms = []
        for k, code in enumerate(self.c):
            if not code:
                continue
            if len(terms) == max_terms:
                terms.append("...")
                break
            i = self.start + k
            coef = FqElem(self.ctx, int(code))
            if theta_form and i % (q - 1) == 0:
                # varpi^((q-1)j) = (-1)^j theta^(-j)
                j = i // (q - 1)
                if j % 2:
                    coef = -coef
                mono = "1" if j == 0 else f"θ^{-j}"
            else:
                mono = "1" if i == 0 else f"ϖ^{i}"
            terms.append(f"{coef!r}·{mono}" if mono != "1" else f"{coef!r}")
        body = " + ".join(terms) or "0"
        if self.prec != INF:
            body += f" + O(ϖ^{self.prec})"
        return body

    def to_json(self) -> dict:
        return {
            "val": None if self.val == INF else int(self.val),
            "prec": None if self.prec == INF else int(self.prec),
            "coeffs": [list(self.ctx.coords(int(x))) for x in self.c],
        }

    @classmethod
    def from_json(cls, ctx: FqContext, data: dict) -> "PiSeries":
        prec = INF if data.get("prec") is None else data["prec"]
        codes = [ctx.from_coords(c) for c in data["coeffs"]]
        start = data["val"] if data.get("val") is not None else 0
        return cls(ctx, start, codes, prec)


def _div_target(x: PiSeries, y: PiSeries):
    if x.prec == INF:
        raise ValueError("exact division needs a target precision; use inverse(prec=...)")
    return x.prec - x.val - y.val


def embed_theta_poly(a: ThetaPoly, prec=None) -> PiSeries:
    """Image of a polynomial in theta under theta = -varpi^(-(q-1)).

    Exact unless ``prec`` is given.
    """
    ctx = a.ctx
    q = ctx.q
    if a.is_zero():
        return PiSeries.zero(ctx, _norm_prec(prec))
    d = a.degree
    codes = np.zeros((q - 1) * d + 1, dtype=np.int64)
    signs = a.c.copy()
    signs[1::2] = ctx.neg(signs[1::2])
    # theta^j sits at exponent -(q-1)j; store from the most negative exponent up
    codes[:: q - 1] = signs[::-1]
    return PiSeries(ctx, -(q - 1) * d, codes, _norm_prec(prec))


# Functional aliases.
def pis_add(x: PiSeries, y: PiSeries) -> PiSeries:
    return x + y


def pis_mul(x: PiSeries, y: PiSeries) -> PiSeries:
    return x * y


def pis_inv(x: PiSeries, prec=None) -> PiSeries:
    return x.inverse(prec)


def pis_frobenius(x: PiSeries, k: int = 1) -> PiSeries:
    return x.frobenius(k)


def pis_valuation(x: PiSeries) -> int:
    return x.valuation()
