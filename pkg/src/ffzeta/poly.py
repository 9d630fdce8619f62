"""Exact polynomials over F_q: the ring A = F_q[theta] and A[t].

``ThetaPoly`` stores a 1-D array of element codes indexed by theta-degree and
``TThetaPoly`` a 2-D array indexed by (t-degree, theta-degree).  Both are
immutable and normalised so that trailing zero rows/columns are removed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fq import FqContext, FqElem, binom_mod_p


def _trim1(a: np.ndarray) -> np.ndarray:
    nz = np.flatnonzero(a)
    if nz.size == 0:
        return a[:0]
    return a[: nz[-1] + 1]


def _trim2(a: np.ndarray) -> np.ndarray:
    if a.size == 0 or not a.any():
        return np.zeros((0, 0), dtype=np.int64)
    rows = np.flatnonzero(a.any(axis=1))
    cols = np.flatnonzero(a.any(axis=0))
    return a[: rows[-1] + 1, : cols[-1] + 1]


def _pad_add(ctx: FqContext, a: np.ndarray, b: np.ndarray, op) -> np.ndarray:
    shape = tuple(max(x, y) for x, y in zip(a.shape, b.shape))
    A = np.zeros(shape, dtype=np.int64)
    B = np.zeros(shape, dtype=np.int64)
    A[tuple(slice(0, n) for n in a.shape)] = a
    B[tuple(slice(0, n) for n in b.shape)] = b
    return op(A, B)


def _scalar_code(ctx: FqContext, c) -> int:
    if isinstance(c, FqElem):
        return c.code
    return ctx.from_int(c)


class ThetaPoly:
    """Polynomial in theta with F_q coefficients."""

    __slots__ = ("ctx", "c")

    def __init__(self, ctx: FqContext, codes=()):
        self.ctx = ctx
        self.c = _trim1(np.asarray(codes, dtype=np.int64).reshape(-1))
        self.c.flags.writeable = False

    # -- constructors ----------------------------------------------------------
    @classmethod
    def from_coeffs(cls, ctx: FqContext, coeffs) -> "ThetaPoly":
        """Build from a list of ints (prime-field values), FqElems or coordinate lists."""
        codes = []
        for c in coeffs:
            if isinstance(c, FqElem):
                codes.append(c.code)
            elif isinstance(c, (list, tuple)):
                codes.append(ctx.from_coords(c))
            else:
                codes.append(ctx.from_int(c))
        return cls(ctx, codes)

    @classmethod
    def constant(cls, ctx: FqContext, c=1) -> "ThetaPoly":
        return cls(ctx, [_scalar_code(ctx, c)])

    @classmethod
    def monomial(cls, ctx: FqContext, degree: int, c=1) -> "ThetaPoly":
        codes = np.zeros(degree + 1, dtype=np.int64)
        codes[degree] = _scalar_code(ctx, c)
        return cls(ctx, codes)

    @classmethod
    def theta(cls, ctx: FqContext) -> "ThetaPoly":
        return cls.monomial(ctx, 1)

    @classmethod
    def random(cls, ctx: FqContext, rng: np.random.Generator, degree: int) -> "ThetaPoly":
        return cls(ctx, ctx.random_codes(rng, degree + 1))

    # -- basic queries -----------------------------------------------------------
    @property
    def degree(self) -> int:
        """Degree in theta; -1 for the zero polynomial."""
        return self.c.size - 1

    def is_zero(self) -> bool:
        return self.c.size == 0

    def coeff(self, j: int) -> FqElem:
        return FqElem(self.ctx, int(self.c[j]) if 0 <= j < self.c.size else 0)

    @property
    def coeffs(self) -> list[FqElem]:
        return [FqElem(self.ctx, int(x)) for x in self.c]

    def leading(self) -> FqElem:
        if self.is_zero():
            raise ValueError("zero polynomial has no leading coefficient")
        return FqElem(self.ctx, int(self.c[-1]))

    # -- arithmetic ------------------------------------------------------------
    def _coerce(self, other) -> "ThetaPoly":
        if isinstance(other, ThetaPoly):
            return other
        return ThetaPoly.constant(self.ctx, other)

    def __add__(self, other):
        other = self._coerce(other)
        return ThetaPoly(self.ctx, _pad_add(self.ctx, self.c, other.c, self.ctx.add))

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        return ThetaPoly(self.ctx, _pad_add(self.ctx, self.c, other.c, self.ctx.sub))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __neg__(self):
        return ThetaPoly(self.ctx, self.ctx.neg(self.c))

    def __mul__(self, other):
        if isinstance(other, TThetaPoly):
            return NotImplemented
        if not isinstance(other, ThetaPoly):
            return ThetaPoly(self.ctx, self.ctx.scale(_scalar_code(self.ctx, other), self.c))
        return ThetaPoly(self.ctx, self.ctx.convolve(self.c, other.c))

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "ThetaPoly":
        if n < 0:
            raise ValueError("negative power of a polynomial")
        result = ThetaPoly.constant(self.ctx, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def divmod(self, other: "ThetaPoly") -> tuple["ThetaPoly", "ThetaPoly"]:
        """Euclidean division by a nonzero polynomial."""
        if other.is_zero():
            raise ZeroDivisionError("division by the zero polynomial")
        ctx = self.ctx
        r = self.c.copy()
        d = other.degree
        inv_lead = ctx.inverse(int(other.c[-1]))
        quo = np.zeros(max(self.degree - d + 1, 0), dtype=np.int64)
        for k in range(self.degree, d - 1, -1):
            c = int(r[k])
            if c:
                f = int(ctx.mul_table[c, inv_lead])
                quo[k - d] = f
                r[k - d : k + 1] = ctx.sub(r[k - d : k + 1], ctx.scale(f, other.c))
        return ThetaPoly(ctx, quo), ThetaPoly(ctx, r[:d] if d > 0 else r[:0])

    def twist(self, k: int = 1) -> "ThetaPoly":
        """c(theta) -> c(theta)^(q^k); coefficients in F_q are Frobenius-fixed."""
        if k < 0:
            raise ValueError("twist order must be nonnegative")
        if self.is_zero() or k == 0:
            return self
        step = self.ctx.q**k
        out = np.zeros(self.degree * step + 1, dtype=np.int64)
        out[::step] = self.c
        return ThetaPoly(self.ctx, out)

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, FqElem)):
            other = ThetaPoly.constant(self.ctx, other)
        if not isinstance(other, ThetaPoly):
            return NotImplemented
        return self.ctx == other.ctx and np.array_equal(self.c, other.c)

    def __hash__(self) -> int:
        return hash((self.ctx.q, self.c.tobytes()))

    def __repr__(self) -> str:
        return f"ThetaPoly({_format_poly(self.ctx, self.c, 'θ')})"

    def to_json(self) -> list:
        return [list(self.ctx.coords(int(x))) for x in self.c]

    @classmethod
    def from_json(cls, ctx: FqContext, data) -> "ThetaPoly":
        return cls(ctx, [ctx.from_coords(c) for c in data])


def _format_poly(ctx: FqContext, codes, var: str) -> str:
    terms = []
    for j, x in enumerate(codes):
        if x:
            coef = repr(FqElem(ctx, int(x)))
            if j == 0:
                terms.append(coef)
            else:
                mono = var if j == 1 else f"{var}^{j}"
                terms.append(mono if coef == "1" else f"{coef}*{mono}")
    return " + ".join(reversed(terms)) or "0"


class TThetaPoly:
    """Polynomial in t whose coefficients are ThetaPolys, i.e. an element of A[t]."""

    __slots__ = ("ctx", "a")

    def __init__(self, ctx: FqContext, array=None):
        self.ctx = ctx
        if array is None:
            array = np.zeros((0, 0), dtype=np.int64)
        arr = np.asarray(array, dtype=np.int64)
        if arr.ndim != 2:
            raise ValueError("TThetaPoly expects a 2-D coefficient array")
        self.a = _trim2(arr)
        self.a.flags.writeable = False

    @classmethod
    def from_coeffs(cls, ctx: FqContext, coeffs) -> "TThetaPoly":
        """Build from a list (indexed by t-degree) of ThetaPolys or raw coefficient lists."""
        polys = [c if isinstance(c, ThetaPoly) else ThetaPoly.from_coeffs(ctx, c) for c in coeffs]
        width = max((p.c.size for p in polys), default=0)
        arr = np.zeros((len(polys), width), dtype=np.int64)
        for i, poly in enumerate(polys):
            arr[i, : poly.c.size] = poly.c
        return cls(ctx, arr)

    @classmethod
    def constant(cls, ctx: FqContext, c=1) -> "TThetaPoly":
        if isinstance(c, ThetaPoly):
            return cls.from_coeffs(ctx, [c])
        return cls(ctx, np.array([[_scalar_code(ctx, c)]], dtype=np.int64))

    @classmethod
    def t(cls, ctx: FqContext) -> "TThetaPoly":
        return cls(ctx, np.array([[0], [1]], dtype=np.int64))

    @classmethod
    def t_minus_theta_power(cls, ctx: FqContext, k: int) -> "TThetaPoly":
        """The polynomial t - theta^(q^k)."""
        arr = np.zeros((2, ctx.q**k + 1), dtype=np.int64)
        arr[1, 0] = 1
        arr[0, ctx.q**k] = ctx.neg(np.int64(1))
        return cls(ctx, arr)

    @classmethod
    def random(cls, ctx: FqContext, rng: np.random.Generator, t_degree: int, theta_degree: int) -> "TThetaPoly":
        return cls(ctx, ctx.random_codes(rng, (t_degree + 1, theta_degree + 1)))

    # -- queries -------------------------------------------------------------
    @property
    def t_degree(self) -> int:
        return self.a.shape[0] - 1

    @property
    def theta_degree(self) -> int:
        return self.a.shape[1] - 1

    def is_zero(self) -> bool:
        return self.a.size == 0

    def coeff(self, i: int) -> ThetaPoly:
        if 0 <= i < self.a.shape[0]:
            return ThetaPoly(self.ctx, self.a[i])
        return ThetaPoly(self.ctx)

    @property
    def coeffs(self) -> list[ThetaPoly]:
        return [ThetaPoly(self.ctx, row) for row in self.a]

    # -- arithmetic ------------------------------------------------------------
    def _coerce(self, other) -> "TThetaPoly":
        if isinstance(other, TThetaPoly):
            return other
        return TThetaPoly.constant(self.ctx, other)

    def __add__(self, other):
        other = self._coerce(other)
        return TThetaPoly(self.ctx, _pad_add(self.ctx, self.a, other.a, self.ctx.add))

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        return TThetaPoly(self.ctx, _pad_add(self.ctx, self.a, other.a, self.ctx.sub))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __neg__(self):
        return TThetaPoly(self.ctx, self.ctx.neg(self.a))

    def __mul__(self, other):
        if isinstance(other, (int, FqElem)):
            return TThetaPoly(self.ctx, self.ctx.scale(_scalar_code(self.ctx, other), self.a))
        other = self._coerce(other)
        if self.is_zero() or other.is_zero():
            return TThetaPoly(self.ctx)
        return TThetaPoly(self.ctx, self.ctx.convolve(self.a, other.a))

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "TThetaPoly":
        if n < 0:
            raise ValueError("negative power of a polynomial")
        result = TThetaPoly.constant(self.ctx, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def twist(self, k: int = 1) -> "TThetaPoly":
        if k < 0:
            raise ValueError("twist order must be nonnegative")
        if self.is_zero() or k == 0:
            return self
        step = self.ctx.q**k
        out = np.zeros((self.a.shape[0], self.theta_degree * step + 1), dtype=np.int64)
        out[:, ::step] = self.a
        return TThetaPoly(self.ctx, out)

    def hyperderiv(self, n: int) -> "TThetaPoly":
        if n < 0:
            raise ValueError("hyperderivative order must be nonnegative")
        if n == 0 or self.is_zero():
            return self
        T = self.a.shape[0]
        if n >= T:
            return TThetaPoly(self.ctx)
        p = self.ctx.p
        out = np.zeros((T - n, self.a.shape[1]), dtype=np.int64)
        for i in range(n, T):
            b = binom_mod_p(i, n, p)
            if b:
                out[i - n] = self.ctx.scale(b, self.a[i])
        return TThetaPoly(self.ctx, out)

    def at_theta(self) -> ThetaPoly:
        """Substitute t = theta."""
        if self.is_zero():
            return ThetaPoly(self.ctx)
        T, D = self.a.shape
        out = np.zeros(T + D - 1, dtype=np.int64)
        for i in range(T):
            out[i : i + D] = self.ctx.add(out[i : i + D], self.a[i])
        return ThetaPoly(self.ctx, out)

    def taylor_at_theta(self) -> list[ThetaPoly]:
        """Coefficients of the expansion in eps = t - theta (all of them, exact)."""
        return [self.hyperderiv(k).at_theta() for k in range(self.t_degree + 1)]

    def exact_div_t_poly(self, divisor: "TThetaPoly") -> "TThetaPoly":
        """Exact division by a polynomial in t with F_q coefficients."""
        if divisor.is_zero() or divisor.theta_degree > 0:
            raise ValueError("divisor must be a nonzero polynomial in t over F_q")
        ctx = self.ctx
        dcoef = divisor.a[:, 0]
        d = dcoef.size - 1
        inv_lead = ctx.inverse(int(dcoef[-1]))
        r = self.a.copy()
        T = r.shape[0]
        quo = np.zeros((max(T - d, 0), r.shape[1]), dtype=np.int64)
        for k in range(T - 1, d - 1, -1):
            row = r[k]
            if row.any():
                f = ctx.scale(inv_lead, row)
                quo[k - d] = f
                for j in range(d + 1):
                    if dcoef[j]:
                        r[k - d + j] = ctx.sub(r[k - d + j], ctx.scale(int(dcoef[j]), f))
        if r.any():
            raise ArithmeticError("division is not exact")
        return TThetaPoly(ctx, quo)

    def gauss_norm_exponent(self) -> int:
        if self.is_zero():
            raise ValueError("norm of zero")
        return self.theta_degree

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, FqElem, ThetaPoly)):
            other = TThetaPoly.constant(self.ctx, other)
        if not isinstance(other, TThetaPoly):
            return NotImplemented
        return self.ctx == other.ctx and np.array_equal(self.a, other.a)

    def __hash__(self) -> int:
        return hash((self.ctx.q, self.a.shape, self.a.tobytes()))

    def __repr__(self) -> str:
        parts = []
        for i, row in enumerate(self.a):
            if row.any():
                c = _format_poly(self.ctx, row, "θ")
                mono = "" if i == 0 else ("t" if i == 1 else f"t^{i}")
                parts.append(f"({c}){mono and '*' + mono}")
        return f"TThetaPoly({' + '.join(reversed(parts)) or '0'})"

    def to_json(self) -> list:
        return [ThetaPoly(self.ctx, row).to_json() for row in self.a]

    @classmethod
    def from_json(cls, ctx: FqContext, data) -> "TThetaPoly":
        return cls.from_coeffs(ctx, [ThetaPoly.from_json(ctx, row) for row in data])


@dataclass(frozen=True)
class Index:
    """A multi-index s = (s_1, ..., s_d) of positive integers."""

    parts: tuple[int, ...]

    def __post_init__(self):
        parts = tuple(int(x) for x in self.parts)
        if not parts or any(x < 1 for x in parts):
            raise ValueError(f"invalid index {self.parts!r}: parts must be positive and nonempty")
        object.__setattr__(self, "parts", parts)

    @classmethod
    def parse(cls, text: str) -> "Index":
        return cls(tuple(int(x) for x in str(text).replace(" ", "").split(",") if x))

    @property
    def depth(self) -> int:
        return len(self.parts)

    @property
    def weight(self) -> int:
        return sum(self.parts)

    def tail_weight(self, j: int) -> int:
        """s_j + ... + s_d for 0-based j (0 when j == depth)."""
        return sum(self.parts[j:])

    def __len__(self) -> int:
        return len(self.parts)

    def __iter__(self):
        return iter(self.parts)

    def __getitem__(self, k):
        return self.parts[k]

    def __str__(self) -> str:
        return ",".join(map(str, self.parts))


def tpoly_twist(u: TThetaPoly, k: int) -> TThetaPoly:
    return u.twist(k)


def tpoly_hyperderiv(u: TThetaPoly, n: int) -> TThetaPoly:
    return u.hyperderiv(n)


def tpoly_gauss_norm_exponent(u: TThetaPoly) -> int:
    return u.gauss_norm_exponent()


def at_condition_check(u: TThetaPoly, s: int, ctx: FqContext | None = None) -> bool:
    """Strict convergence condition (q-1)*deg_theta(u) < s*q; the zero polynomial passes."""
    if u.is_zero():
        return True
    q = (ctx or u.ctx).q
    return (q - 1) * u.gauss_norm_exponent() < s * q
