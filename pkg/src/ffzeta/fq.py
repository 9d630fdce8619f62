"""Finite fields F_q with q = p^e.

Elements are stored as integer codes ``sum(c_j * p**j)`` where ``c_j`` are the
coordinates over F_p with respect to the power basis of F_p[x]/(modulus).
Scalar arithmetic goes through precomputed tables; arrays of codes are handled
in bulk by the vectorised helpers on :class:`FqContext`, which is what the
polynomial and series layers build on.
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass

import numpy as np
from scipy import fft as sp_fft

# Irreducible moduli (low degree first, monic) for the non-prime fields we
# support without a user-supplied polynomial.
BUILTIN_MODULI = {
    4: (1, 1, 1),
    8: (1, 1, 0, 1),
    9: (1, 0, 1),
    16: (1, 1, 0, 0, 1),
    25: (2, 0, 1),
    27: (1, 2, 0, 1),
}


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    return all(n % d for d in range(2, int(n**0.5) + 1))


def prime_power(q: int) -> tuple[int, int]:
    """Return ``(p, e)`` with ``q == p**e``, or raise ValueError."""
    if q < 2:
        raise ValueError(f"q={q} is not a prime power")
    for p in range(2, q + 1):
        if q % p == 0:
            if not _is_prime(p):
                break
            e, r = 0, q
            while r % p == 0:
                r //= p
                e += 1
            if r == 1:
                return p, e
            break
    raise ValueError(f"q={q} is not a prime power")


def binom_mod_p(i: int, n: int, p: int) -> int:
    """Binomial coefficient C(i, n) mod p via Lucas' theorem (0 if i < n)."""
    if n < 0 or i < 0 or n > i:
        return 0
    result = 1
    while n:
        a, b = i % p, n % p
        if b > a:
            return 0
        result = result * _small_binom(a, b) % p
        i //= p
        n //= p
    return result


@functools.lru_cache(maxsize=None)
def _small_binom(a: int, b: int) -> int:
    out = 1
    for k in range(b):
        out = out * (a - k) // (k + 1)
    return out


def _poly_divides(f: list[int], g: list[int], p: int) -> bool:
    """True if monic g divides f over F_p (lists low degree first)."""
    r = list(f)
    dg = len(g) - 1
    for k in range(len(r) - 1, dg - 1, -1):
        c = r[k] % p
        if c:
            for j in range(dg + 1):
                r[k - dg + j] = (r[k - dg + j] - c * g[j]) % p
    return not any(x % p for x in r[:dg])


def is_irreducible(modulus: tuple[int, ...], p: int) -> bool:
    """Brute-force irreducibility test: no monic factor of degree <= e/2."""
    e = len(modulus) - 1
    f = [c % p for c in modulus]
    if e < 1 or f[-1] != 1:
        return False
    for d in range(1, e // 2 + 1):
        for tail in itertools.product(range(p), repeat=d):
            if _poly_divides(f, list(tail) + [1], p):
                return False
    return True


_DIRECT_LIMIT = 60_000


def _conv1d(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if a.size * b.size <= _DIRECT_LIMIT:
        return np.convolve(a, b)
    n = a.size + b.size - 1
    size = sp_fft.next_fast_len(n, real=True)
    prod = sp_fft.rfft(a, size) * sp_fft.rfft(b, size)
    return np.rint(sp_fft.irfft(prod, size)[:n]).astype(np.int64)


def _int_convolve(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Exact full convolution of small nonnegative integer arrays (1-D or 2-D).

    2-D inputs are packed row after row with enough zero padding that the
    1-D product of the packed arrays holds the 2-D product without overlap.
    Large products go through a float FFT rounded back to integers; entries
    stay far below 2^53 so the rounding is exact.
    """
    if a.ndim == 1:
        return _conv1d(a, b)
    (ra, wa), (rb, wb) = a.shape, b.shape
    width = wa + wb - 1
    pa = np.zeros((ra, width), dtype=np.int64)
    pa[:, :wa] = a
    pb = np.zeros((rb, width), dtype=np.int64)
    pb[:, :wb] = b
    # the packed product runs past the last row only through zero padding
    flat = _conv1d(pa.ravel(), pb.ravel())
    return flat[: (ra + rb - 1) * width].reshape(ra + rb - 1, width)


class FqContext:
    """The field F_q together with vectorised helpers for arrays of codes."""

    def __init__(self, q: int, modulus: tuple[int, ...] | list[int] | None = None):
        p, e = prime_power(q)
        if modulus is None:
            if e == 1:
                modulus = (0, 1)
            elif q in BUILTIN_MODULI:
                modulus = BUILTIN_MODULI[q]
            else:
                raise ValueError(f"no built-in modulus for q={q}; supply one")
        modulus = tuple(int(c) % p for c in modulus)
        if len(modulus) != e + 1:
            raise ValueError(f"modulus must have degree {e}")
        if e > 1 and not is_irreducible(modulus, p):
            raise ValueError(f"modulus {modulus} is not irreducible over F_{p}")
        self.p, self.e, self.q = p, e, q
        self.modulus = modulus
        self._weights = p ** np.arange(e, dtype=np.int64)
        self._build_tables()

    def __repr__(self) -> str:
        return f"FqContext(q={self.q}, modulus={self.modulus})"

    def __eq__(self, other) -> bool:
        return isinstance(other, FqContext) and (self.q, self.modulus) == (other.q, other.modulus)

    def __hash__(self) -> int:
        return hash((self.q, self.modulus))

    # -- tables ---------------------------------------------------------------
    def _build_tables(self) -> None:
        q = self.q
        codes = np.arange(q, dtype=np.int64)
        coords = self.decode(codes)  # (e, q)
        add = (coords[:, :, None] + coords[:, None, :]) % self.p
        self.add_table = self.encode(add)
        self.neg_table = self.encode((-coords) % self.p)
        self.sub_table = self.add_table[:, self.neg_table]
        mul = np.zeros((q, q), dtype=np.int64)
        for a in range(q):
            row = self._mul_coords(coords[:, a : a + 1], coords)
            mul[a] = self.encode(row)
        self.mul_table = mul
        inv = np.zeros(q, dtype=np.int64)
        for a in range(1, q):
            inv[a] = int(np.nonzero(mul[a] == 1)[0][0])
        self.inv_table = inv

    def _mul_coords(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        e, p = self.e, self.p
        raw = np.zeros((2 * e - 1,) + np.broadcast(a[0], b[0]).shape, dtype=np.int64)
        for r in range(e):
            for s in range(e):
                raw[r + s] += a[r] * b[s]
        return self._reduce(raw) % p

    def _reduce(self, raw: np.ndarray) -> np.ndarray:
        """Reduce a coordinate stack of length 2e-1 modulo the field modulus."""
        e, p = self.e, self.p
        raw = raw % p
        m = self.modulus
        for k in range(raw.shape[0] - 1, e - 1, -1):
            top = raw[k]
            if not top.any():
                continue
            for j in range(e):
                if m[j]:
                    raw[k - e + j] = (raw[k - e + j] - m[j] * top) % p
        return raw[:e]

    # -- code <-> coordinates ------------------------------------------------
    def decode(self, codes: np.ndarray) -> np.ndarray:
        codes = np.asarray(codes, dtype=np.int64)
        if self.e == 1:
            return codes[None, ...]
        return (codes[None, ...] // self._weights.reshape((-1,) + (1,) * codes.ndim)) % self.p

    def encode(self, coords: np.ndarray) -> np.ndarray:
        coords = np.asarray(coords, dtype=np.int64)
        if self.e == 1:
            return coords[0] % self.p
        return np.tensordot(self._weights, coords % self.p, axes=(0, 0))

    def coords(self, code: int) -> tuple[int, ...]:
        return tuple(int(c) for c in self.decode(np.array(code))[:, ...].ravel())

    def from_coords(self, coords) -> int:
        coords = list(coords)
        if len(coords) != self.e:
            raise ValueError(f"expected {self.e} coordinates")
        return int(sum((int(c) % self.p) * self.p**j for j, c in enumerate(coords)))

    def from_int(self, n: int) -> int:
        """Code of the prime-field element n mod p."""
        return int(n) % self.p

    # -- array arithmetic ------------------------------------------------------
    def add(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        if self.e == 1:
            return (a + b) % self.p
        return self.add_table[a, b]

    def sub(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        if self.e == 1:
            return (a - b) % self.p
        return self.sub_table[a, b]

    def neg(self, a: np.ndarray) -> np.ndarray:
        if self.e == 1:
            return (-a) % self.p
        return self.neg_table[a]

    def scale(self, c: int, a: np.ndarray) -> np.ndarray:
        if self.e == 1:
            return (c * a) % self.p
        return self.mul_table[c, a]

    def mul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """Elementwise product."""
        if self.e == 1:
            return (a * b) % self.p
        return self.mul_table[a, b]

    def convolve(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """Full convolution of code arrays (1-D or 2-D) with F_q arithmetic."""
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if a.size == 0 or b.size == 0:
            shape = tuple(max(x + y - 1, 0) for x, y in zip(a.shape, b.shape))
            return np.zeros(shape, dtype=np.int64)
        if self.e == 1:
            return _int_convolve(a, b) % self.p
        A, B = self.decode(a), self.decode(b)
        raw = None
        for r in range(self.e):
            if not A[r].any():
                continue
            for s in range(self.e):
                if not B[s].any():
                    continue
                c = _int_convolve(A[r], B[s])
                if raw is None:
                    raw = np.zeros((2 * self.e - 1,) + c.shape, dtype=np.int64)
                raw[r + s] += c
        if raw is None:
            shape = tuple(x + y - 1 for x, y in zip(a.shape, b.shape))
            return np.zeros(shape, dtype=np.int64)
        return self.encode(self._reduce(raw))

    def power(self, c: int, n: int) -> int:
        result, base = 1, int(c)
        n = int(n)
        if n < 0:
            base = self.inverse(base)
            n = -n
        while n:
            if n & 1:
                result = int(self.mul_table[result, base])
            base = int(self.mul_table[base, base])
            n >>= 1
        return result

    def inverse(self, c: int) -> int:
        if c == 0:
            raise ZeroDivisionError("inverse of zero in F_q")
        return int(self.inv_table[c])

    def elem(self, value) -> "FqElem":
        """Build an element from a code, an int (reduced mod p) or coordinates."""
        if isinstance(value, FqElem):
            return value
        if isinstance(value, (list, tuple)):
            return FqElem(self, self.from_coords(value))
        return FqElem(self, self.from_int(value))

    def random_codes(self, rng: np.random.Generator, size) -> np.ndarray:
        return rng.integers(0, self.q, size=size, dtype=np.int64)

    def elements(self) -> list["FqElem"]:
        return [FqElem(self, c) for c in range(self.q)]


@functools.lru_cache(maxsize=None)
def field(q: int, modulus: tuple[int, ...] | None = None) -> FqContext:
    """Cached context constructor."""
    return FqContext(q, modulus)


@dataclass(frozen=True)
class FqElem:
    """A single element of F_q, carried with its context."""

    ctx: FqContext
    code: int

    @property
    def coords(self) -> tuple[int, ...]:
        return self.ctx.coords(self.code)

    def _other(self, other) -> int:
        if isinstance(other, FqElem):
            return other.code
        return self.ctx.from_int(other)

    def __add__(self, other):
        return FqElem(self.ctx, int(self.ctx.add_table[self.code, self._other(other)]))

    __radd__ = __add__

    def __sub__(self, other):
        return FqElem(self.ctx, int(self.ctx.sub_table[self.code, self._other(other)]))

    def __rsub__(self, other):
        return FqElem(self.ctx, int(self.ctx.sub_table[self._other(other), self.code]))

    def __neg__(self):
        return FqElem(self.ctx, int(self.ctx.neg_table[self.code]))

    def __mul__(self, other):
        return FqElem(self.ctx, int(self.ctx.mul_table[self.code, self._other(other)]))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return FqElem(self.ctx, int(self.ctx.mul_table[self.code, self.ctx.inverse(self._other(other))]))

    def __pow__(self, n: int):
        return FqElem(self.ctx, self.ctx.power(self.code, n))

    def inverse(self) -> "FqElem":
        return FqElem(self.ctx, self.ctx.inverse(self.code))

    def __bool__(self) -> bool:
        return self.code != 0

    def __eq__(self, other) -> bool:
        if isinstance(other, FqElem):
            return self.ctx == other.ctx and self.code == other.code
        if isinstance(other, int):
            return self.code == self.ctx.from_int(other)
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.ctx.q, self.code))

    def __repr__(self) -> str:
        if self.ctx.e == 1:
            return f"{self.code}"
        return f"F{self.ctx.q}{list(self.coords)}"
