"""Exact arithmetic in GF(p^k) with integer-encoded elements.

Elements are encoded as integers in 0..q-1 whose base-p digits are the
coefficients of the polynomial residue, constant term least significant.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

from .errors import (
    BadElement,
    DegreeOutOfRange,
    NotPrime,
    NotPrimePower,
    OrderTooLarge,
    ZeroInverse,
)

MAX_ORDER = 1 << 16


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    i = 3
    while i * i <= n:
        if n % i == 0:
            return False
        i += 2
    return True


def factor_prime_power(q: int) -> tuple[int, int]:
    """Return (p, k) with q = p^k, or raise NotPrimePower."""
    if q < 2:
        raise NotPrimePower(f"{q} is not a prime power")
    for p in range(2, q + 1):
        if q % p == 0:
            if not is_prime(p):
                raise NotPrimePower(f"{q} is not a prime power")
            k = 0
            m = q
            while m % p == 0:
                m //= p
                k += 1
            if m != 1:
                raise NotPrimePower(f"{q} is not a prime power")
            return p, k
    raise NotPrimePower(f"{q} is not a prime power")


# -- polynomial helpers over Z_p (coefficient tuples, constant term first) --

def _poly_trim(c: tuple[int, ...]) -> tuple[int, ...]:
    n = len(c)
    while n > 0 and c[n - 1] == 0:
        n -= 1
    return c[:n]


def _poly_mul(a: tuple[int, ...], b: tuple[int, ...], p: int) -> tuple[int, ...]:
    if not a or not b:
        return ()
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % p
    return _poly_trim(tuple(out))


def _poly_mod(a: tuple[int, ...], m: tuple[int, ...], p: int) -> tuple[int, ...]:
    # m must be monic
    a = list(a)
    dm = len(m) - 1
    while len(a) - 1 >= dm and a:
        lead = a[-1]
        if lead:
            shift = len(a) - 1 - dm
            for i in range(len(m)):
                a[shift + i] = (a[shift + i] - lead * m[i]) % p
        a.pop()
    return _poly_trim(tuple(a))


def _irreducible(poly: tuple[int, ...], p: int) -> bool:
    """Trial division by every monic polynomial of degree 1..deg/2."""
    deg = len(poly) - 1
    for d in range(1, deg // 2 + 1):
        for enc in range(p ** d):
            div = _decode(enc, p, d) + (1,)
            if not _poly_mod(poly, div, p):
                return False
    return True


def _decode(enc: int, p: int, width: int) -> tuple[int, ...]:
    digits = []
    for _ in range(width):
        digits.append(enc % p)
        enc //= p
    return tuple(digits)


def _encode(coeffs: tuple[int, ...], p: int) -> int:
    out = 0
    for c in reversed(coeffs):
        out = out * p + c
    return out


@dataclass(frozen=True)
class FieldTable:
    """GF(p^k) arithmetic on integer-encoded elements."""

    p: int
    k: int
    q: int
    modulus: tuple[int, ...] = field(repr=False)

    def _check(self, a: int) -> None:
        if not isinstance(a, int) or not 0 <= a < self.q:
            raise BadElement(f"{a!r} is not an element of GF({self.q})")

    def _coeffs(self, a: int) -> tuple[int, ...]:
        return _poly_trim(_decode(a, self.p, self.k))

    def add(self, a: int, b: int) -> int:
        self._check(a)
        self._check(b)
        if self.k == 1:
            return (a + b) % self.p
        da, db = _decode(a, self.p, self.k), _decode(b, self.p, self.k)
        return _encode(tuple((x + y) % self.p for x, y in zip(da, db)), self.p)

    def neg(self, a: int) -> int:
        self._check(a)
        digits = _decode(a, self.p, self.k)
        return _encode(tuple((-x) % self.p for x in digits), self.p)

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        self._check(a)
        self._check(b)
        if self.k == 1:
            return (a * b) % self.p
        prod = _poly_mul(self._coeffs(a), self._coeffs(b), self.p)
        red = _poly_mod(prod, self.modulus, self.p)
        return _encode(red + (0,) * (self.k - len(red)), self.p)

    def inv(self, a: int) -> int:
        self._check(a)
        if a == 0:
            raise ZeroInverse("0 has no multiplicative inverse")
        return self.pow(a, self.q - 2)

    def pow(self, a: int, e: int) -> int:
        self._check(a)
        if e < 0:
            raise BadElement("exponent must be non-negative")
        out = 1
        base = a
        while e:
            if e & 1:
                out = self.mul(out, base)
            base = self.mul(base, base)
            e >>= 1
        return out

    def trace(self, a: int) -> int:
        """Field trace to the prime subfield Z_p, returned as an int in 0..p-1."""
        self._check(a)
        t = 0
        x = a
        for _ in range(self.k):
            t = self.add(t, x)
            x = self.pow(x, self.p)
        # trace lands in the prime subfield: constant polynomial
        return t

    @property
    def elements(self) -> range:
        return range(self.q)


@lru_cache(maxsize=None)
def build_field(p: int, k: int) -> FieldTable:
    """Construct GF(p^k) with a deterministic modulus.

    The modulus is the lexicographically smallest (low-degree coefficients
    compared first) monic irreducible polynomial of degree k over Z_p with a
    nonzero constant term.
    """
    if not is_prime(p):
        raise NotPrime(f"{p} is not prime")
    if k < 1:
        raise DegreeOutOfRange(f"extension degree must be >= 1, got {k}")
    q = p ** k
    if q > MAX_ORDER:
        raise OrderTooLarge(f"field order {q} exceeds {MAX_ORDER}")
    modulus = None
    for enc in range(p ** k):
        cand = _decode(enc, p, k) + (1,)
        if cand[0] == 0:
            continue
        if _irreducible(cand, p):
            modulus = cand
            break
    assert modulus is not None  # irreducibles of every degree exist over Z_p
    return FieldTable(p=p, k=k, q=q, modulus=modulus)


def field_for_order(q: int) -> FieldTable:
    """GF(q) for a prime-power q, or NotPrimePower."""
    p, k = factor_prime_power(q)
    return build_field(p, k)


def field_arith(F: FieldTable, op: str, a: int, b: int | None = None) -> int:
    """Dispatch a single field operation by name."""
    if op == "add":
        return F.add(a, b)
    if op == "mul":
        return F.mul(a, b)
    if op == "neg":
        return F.neg(a)
    if op == "inv":
        return F.inv(a)
    if op == "pow":
        return F.pow(a, b)
    raise ValueError(f"unknown field operation {op!r}")
