"""Finite fields F_q with q = p^m.

Elements are encoded as integers ``0 <= code < q``; the base-p digits of the
code (lowest first) are the coefficients of the polynomial representative
modulo the field's defining polynomial.  For m = 1 the code is simply the
residue mod p.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field
from functools import cached_property
from itertools import product

import numpy as np


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def prime_power(q: int) -> tuple[int, int]:
    """Return (p, m) with q = p^m, or raise ValueError."""
    if q < 2:
        raise ValueError(f"{q} is not a prime power")
    p = next(d for d in range(2, q + 1) if q % d == 0)
    m, rest = 0, q
    while rest % p == 0:
        rest //= p
        m += 1
    if rest != 1:
        raise ValueError(f"{q} is not a prime power")
    return p, m


# Polynomials over F_p as coefficient tuples, lowest degree first, no trailing zeros.

def _trim(c: list[int]) -> list[int]:
    while c and c[-1] == 0:
        c.pop()
    return c


def poly_mod(a, b, p: int) -> list[int]:
    """Remainder of a modulo the nonzero polynomial b over F_p."""
    a = _trim([x % p for x in a])
    b = _trim([x % p for x in b])
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    inv_lead = pow(b[-1], p - 2, p)
    while len(a) >= len(b):
        shift = len(a) - len(b)
        f = a[-1] * inv_lead % p
        for i, bc in enumerate(b):
            a[shift + i] = (a[shift + i] - f * bc) % p
        _trim(a)
    return a


def is_irreducible(poly, p: int) -> bool:
    """Trial division by every monic polynomial of degree 1..deg/2."""
    poly = _trim([x % p for x in poly])
    deg = len(poly) - 1
    if deg < 1:
        return False
    for d in range(1, deg // 2 + 1):
        for low in product(range(p), repeat=d):
            if not poly_mod(poly, list(low) + [1], p):
                return False
    return True


def least_irreducible(p: int, m: int) -> tuple[int, ...]:
    """Lexicographically least monic irreducible polynomial of degree m over F_p.

    Candidates are ordered by the integer sum(c_i p^i) of their lower
    coefficients, which is lexicographic order read from the top degree down.
    """
    if m == 1:
        return (0, 1)
    for code in range(p ** m):
        low = [(code // p ** i) % p for i in range(m)]
        if low[0] == 0:
            continue
        if is_irreducible(low + [1], p):
            return tuple(low + [1])
    raise AssertionError("no irreducible polynomial found")  # impossible for prime p


@dataclass(frozen=True)
class FieldSpec:
    """The field F_q, q = p^m, built on the least monic irreducible modulus."""

    p: int
    m: int = 1
    modulus: tuple[int, ...] = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        if not is_prime(self.p):
            raise ValueError(f"characteristic {self.p} is not prime")
        if self.m < 1:
            raise ValueError("extension degree must be >= 1")
        object.__setattr__(self, "modulus", least_irreducible(self.p, self.m))

    @property
    def q(self) -> int:
        return self.p ** self.m

    def __str__(self):
        return f"F_{self.q}"

    # -- representation ---------------------------------------------------

    def digits(self, code: int) -> tuple[int, ...]:
        return tuple((code // self.p ** i) % self.p for i in range(self.m))

    def from_digits(self, digits) -> int:
        digits = list(digits)
        if len(digits) > self.m or any(not 0 <= d < self.p for d in digits):
            raise ValueError(f"invalid digit vector {digits} for {self}")
        return sum(d * self.p ** i for i, d in enumerate(digits))

    def __call__(self, value) -> FqElement:
        """Element from a code, a digit vector, or another element."""
        if isinstance(value, FqElement):
            if value.field != self:
                raise ValueError("element belongs to a different field")
            return value
        if isinstance(value, (tuple, list)):
            return FqElement(self.from_digits(value), self)
        value = int(value)
        if self.m == 1:
            value %= self.p
        elif not 0 <= value < self.q:
            raise ValueError(f"code {value} out of range for {self}")
        return FqElement(value, self)

    def elements(self):
        return [FqElement(c, self) for c in range(self.q)]

    # -- integer-code arithmetic -------------------------------------------

    def add(self, a: int, b: int) -> int:
        if self.m == 1:
            return (a + b) % self.p
        if self.p == 2:
            return a ^ b
        return self._add_rows[a][b]

    def neg(self, a: int) -> int:
        if self.m == 1:
            return -a % self.p
        return self._neg_row[a]

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if self.m == 1:
            return a * b % self.p
        return self._mul_rows[a][b]

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError(f"0 has no inverse in {self}")
        if self.m == 1:
            return pow(a, self.p - 2, self.p)
        return self._inv_row[a]

    def _poly_mul_code(self, a: int, b: int) -> int:
        da, db = self.digits(a), self.digits(b)
        prod = [0] * (2 * self.m - 1)
        for i, x in enumerate(da):
            if x:
                for j, y in enumerate(db):
                    prod[i + j] += x * y
        return self.from_digits(poly_mod(prod, self.modulus, self.p) or [0])

    @cached_property
    def _add_rows(self):
        q, p = self.q, self.p
        dig = [self.digits(c) for c in range(q)]
        return [[self.from_digits((x + y) % p for x, y in zip(dig[a], dig[b]))
                 for b in range(q)] for a in range(q)]

    @cached_property
    def _neg_row(self):
        return [self.from_digits(-d % self.p for d in self.digits(c)) for c in range(self.q)]

    @cached_property
    def _mul_rows(self):
        return [[self._poly_mul_code(a, b) for b in range(self.q)] for a in range(self.q)]

    @cached_property
    def _inv_row(self):
        row = [0] * self.q
        for a in range(1, self.q):
            for b in range(1, self.q):
                if self.mul(a, b) == 1:
                    row[a] = b
                    break
        return row

    # -- vectorised tables for the enumeration kernels ----------------------

    @cached_property
    def add_table(self) -> np.ndarray:
        q = self.q
        return np.array([[self.add(a, b) for b in range(q)] for a in range(q)], dtype=np.int16)

    @cached_property
    def mul_table(self) -> np.ndarray:
        q = self.q
        return np.array([[self.mul(a, b) for b in range(q)] for a in range(q)], dtype=np.int16)

    @cached_property
    def neg_table(self) -> np.ndarray:
        return np.array([self.neg(a) for a in range(self.q)], dtype=np.int16)


@functools.lru_cache(maxsize=None)
def gf(p: int, m: int = 1) -> FieldSpec:
    """Shared FieldSpec instance for F_{p^m}."""
    return FieldSpec(p, m)


def gf_q(q: int) -> FieldSpec:
    return gf(*prime_power(q))


@dataclass(frozen=True)
class FqElement:
    value: int
    field: FieldSpec

    def _other(self, other) -> int:
        if isinstance(other, FqElement):
            if other.field != self.field:
                raise ValueError(f"cannot combine elements of {self.field} and {other.field}")
            return other.value
        if isinstance(other, int):
            return self.field(other).value
        return NotImplemented

    @property
    def rep(self) -> tuple[int, ...]:
        return self.field.digits(self.value)

    def __add__(self, other):
        b = self._other(other)
        if b is NotImplemented:
            return b
        return FqElement(self.field.add(self.value, b), self.field)

    __radd__ = __add__

    def __sub__(self, other):
        b = self._other(other)
        if b is NotImplemented:
            return b
        return FqElement(self.field.sub(self.value, b), self.field)

    def __rsub__(self, other):
        return -(self - other)

    def __mul__(self, other):
        b = self._other(other)
        if b is NotImplemented:
            return b
        return FqElement(self.field.mul(self.value, b), self.field)

    __rmul__ = __mul__

    def __neg__(self):
        return FqElement(self.field.neg(self.value), self.field)

    def inverse(self) -> FqElement:
        return FqElement(self.field.inv(self.value), self.field)

    def __truediv__(self, other):
        b = self._other(other)
        if b is NotImplemented:
            return b
        return FqElement(self.field.mul(self.value, self.field.inv(b)), self.field)

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        result, base = 1, self.value
        while e:
            if e & 1:
                result = self.field.mul(result, base)
            base = self.field.mul(base, base)
            e >>= 1
        return FqElement(result, self.field)

    def __bool__(self):
        return self.value != 0

    def __int__(self):
        return self.value

    def __repr__(self):
        return f"FqElement({self.value}, {self.field})"
