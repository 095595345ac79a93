"""The two finite local rings used throughout: F_q[t]/t^k and Z/p^k.

Both are described by a :class:`RingSpec`.  Every element has an integer
*index* in ``[0, |R|)``: for ``Z/p^k`` it is the residue itself, for
``F_q[t]/t^k`` it is ``sum(c_j * q**j)`` over the coefficient codes.  This is
exactly the enumeration ``i -> alpha_i`` used for the incidence bounds, and the
numpy tables in :meth:`RingSpec.tables` are indexed by it.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import cached_property
from typing import Union

import numpy as np

from .field import FieldSpec, FqElement, gf, is_prime


class RingMismatchError(ValueError):
    """Operands come from different rings."""


@dataclass(frozen=True)
class TruncatedSeries:
    """Element of F_q[t]/t^k; ``coeffs[i]`` is the field code of the t^i coefficient."""

    field: FieldSpec
    coeffs: tuple[int, ...]

    def __post_init__(self):
        if len(self.coeffs) < 1:
            raise ValueError("truncation length must be >= 1")
        q = self.field.q
        if any(not 0 <= c < q for c in self.coeffs):
            raise ValueError(f"coefficient codes must lie in [0, {q})")

    @classmethod
    def of(cls, field: FieldSpec, coeffs) -> TruncatedSeries:
        return cls(field, tuple(field(c).value for c in coeffs))

    @classmethod
    def zero(cls, field: FieldSpec, k: int) -> TruncatedSeries:
        return cls(field, (0,) * k)

    @classmethod
    def from_index(cls, field: FieldSpec, k: int, index: int) -> TruncatedSeries:
        q = field.q
        if not 0 <= index < q ** k:
            raise ValueError(f"index {index} out of range for length {k}")
        return cls(field, tuple((index // q ** j) % q for j in range(k)))

    @property
    def k(self) -> int:
        return len(self.coeffs)

    @property
    def index(self) -> int:
        q = self.field.q
        return sum(c * q ** j for j, c in enumerate(self.coeffs))

    def coefficient(self, i: int) -> FqElement:
        return FqElement(self.coeffs[i], self.field)

    def truncate(self, k: int) -> TruncatedSeries:
        if not 1 <= k <= self.k:
            raise ValueError(f"cannot truncate length {self.k} to {k}")
        return TruncatedSeries(self.field, self.coeffs[:k])

    def _check(self, other) -> TruncatedSeries:
        if not isinstance(other, TruncatedSeries):
            raise RingMismatchError(f"expected a series, got {type(other).__name__}")
        if other.field != self.field or other.k != self.k:
            raise RingMismatchError(
                f"{self.field}[t]/t^{self.k} vs {other.field}[t]/t^{other.k}")
        return other

    def __add__(self, other):
        other = self._check(other)
        add = self.field.add
        return TruncatedSeries(self.field, tuple(add(a, b) for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other):
        return self + (-self._check(other))

    def __neg__(self):
        neg = self.field.neg
        return TruncatedSeries(self.field, tuple(neg(a) for a in self.coeffs))

    def __mul__(self, other):
        if isinstance(other, (FqElement, int)):
            return self.scale(other)
        other = self._check(other)
        f, k = self.field, self.k
        out = [0] * k
        for i, a in enumerate(self.coeffs):
            if a:
                for j in range(k - i):
                    b = other.coeffs[j]
                    if b:
                        out[i + j] = f.add(out[i + j], f.mul(a, b))
        return TruncatedSeries(f, tuple(out))

    def scale(self, c) -> TruncatedSeries:
        c = self.field(c).value
        mul = self.field.mul
        return TruncatedSeries(self.field, tuple(mul(c, a) for a in self.coeffs))

    __rmul__ = __mul__

    def __bool__(self):
        return any(self.coeffs)

    def __repr__(self):
        return f"TruncatedSeries({self.field}, {list(self.coeffs)})"


@dataclass(frozen=True)
class PadicInt:
    """Element of Z/p^k, always stored reduced."""

    value: int
    p: int
    k: int

    def __post_init__(self):
        object.__setattr__(self, "value", self.value % self.p ** self.k)

    @property
    def index(self) -> int:
        return self.value

    def _check(self, other) -> PadicInt:
        if not isinstance(other, PadicInt):
            raise RingMismatchError(f"expected a p-adic residue, got {type(other).__name__}")
        if (other.p, other.k) != (self.p, self.k):
            raise RingMismatchError(f"Z/{self.p}^{self.k} vs Z/{other.p}^{other.k}")
        return other

    def __add__(self, other):
        return PadicInt(self.value + self._check(other).value, self.p, self.k)

    def __sub__(self, other):
        return PadicInt(self.value - self._check(other).value, self.p, self.k)

    def __mul__(self, other):
        if isinstance(other, int):
            return PadicInt(self.value * other, self.p, self.k)
        return PadicInt(self.value * self._check(other).value, self.p, self.k)

    __rmul__ = __mul__

    def __neg__(self):
        return PadicInt(-self.value, self.p, self.k)

    def __bool__(self):
        return self.value != 0

    def __repr__(self):
        return f"PadicInt({self.value}, p={self.p}, k={self.k})"


RingElement = Union[TruncatedSeries, PadicInt]

_SPEC_RE = re.compile(r"^(series|padic):(.*)$")


@dataclass(frozen=True)
class RingSpec:
    """``F_q[t]/t^k`` (kind ``"series"``, q = p^m) or ``Z/p^k`` (kind ``"padic"``)."""

    kind: str
    p: int
    k: int
    m: int = 1

    def __post_init__(self):
        if self.kind not in ("series", "padic"):
            raise ValueError(f"unknown ring kind {self.kind!r}")
        if not is_prime(self.p):
            raise ValueError(f"{self.p} is not prime")
        if self.k < 1:
            raise ValueError("nilpotency degree k must be >= 1")
        if self.kind == "padic" and self.m != 1:
            raise ValueError("padic rings have m = 1")

    @classmethod
    def series(cls, p: int, k: int, m: int = 1) -> RingSpec:
        return cls("series", p, k, m)

    @classmethod
    def padic(cls, p: int, k: int) -> RingSpec:
        return cls("padic", p, k)

    @classmethod
    def parse(cls, text: str) -> RingSpec:
        """Parse ``series:p=<p>,m=<m>,k=<k>`` or ``padic:p=<p>,k=<k>``."""
        match = _SPEC_RE.match(text.strip())
        if not match:
            raise ValueError(f"malformed ring spec {text!r}")
        kind, body = match.groups()
        try:
            params = dict(kv.split("=", 1) for kv in body.split(","))
            params = {key.strip(): int(val) for key, val in params.items()}
        except ValueError:
            raise ValueError(f"malformed ring spec {text!r}") from None
        allowed = {"p", "k", "m"} if kind == "series" else {"p", "k"}
        if not {"p", "k"} <= params.keys() <= allowed:
            raise ValueError(f"ring spec {text!r} needs p and k (and m for series)")
        return cls(kind, params["p"], params["k"], params.get("m", 1))

    def __str__(self):
        if self.kind == "series":
            return f"series:p={self.p},m={self.m},k={self.k}"
        return f"padic:p={self.p},k={self.k}"

    @property
    def field(self) -> FieldSpec:
        if self.kind != "series":
            raise AttributeError("padic rings have no coefficient field")
        return gf(self.p, self.m)

    @property
    def residue(self) -> int:
        """|R/m|: q for series, p for padic."""
        return self.p ** self.m

    @property
    def size(self) -> int:
        return self.residue ** self.k

    # -- elements ----------------------------------------------------------

    def element(self, index: int) -> RingElement:
        if not 0 <= index < self.size:
            raise ValueError(f"index {index} out of range [0, {self.size})")
        if self.kind == "padic":
            return PadicInt(index, self.p, self.k)
        return TruncatedSeries.from_index(self.field, self.k, index)

    def elements(self):
        return [self.element(i) for i in range(self.size)]

    @property
    def zero(self) -> RingElement:
        return self.element(0)

    @property
    def one(self) -> RingElement:
        return self.element(1)

    def contains(self, r) -> bool:
        if self.kind == "padic":
            return isinstance(r, PadicInt) and (r.p, r.k) == (self.p, self.k)
        return isinstance(r, TruncatedSeries) and r.field == self.field and r.k == self.k

    def check(self, r) -> RingElement:
        if not self.contains(r):
            raise RingMismatchError(f"{r!r} is not an element of {self}")
        return r

    def is_unit(self, r) -> bool:
        return valuation(r, self) == 0

    # -- text form ---------------------------------------------------------

    def format_element(self, r) -> str:
        self.check(r)
        if self.kind == "padic":
            return str(r.value)
        if self.m == 1:
            return ",".join(str(c) for c in r.coeffs)
        f = self.field
        return ",".join(":".join(str(d) for d in f.digits(c)) for c in r.coeffs)

    def parse_element(self, text) -> RingElement:
        """Inverse of :meth:`format_element`.

        Series coefficients are either a field code or, for m > 1, a
        colon-separated base-p digit vector (lowest digit first).  A shorter
        coefficient list is zero-padded up to length k.
        """
        if self.kind == "padic":
            return PadicInt(int(text), self.p, self.k)
        f = self.field
        parts = [s.strip() for s in str(text).split(",")]
        if len(parts) > self.k or any(not s for s in parts):
            raise ValueError(f"malformed coefficient list {text!r} for {self}")
        codes = []
        for s in parts:
            if ":" in s:
                codes.append(f.from_digits(int(d) for d in s.split(":")))
            else:
                c = int(s)
                if not 0 <= c < f.q:
                    raise ValueError(f"coefficient {c} out of range for {f}")
                codes.append(c)
        return TruncatedSeries(f, tuple(codes + [0] * (self.k - len(codes))))

    # -- index-level tables --------------------------------------------------

    TABLE_LIMIT = 1 << 10

    @cached_property
    def tables(self) -> RingTables:
        """Addition/multiplication/negation tables over element indices."""
        n = self.size
        if n > self.TABLE_LIMIT:
            raise ValueError(f"|R| = {n} exceeds table limit {self.TABLE_LIMIT}")
        if self.kind == "padic":
            idx = np.arange(n, dtype=np.int64)
            add = (idx[:, None] + idx[None, :]) % n
            mul = (idx[:, None] * idx[None, :]) % n
            neg = (-idx) % n
        else:
            f, q, k = self.field, self.residue, self.k
            fa, fm, fn = f.add_table, f.mul_table, f.neg_table
            idx = np.arange(n, dtype=np.int64)
            dig = np.stack([(idx // q ** j) % q for j in range(k)])  # (k, n)
            weights = np.array([q ** j for j in range(k)], dtype=np.int64)
            add = np.zeros((n, n), dtype=np.int64)
            for j in range(k):
                add += weights[j] * fa[dig[j][:, None], dig[j][None, :]]
            neg = weights @ fn[dig]
            mul = np.zeros((n, n), dtype=np.int64)
            for d in range(k):
                acc = np.zeros((n, n), dtype=np.int16)
                for i in range(d + 1):
                    acc = fa[acc, fm[dig[i][:, None], dig[d - i][None, :]]]
                mul += weights[d] * acc
        dtype = np.int32
        return RingTables(add.astype(dtype), mul.astype(dtype), np.asarray(neg).astype(dtype))


@dataclass(frozen=True, eq=False)
class RingTables:
    add: np.ndarray
    mul: np.ndarray
    neg: np.ndarray

    def sub(self, a, b):
        return self.add[a, self.neg[b]]


def spec_of(r) -> RingSpec:
    if isinstance(r, PadicInt):
        return RingSpec.padic(r.p, r.k)
    if isinstance(r, TruncatedSeries):
        return RingSpec.series(r.field.p, r.k, r.field.m)
    raise TypeError(f"not a ring element: {r!r}")


def _same(a, b):
    if spec_of(a) != spec_of(b):
        raise RingMismatchError(f"{spec_of(a)} vs {spec_of(b)}")


def ring_add(a, b):
    _same(a, b)
    return a + b


def ring_sub(a, b):
    _same(a, b)
    return a - b


def ring_mul(a, b):
    _same(a, b)
    return a * b


def ring_neg(a):
    spec_of(a)
    return -a


def valuation(r, spec: RingSpec | None = None) -> int:
    """Largest l with r in m^l; the zero element has valuation k."""
    if spec is not None:
        spec.check(r)
    if isinstance(r, TruncatedSeries):
        return next((i for i, c in enumerate(r.coeffs) if c), r.k)
    if isinstance(r, PadicInt):
        v, x = 0, r.value
        while x and x % r.p == 0:
            x //= r.p
            v += 1
        return v if x else r.k
    raise TypeError(f"not a ring element: {r!r}")


def index_valuation(i: int, residue: int, k: int) -> int:
    """Valuation of alpha_i: trailing base-``residue`` zeros of i, capped at k."""
    if i == 0:
        return k
    v = 0
    while i % residue == 0 and v < k:
        i //= residue
        v += 1
    return v


def alpha_enumeration(i: int, spec: RingSpec) -> RingElement:
    """alpha_i: i mod p^k (padic) or base-q digits of i as coefficients (series)."""
    return spec.element(i)


def enumerate_directions(spec: RingSpec) -> list[tuple[RingElement, RingElement]]:
    """Canonical reduced directions: (1, b) for all b, then (a, 1) for a in m."""
    one = spec.one
    dirs = [(one, b) for b in spec.elements()]
    r = spec.residue
    dirs += [(spec.element(i), one) for i in range(0, spec.size, r)]
    return dirs


def direction_indices(spec: RingSpec) -> list[tuple[int, int]]:
    """Index-level form of :func:`enumerate_directions`."""
    n, r = spec.size, spec.residue
    return [(1, b) for b in range(n)] + [(a, 1) for a in range(0, n, r)]
