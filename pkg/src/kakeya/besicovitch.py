"""The measure-zero Kakeya construction over F_q[[t]], at finite truncation.

``H = {(x, y) : a x + y = a* for some a}``, where ``a*`` shifts the
coefficients of ``a`` down by one and forces zeros at the indices ``2^j - 2``.
Comparing coefficients of t^l gives equation E_l:

    a_l x_0 + a_{l-1} x_1 + ... + a_0 x_l + y_l = a*_l

For l not of the form 2^j - 2 the right-hand side is a_{l+1}, so the equation
just determines a_{l+1}; the remaining rows are genuine constraints on the
free coefficients a_0, a_1, a_3, a_7, ...
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .field import FieldSpec, FqElement
from .ring import RingSpec, TruncatedSeries

NAIVE_LIMIT = 1 << 24
GRID_LIMIT = 1 << 26


def is_star_index(i: int) -> bool:
    """True iff i = 2^j - 2 for some j >= 1, i.e. i + 2 is a power of two."""
    return i >= 0 and ((i + 2) & (i + 1)) == 0


def is_free_index(i: int) -> bool:
    """True iff a_i is never determined by an earlier equation (i = 2^j - 1)."""
    return i >= 0 and (i & (i + 1)) == 0


@dataclass(frozen=True)
class StarIndexSet:
    bound: int

    @property
    def indices(self) -> tuple[int, ...]:
        return tuple(i for i in range(self.bound + 1) if is_star_index(i))

    def __contains__(self, i) -> bool:
        return 0 <= i <= self.bound and is_star_index(i)

    def __iter__(self):
        return iter(self.indices)


def star(a: TruncatedSeries) -> TruncatedSeries:
    """a* truncated to length k - 1 (the last coefficient would need a_k)."""
    if a.k < 2:
        raise ValueError("truncation too short: star needs k >= 2")
    out = tuple(0 if is_star_index(i) else a.coeffs[i + 1] for i in range(a.k - 1))
    return TruncatedSeries(a.field, out)


# -- lines ------------------------------------------------------------------

def line_points(point, direction, spec: RingSpec) -> frozenset:
    """All points ``point + s * direction`` for s in R."""
    x0, y0 = (spec.check(c) for c in point)
    d1, d2 = (spec.check(c) for c in direction)
    if not d1 and not d2:
        raise ValueError("zero direction vector")
    return frozenset((x0 + s * d1, y0 + s * d2) for s in spec.elements())


def h_line_for_direction(b: TruncatedSeries):
    """Base point and direction of the (1, b)-line inside H at truncation b.k - 1.

    Returns ``((0, -b*), (1, b mod t^(k)))`` with k = b.k - 1.
    """
    k = b.k - 1
    bs = star(b)
    zero = TruncatedSeries.zero(b.field, k)
    one = TruncatedSeries.of(b.field, [1] + [0] * (k - 1))
    return (zero, -bs), (one, b.truncate(k))


# -- stage systems -------------------------------------------------------------

def _codes(v, field: FieldSpec) -> tuple[int, ...]:
    if isinstance(v, TruncatedSeries):
        if v.field != field:
            raise ValueError("coefficient vector over a different field")
        return v.coeffs
    return tuple(field(c).value for c in v)


def _field_of(x, y, field):
    if field is not None:
        return field
    for v in (x, y):
        if isinstance(v, TruncatedSeries):
            return v.field
        for c in v:
            if isinstance(c, FqElement):
                return c.field
    raise ValueError("field must be given for plain integer coefficient vectors")


@dataclass(frozen=True)
class SolutionCount:
    """Zero, or q^exponent."""

    q: int
    exponent: int | None

    @classmethod
    def from_count(cls, q: int, count: int) -> SolutionCount:
        if count == 0:
            return cls(q, None)
        e, c = 0, count
        while c % q == 0:
            c //= q
            e += 1
        if c != 1:
            raise ValueError(f"{count} is neither zero nor a power of {q}")
        return cls(q, e)

    @property
    def value(self) -> int:
        return 0 if self.exponent is None else self.q ** self.exponent

    def __int__(self):
        return self.value

    def __bool__(self):
        return self.exponent is not None

    def __str__(self):
        return "0" if self.exponent is None else f"{self.q}^{self.exponent}"


@dataclass(frozen=True)
class StageSystem:
    """Equations E_0..E_n after substituting every determined a_{l+1}.

    ``rows`` are the constraint rows as affine forms over the free generators
    a_{free_indices[0]}, a_{free_indices[1]}, ...: coefficient codes followed by
    the constant term.  ``expressions[j]`` is a_j written the same way.
    """

    field: FieldSpec
    x: tuple[int, ...]
    y: tuple[int, ...]
    free_indices: tuple[int, ...]
    rows: tuple[tuple[int, ...], ...]
    expressions: tuple[tuple[int, ...], ...]

    @property
    def n(self) -> int:
        return len(self.x) - 1

    def count(self) -> SolutionCount:
        exponent = solve_affine(self.rows, len(self.free_indices), self.field)
        return SolutionCount(self.field.q, exponent)


def build_stage_system(x, y, field: FieldSpec | None = None) -> StageSystem:
    field = _field_of(x, y, field)
    xs, ys = _codes(x, field), _codes(y, field)
    if len(xs) != len(ys) or not xs:
        raise ValueError(f"coefficient vectors must have equal positive length, got {len(xs)} and {len(ys)}")
    n = len(xs) - 1
    add, mul = field.add, field.mul
    free = tuple(i for i in range(n + 1) if is_free_index(i))
    width = len(free) + 1

    def generator(g):
        e = [0] * width
        e[g] = 1
        return tuple(e)

    exprs = [generator(0)]
    rows = []
    for l in range(n + 1):
        acc = [0] * width
        acc[-1] = ys[l]
        for i in range(l + 1):
            c = xs[l - i]
            if c:
                for col, v in enumerate(exprs[i]):
                    if v:
                        acc[col] = add(acc[col], mul(c, v))
        if is_star_index(l):
            rows.append(tuple(acc))
            if l + 1 <= n:
                exprs.append(generator(free.index(l + 1)))
        elif l + 1 <= n:
            exprs.append(tuple(acc))
        # otherwise E_n only defines a_{n+1}, outside the tuple
    return StageSystem(field, xs, ys, free, tuple(rows), tuple(exprs))


def solve_affine(rows, ncols: int, field: FieldSpec) -> int | None:
    """Solution-space dimension of ``row[:-1] . g + row[-1] = 0``, or None if inconsistent."""
    add, mul, neg, inv = field.add, field.mul, field.neg, field.inv
    pivots: dict[int, list[int]] = {}
    for row in rows:
        r = list(row)
        for col, prow in pivots.items():
            if r[col]:
                f = neg(r[col])
                r = [add(a, mul(f, b)) for a, b in zip(r, prow)]
        lead = next((c for c in range(ncols) if r[c]), None)
        if lead is None:
            if r[-1]:
                return None
            continue
        s = inv(r[lead])
        r = [mul(s, a) for a in r]
        for col, prow in pivots.items():
            if prow[lead]:
                f = neg(prow[lead])
                pivots[col] = [add(a, mul(f, b)) for a, b in zip(prow, r)]
        pivots[lead] = r
    return ncols - len(pivots)


def count_solutions_elim(x, y, field: FieldSpec | None = None) -> SolutionCount:
    """s_n(x, y) by substitution plus Gaussian elimination over F_q."""
    return build_stage_system(x, y, field).count()


def naive_count(x, y, field: FieldSpec | None = None, chunk: int = 1 << 16) -> int:
    """Literal count of tuples (a_0..a_n) satisfying every in-tuple equation E_l."""
    field = _field_of(x, y, field)
    xs, ys = _codes(x, field), _codes(y, field)
    if len(xs) != len(ys) or not xs:
        raise ValueError("coefficient vectors must have equal positive length")
    n, q = len(xs) - 1, field.q
    total_tuples = q ** (n + 1)
    if total_tuples > NAIVE_LIMIT:
        raise ValueError(
            f"q^(n+1) = {total_tuples} exceeds the brute-force limit {NAIVE_LIMIT}; "
            "use count_solutions_elim instead")
    fa, fm = field.add_table, field.mul_table
    powers = q ** np.arange(n + 1, dtype=np.int64)
    count = 0
    for start in range(0, total_tuples, chunk):
        idx = np.arange(start, min(start + chunk, total_tuples), dtype=np.int64)
        a = ((idx[:, None] // powers[None, :]) % q).astype(np.int16)
        ok = np.ones(len(idx), dtype=bool)
        for l in range(n + 1):
            if not is_star_index(l) and l + 1 > n:
                continue
            lhs = np.full(len(idx), ys[l], dtype=np.int16)
            for i in range(l + 1):
                lhs = fa[lhs, fm[a[:, i], xs[l - i]]]
            rhs = 0 if is_star_index(l) else a[:, l + 1]
            ok &= lhs == rhs
        count += int(ok.sum())
    return count


def count_solutions_naive(x, y, field: FieldSpec | None = None) -> SolutionCount:
    field = _field_of(x, y, field)
    return SolutionCount.from_count(field.q, naive_count(x, y, field))


def membership_H(x: TruncatedSeries, y: TruncatedSeries) -> bool:
    """(x, y) lies in the projection H_k iff the (k-1)-stage system is solvable."""
    if x.k != y.k:
        raise ValueError("x and y must have equal truncation length")
    return bool(count_solutions_elim(x, y))


# -- vectorised census of H_k ----------------------------------------------------

def effective_length(k: int) -> int:
    """Number of leading coefficients that decide membership in H_k.

    The last constraint row at or below index k - 1 is E_{2^j - 2};
    later rows only determine coefficients of a, so coordinates past index
    2^j - 2 are irrelevant.
    """
    last = max(i for i in range(k) if is_star_index(i))
    return last + 1


def _h_grid_exact(field: FieldSpec, k: int, block: int = 1 << 22) -> np.ndarray:
    q = field.q
    n = k - 1
    size = q ** k
    fa, fm = field.add_table, field.mul_table
    free = [i for i in range(n + 1) if is_free_index(i)]
    idx = np.arange(size, dtype=np.int64)
    digits = [((idx // q ** j) % q).astype(np.int16) for j in range(k)]
    rows_per_block = max(1, block // size)
    out = np.zeros((size, size), dtype=bool)
    for x0 in range(0, size, rows_per_block):
        xsl = slice(x0, min(x0 + rows_per_block, size))
        X = [d[xsl][:, None] for d in digits]
        Y = [d[None, :] for d in digits]
        member = np.zeros((X[0].shape[0], size), dtype=bool)
        for assignment in itertools.product(range(q), repeat=len(free)):
            gen = dict(zip(free, assignment))
            a = [np.int16(gen[0])]
            alive = ~member
            for l in range(n + 1):
                e = Y[l]
                for i in range(l + 1):
                    e = fa[e, fm[a[i], X[l - i]]]
                if is_star_index(l):
                    alive = alive & (e == 0)
                    if not alive.any():
                        break
                    if l + 1 <= n:
                        a.append(np.int16(gen[l + 1]))
                elif l + 1 <= n:
                    a.append(e)
            else:
                member |= alive
        out[xsl] = member
    return out


def h_grid(field: FieldSpec, k: int) -> np.ndarray:
    """Boolean array ``G[x.index, y.index]`` of membership in H_k."""
    size = field.q ** k
    if size * size > GRID_LIMIT:
        raise ValueError(f"q^(2k) = {size * size} exceeds the census limit {GRID_LIMIT}")
    kk = effective_length(k)
    core = _h_grid_exact(field, kk)
    if kk == k:
        return core
    low = np.arange(size, dtype=np.int64) % field.q ** kk
    return core[np.ix_(low, low)]


# -- planar sets and the assembly of K, K^(n) --------------------------------------

class PlaneSubset:
    """A subset of F_q[[t]]^2 known through its level-k projections."""

    def __init__(self, field: FieldSpec):
        self.field = field

    def contains(self, x: TruncatedSeries, y: TruncatedSeries) -> bool:
        raise NotImplementedError

    def grid(self, k: int) -> np.ndarray:
        """Membership of the level-k projection, indexed by element indices."""
        size = self.field.q ** k
        if size * size > GRID_LIMIT:
            raise ValueError(f"q^(2k) = {size * size} exceeds the census limit {GRID_LIMIT}")
        pts = [TruncatedSeries.from_index(self.field, k, i) for i in range(size)]
        return np.array([[self.contains(x, y) for y in pts] for x in pts], dtype=bool)

    def count(self, k: int) -> int:
        return int(self.grid(k).sum())

    def __call__(self, x, y) -> bool:
        return self.contains(x, y)


class HSet(PlaneSubset):
    def contains(self, x, y):
        return membership_H(x, y)

    def grid(self, k):
        return h_grid(self.field, k)


class KSet(PlaneSubset):
    """``{(x, y) : (x, y) in H or (y, x) in H}``."""

    def __init__(self, base: PlaneSubset | Callable):
        if not isinstance(base, PlaneSubset):
            raise TypeError("KSet needs a PlaneSubset; use assemble_K for bare callables")
        super().__init__(base.field)
        self.base = base

    def contains(self, x, y):
        return self.base.contains(x, y) or self.base.contains(y, x)

    def grid(self, k):
        g = self.base.grid(k)
        return g | g.T


class FullPlane(PlaneSubset):
    def contains(self, x, y):
        return True

    def grid(self, k):
        size = self.field.q ** k
        return np.ones((size, size), dtype=bool)


class LineSubset(PlaneSubset):
    """The line y = c x + d, with c, d given as coefficient sequences of F_q[[t]]."""

    def __init__(self, field: FieldSpec, slope: Sequence[int], intercept: Sequence[int]):
        super().__init__(field)
        self.slope, self.intercept = tuple(slope), tuple(intercept)

    def _at(self, coeffs, k):
        return TruncatedSeries(self.field, tuple((list(coeffs) + [0] * k)[:k]))

    def contains(self, x, y):
        k = x.k
        return y == self._at(self.slope, k) * x + self._at(self.intercept, k)


def assemble_K(h) -> Callable:
    """Membership oracle of K from a membership oracle of H."""
    if isinstance(h, PlaneSubset):
        return KSet(h)
    return lambda x, y: bool(h(x, y) or h(y, x))


def assemble_Kn(n: int, k_oracle: Callable) -> Callable:
    """Membership oracle of K^(n) = K x F_q[[t]]^(n-2)."""
    if n < 2:
        raise ValueError("K^(n) needs n >= 2")

    def member(*coords):
        if len(coords) != n:
            raise ValueError(f"expected {n} coordinates, got {len(coords)}")
        return bool(k_oracle(coords[0], coords[1]))

    return member
