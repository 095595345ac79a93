"""Kakeya sets in R^2 for the finite rings F_q[t]/t^k and Z/p^k.

Points and directions are handled by element index (see :mod:`kakeya.ring`),
so a point is a pair of ints and a planar set is a boolean ``|R| x |R|`` mask.
Translates of a canonical direction are parameterised by an intercept beta:

* direction (1, c):        points (s, c s + beta), i.e. the line alpha x + y = beta with alpha = -c
* direction (a, 1), a in m: points (a s + beta, s), i.e. the line x + alpha y = beta with alpha = -a
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from decimal import Decimal, localcontext
from fractions import Fraction

import numpy as np

from .besicovitch import PlaneSubset
from .ring import RingSpec, direction_indices, index_valuation

KAKEYA_LIMIT = 1 << 10
BRUTE_LIMIT = 1 << 24


@dataclass(frozen=True)
class Line:
    """Translate ``beta`` of the canonical direction ``direction`` (index pair)."""

    direction: tuple[int, int]
    beta: int

    @property
    def slope_form(self) -> bool:
        """True for directions (1, c), i.e. lines alpha x + y = beta."""
        return self.direction[0] == 1

    def alpha(self, spec: RingSpec) -> int:
        t = spec.tables
        c = self.direction[1] if self.slope_form else self.direction[0]
        return int(t.neg[c])

    def coords(self, spec: RingSpec) -> tuple[np.ndarray, np.ndarray]:
        t = spec.tables
        s = np.arange(spec.size)
        if self.slope_form:
            return s, t.add[t.mul[self.direction[1], s], self.beta]
        return t.add[t.mul[self.direction[0], s], self.beta], s

    def flat(self, spec: RingSpec) -> np.ndarray:
        x, y = self.coords(spec)
        return np.unique(x.astype(np.int64) * spec.size + y)


def translate_grid(spec: RingSpec, direction: tuple[int, int]) -> tuple[np.ndarray, np.ndarray]:
    """Coordinates of every translate: arrays of shape (beta, s)."""
    t = spec.tables
    n = spec.size
    s = np.arange(n)[None, :]
    beta = np.arange(n)[:, None]
    d1, d2 = direction
    if d1 == 1:
        return np.broadcast_to(s, (n, n)), t.add[t.mul[d2, s], beta]
    return t.add[t.mul[d1, s], beta], np.broadcast_to(s, (n, n))


def _guard(spec: RingSpec, limit: int = KAKEYA_LIMIT):
    if spec.size > limit:
        raise ValueError(f"|R| = {spec.size} exceeds the enumeration limit {limit}")


@dataclass(eq=False)
class PointSet:
    """Finite subset of R^2 stored as a boolean mask over index pairs."""

    spec: RingSpec
    mask: np.ndarray
    provenance: dict[tuple[int, int], Line] = field(default_factory=dict)

    @classmethod
    def from_points(cls, spec: RingSpec, points, provenance=None) -> PointSet:
        mask = np.zeros((spec.size, spec.size), dtype=bool)
        for x, y in points:
            mask[x, y] = True
        return cls(spec, mask, dict(provenance or {}))

    @classmethod
    def from_lines(cls, spec: RingSpec, lines) -> PointSet:
        mask = np.zeros((spec.size, spec.size), dtype=bool)
        prov = {}
        for line in lines:
            x, y = line.coords(spec)
            mask[x, y] = True
            prov[line.direction] = line
        return cls(spec, mask, prov)

    @classmethod
    def plane(cls, spec: RingSpec) -> PointSet:
        return cls(spec, np.ones((spec.size, spec.size), dtype=bool))

    @property
    def points(self) -> frozenset[tuple[int, int]]:
        return frozenset(zip(*map(lambda a: a.tolist(), np.nonzero(self.mask))))

    def __len__(self):
        return int(self.mask.sum())

    def __eq__(self, other):
        return (isinstance(other, PointSet) and self.spec == other.spec
                and np.array_equal(self.mask, other.mask))

    def check_provenance(self) -> bool:
        return all(self.mask[line.coords(self.spec)].all() for line in self.provenance.values())

    # -- JSON file format -------------------------------------------------

    def _fmt(self, i: int):
        text = self.spec.format_element(self.spec.element(i))
        return int(text) if self.spec.kind == "padic" else text

    def _parse(self, v) -> int:
        return self.spec.parse_element(v).index

    def to_json(self) -> dict:
        xs, ys = np.nonzero(self.mask)
        prov = {}
        for d, line in sorted(self.provenance.items()):
            key = f"{self._fmt(d[0])}|{self._fmt(d[1])}"
            prov[key] = {"form": "ax+y" if line.slope_form else "x+ay",
                         "alpha": self._fmt(line.alpha(self.spec)),
                         "b": self._fmt(line.beta)}
        return {"ring": str(self.spec),
                "points": [[self._fmt(x), self._fmt(y)] for x, y in zip(xs.tolist(), ys.tolist())],
                "provenance": prov}

    @classmethod
    def from_json(cls, data: dict) -> PointSet:
        spec = RingSpec.parse(data["ring"])
        out = cls.from_points(spec, [])
        out.mask[tuple(np.array([[out._parse(x), out._parse(y)] for x, y in data["points"]],
                                 dtype=np.int64).reshape(-1, 2).T)] = True
        for key, entry in data.get("provenance", {}).items():
            d1, d2 = (out._parse(part) for part in key.split("|"))
            line = Line((d1, d2), out._parse(entry["b"]))
            if line.alpha(spec) != out._parse(entry["alpha"]):
                raise ValueError(f"provenance entry {key!r}: alpha does not match direction")
            out.provenance[(d1, d2)] = line
        if not out.check_provenance():
            raise ValueError("provenance lists a line that is not contained in the point set")
        return out


# -- Kakeya verification -------------------------------------------------------

@dataclass
class KakeyaCheck:
    ok: bool
    witnesses: dict[tuple[int, int], Line]
    failing: tuple[int, int] | None = None

    def __bool__(self):
        return self.ok


def is_kakeya(E: PointSet) -> KakeyaCheck:
    """Does E contain a full line in every canonical direction?"""
    spec = E.spec
    _guard(spec)
    witnesses = {}
    for d in direction_indices(spec):
        x, y = translate_grid(spec, d)
        full = E.mask[x, y].all(axis=1)
        hits = np.flatnonzero(full)
        if not len(hits):
            return KakeyaCheck(False, witnesses, d)
        witnesses[d] = Line(d, int(hits[0]))
    return KakeyaCheck(True, witnesses)


# -- intersections ----------------------------------------------------------------

@dataclass
class IntersectionReport:
    spec: RingSpec
    pairs: int
    max_ratio: Fraction
    sizes_exact: bool  # every |L_i cap L_j| is 0 or residue^v
    bound_holds: bool
    sampled_pairs: int = 0


def intersection_bound_check(spec: RingSpec, samples: int = 2000, seed: int = 0) -> IntersectionReport:
    """|L_i cap L_j| <= r^v(alpha_i - alpha_j) over all i < j and all intercepts.

    For lines alpha x + y = b the intersection is {x : (alpha_i - alpha_j) x =
    b_i - b_j}, so its size for every intercept pair is a histogram of
    multiplication by the difference.  A seeded sample of intercept pairs is
    also intersected point by point.
    """
    _guard(spec)
    t = spec.tables
    n, r, k = spec.size, spec.residue, spec.k
    by_diff = {}
    for d in range(n):
        by_diff[d] = np.bincount(t.mul[d], minlength=n)
    max_ratio = Fraction(0)
    sizes_exact = bound_holds = True
    pairs = 0
    for i in range(n):
        diffs = t.sub(i, np.arange(i + 1, n))
        for d in set(diffs.tolist()):
            v = index_valuation(d, r, k)
            cap = r ** v
            hist = by_diff[d]
            observed = set(hist.tolist()) - {0}
            sizes_exact &= observed <= {cap}
            bound_holds &= max(observed) <= cap
            max_ratio = max(max_ratio, Fraction(int(hist.max()), cap))
        pairs += n - i - 1
    rng = random.Random(seed)
    for _ in range(samples if n > 1 else 0):
        i, j = rng.sample(range(n), 2)
        bi, bj = rng.randrange(n), rng.randrange(n)
        li = set(Line((1, int(t.neg[i])), bi).flat(spec).tolist())
        lj = set(Line((1, int(t.neg[j])), bj).flat(spec).tolist())
        bound_holds &= len(li & lj) <= r ** index_valuation(int(t.sub(i, j)), r, k)
    return IntersectionReport(spec, pairs, max_ratio, sizes_exact, bound_holds, samples if n > 1 else 0)


# -- f(u) -------------------------------------------------------------------------

def f_of_u(u: int, r: int, k: int | None = None) -> int:
    """sum_{i=1}^u r^v(alpha_i), v = trailing base-r zeros of i (capped at k), by direct summation."""
    if u < 1:
        raise ValueError("u must be >= 1")
    cap = math.inf if k is None else k
    return sum(r ** index_valuation(i, r, cap) for i in range(1, u + 1))


def f_closed_form(u: int, r: int, k: int | None = None) -> int:
    """Same quantity grouped by valuation: sum_w (r^w - r^(w-1)) floor(u / r^w)."""
    if u < 1:
        raise ValueError("u must be >= 1")
    total, w = u, 1
    while r ** w <= u and (k is None or w <= k):
        total += (r ** w - r ** (w - 1)) * (u // r ** w)
        w += 1
    return total


def f_prefix(u_max: int, r: int) -> list[int]:
    """[f(0), f(1), ..., f(u_max)] (uncapped), built incrementally."""
    out = [0] * (u_max + 1)
    for i in range(1, u_max + 1):
        v, j = 0, i
        while j % r == 0:
            j //= r
            v += 1
        out[i] = out[i - 1] + r ** v
    return out


def ceil_log(u: int, r: int) -> int:
    """Smallest e >= 0 with r^e >= u, in exact integers."""
    e, power = 0, 1
    while power < u:
        power *= r
        e += 1
    return e


def log_bound(u: int, r: int) -> int:
    return u * ceil_log(u, r)


# -- union lower bound ---------------------------------------------------------------

@dataclass
class LedgerRow:
    j: int
    alpha: int
    beta: int
    size: int
    intersections: int
    f_prev: int


@dataclass
class BoundReport:
    spec: RingSpec
    size_E: int
    union: int
    inclusion_exclusion: int
    analytic: int
    bound: Fraction
    rows: list[LedgerRow]

    @property
    def satisfied(self) -> bool:
        return self.size_E >= self.bound

    @property
    def ordered(self) -> bool:
        return self.size_E >= self.union >= self.inclusion_exclusion >= self.analytic >= self.bound

    def to_json(self) -> dict:
        return {"ring": str(self.spec), "size_E": self.size_E, "union": self.union,
                "inclusion_exclusion": self.inclusion_exclusion, "analytic": self.analytic,
                "bound": str(self.bound), "satisfied": self.satisfied, "ordered": self.ordered,
                "ledger": [vars(row) for row in self.rows]}

    def table(self) -> str:
        lines = [f"ring {self.spec}: |E| = {self.size_E}",
                 f"  |union L_j|            = {self.union}",
                 f"  inclusion-exclusion    = {self.inclusion_exclusion}",
                 f"  sum(|R| - f(j-1))      = {self.analytic}",
                 f"  |R|^2 / 2k             = {self.bound}",
                 f"  ordered = {self.ordered}, satisfied = {self.satisfied}",
                 "  j  alpha  b  |L_j|  sum|L_i^L_j|  f(j-1)"]
        lines += [f"  {r.j}  {r.alpha}  {r.beta}  {r.size}  {r.intersections}  {r.f_prev}" for r in self.rows]
        return "\n".join(lines)


def lower_bound_ledger(E: PointSet) -> BoundReport:
    """Inclusion-exclusion over the lines alpha_i x + y = b_i, i = 0..floor(|R|/k)."""
    spec = E.spec
    _guard(spec)
    t = spec.tables
    n, r, k = spec.size, spec.residue, spec.k
    count = min(n // k + 1, n)
    lines = []
    for i in range(count):
        d = (1, int(t.neg[i]))
        if d not in E.provenance:
            raise ValueError(f"missing provenance for the line with alpha index {i}")
        lines.append(E.provenance[d])
    if not all(E.mask[line.coords(spec)].all() for line in lines):
        raise ValueError("provenance line not contained in E")
    point_sets = [set(line.flat(spec).tolist()) for line in lines]
    rows, ie, analytic = [], 0, 0
    for j, (line, pts) in enumerate(zip(lines, point_sets)):
        inter = sum(len(pts & point_sets[i]) for i in range(j))
        f_prev = f_closed_form(j, r, k) if j else 0
        rows.append(LedgerRow(j + 1, j, line.beta, len(pts), inter, f_prev))
        ie += len(pts) - inter
        analytic += n - f_prev
    union = len(set().union(*point_sets))
    return BoundReport(spec, len(E), union, ie, analytic, Fraction(n * n, 2 * k), rows)


# -- constructions and searches -------------------------------------------------------

def greedy_kakeya(spec: RingSpec, seed: int = 0) -> PointSet:
    """One translate per direction (seeded order), each maximising overlap so far.

    Ties go to the smallest intercept index.
    """
    _guard(spec)
    dirs = direction_indices(spec)
    random.Random(seed).shuffle(dirs)
    mask = np.zeros((spec.size, spec.size), dtype=bool)
    prov = {}
    for d in dirs:
        x, y = translate_grid(spec, d)
        beta = int(np.argmax(mask[x, y].sum(axis=1)))
        mask[x[beta], y[beta]] = True
        prov[d] = Line(d, beta)
    return PointSet(spec, mask, prov)


def minimal_kakeya_bruteforce(spec: RingSpec, first: range | None = None) -> tuple[int, PointSet]:
    """Exact minimum of |union| over one translate per canonical direction.

    Depth-first with branch and bound.  ``first`` restricts the intercepts of
    the first direction, so disjoint ranges partition the search.
    """
    dirs = direction_indices(spec)
    n = spec.size
    combos = n ** len(dirs)
    if combos > BRUTE_LIMIT:
        raise ValueError(f"{n}^{len(dirs)} = {combos} combinations exceed the limit {BRUTE_LIMIT}")
    masks = []
    for d in dirs:
        x, y = translate_grid(spec, d)
        flat = x.astype(np.int64) * n + y
        masks.append([sum(1 << int(p) for p in set(row.tolist())) for row in flat])
    best = [n * n + 1, None]
    choice = [0] * len(dirs)

    def search(depth: int, acc: int):
        size = acc.bit_count()
        if size >= best[0]:
            return
        if depth == len(dirs):
            best[0], best[1] = size, list(choice)
            return
        options = first if (depth == 0 and first is not None) else range(n)
        for beta in options:
            choice[depth] = beta
            search(depth + 1, acc | masks[depth][beta])

    search(0, 0)
    if best[1] is None:
        raise ValueError("empty search partition")
    witness = PointSet.from_lines(spec, [Line(d, b) for d, b in zip(dirs, best[1])])
    return best[0], witness


# -- dimension ---------------------------------------------------------------------

@dataclass(frozen=True)
class MinkowskiBound:
    r: int
    k: int
    value: Decimal

    @property
    def symbolic(self) -> str:
        return f"2 - log_{self.r}({2 * self.k})/{self.k}"

    def holds_for(self, count: int) -> bool:
        """log|E| / log r^k >= 2 - log_r(2k)/k, i.e. 2k |E| >= r^(2k), exactly."""
        return 2 * self.k * count >= self.r ** (2 * self.k)


def minkowski_lower(k: int, r: int, digits: int = 50) -> MinkowskiBound:
    if k < 1:
        raise ValueError("k must be >= 1")
    with localcontext() as ctx:
        ctx.prec = digits
        value = 2 - Decimal(2 * k).ln() / (k * Decimal(r).ln())
    return MinkowskiBound(r, k, value)


@dataclass(frozen=True)
class DimensionRow:
    k: int
    count: int
    dim: float
    bound: MinkowskiBound

    @property
    def above_bound(self) -> bool:
        return self.bound.holds_for(self.count)


def dimension_trace(E: PlaneSubset, k_max: int, k_min: int = 1) -> list[DimensionRow]:
    """Per-level dimension log|E_k| / log q^k of a subset of F_q[[t]]^2."""
    q = E.field.q
    rows = []
    for k in range(k_min, k_max + 1):
        count = E.count(k)
        dim = math.log(count) / (k * math.log(q)) if count else float("-inf")
        rows.append(DimensionRow(k, count, dim, minkowski_lower(k, q)))
    return rows
