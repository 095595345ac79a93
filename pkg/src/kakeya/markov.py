"""Exact evolution of the solution-count chain on {0, q^0, q^1, ...}.

X_n is the law of s_{2^n - 2}(x, y) for Haar-random (x, y).  From state q^l the
chain moves to 0, q^l, q^(l+1) with probabilities (q-1)/q^(l+2),
1 - 1/q^(l+1) and 1/q^(l+2); 0 is absorbing.

Every probability in the chain is an integer over a power of q, so a
distribution is stored as integer numerators over the common denominator
q^scale.  This keeps each step linear in the number of states; reduced
:class:`fractions.Fraction` values are produced on demand.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator

import numpy as np

from .besicovitch import count_solutions_elim
from .field import gf_q

CENSUS_LIMIT = 1 << 22
DECAY_LEVEL_CAP = 64


@dataclass(frozen=True)
class StateDistribution:
    """Law of X_step.  ``alive[l]`` and ``dead`` are numerators over q^scale.

    With a level cap, mass that climbs past ``max_level`` is parked in
    ``overflow`` and no longer evolved; the true alive and dead masses then
    lie within ``overflow`` of the reported ones.
    """

    q: int
    step: int
    scale: int
    dead_num: int
    alive_num: tuple[int, ...]
    overflow_num: int = 0
    max_level: int | None = None

    @property
    def denominator(self) -> int:
        return self.q ** self.scale

    def _frac(self, num: int) -> Fraction:
        return Fraction(num, self.denominator)

    @property
    def dead(self) -> Fraction:
        """P(X_n = 0)."""
        return self._frac(self.dead_num)

    @property
    def alive_mass(self) -> Fraction:
        return self._frac(sum(self.alive_num))

    @property
    def overflow(self) -> Fraction:
        return self._frac(self.overflow_num)

    @property
    def alive_float(self) -> float:
        return sum(self.alive_num) / self.denominator

    @property
    def alive_upper_float(self) -> float:
        """Upper end of the alive-mass enclosure: parked overflow counted as alive."""
        return (sum(self.alive_num) + self.overflow_num) / self.denominator

    def mass(self, level: int) -> Fraction:
        """P(X_n = q^level)."""
        if 0 <= level < len(self.alive_num):
            return self._frac(self.alive_num[level])
        return Fraction(0)

    @property
    def support(self) -> list[int]:
        return [l for l, v in enumerate(self.alive_num) if v]

    def as_counts(self) -> dict[int, Fraction]:
        """Map solution count (0 or q^l) to probability, nonzero entries only."""
        out = {0: self.dead} if self.dead_num else {}
        for l in self.support:
            out[self.q ** l] = self.mass(l)
        return out

    def total(self) -> Fraction:
        return self._frac(self.dead_num + sum(self.alive_num) + self.overflow_num)

    def expectation(self) -> Fraction:
        if self.overflow_num:
            raise ValueError("expectation is not exact once mass has overflowed the level cap")
        return self._frac(sum(v * self.q ** l for l, v in enumerate(self.alive_num)))

    def to_json(self) -> dict:
        return {
            "step": self.step,
            "q": self.q,
            "dead": str(self.dead),
            "alive": {str(self.q ** l): str(self.mass(l)) for l in self.support},
            "overflow": str(self.overflow),
        }


def initial_distribution(q: int, max_level: int | None = None) -> StateDistribution:
    """Law of s_0(x, y) = #{a_0 : a_0 x_0 + y_0 = 0}."""
    if q < 2:
        raise ValueError("q must be >= 2")
    return StateDistribution(q, 1, 2, q - 1, ((q - 1) * q, 1), 0, max_level)


def step_distribution(d: StateDistribution) -> StateDistribution:
    q = d.q
    top = len(d.alive_num) - 1
    shift = top + 2
    new = [0] * (top + 2)
    dead = d.dead_num * q ** shift
    for l, v in enumerate(d.alive_num):
        if not v:
            continue
        rest = shift - l - 2
        new[l] += v * (q ** (l + 1) - 1) * q ** (rest + 1)
        new[l + 1] += v * q ** rest
        dead += v * (q - 1) * q ** rest
    overflow = d.overflow_num * q ** shift
    if d.max_level is not None and len(new) > d.max_level + 1:
        overflow += sum(new[d.max_level + 1:])
        del new[d.max_level + 1:]
    while len(new) > 1 and new[-1] == 0:
        new.pop()
    return StateDistribution(q, d.step + 1, d.scale + shift, dead, tuple(new), overflow, d.max_level)


def trajectory(q: int, max_level: int | None = None) -> Iterator[StateDistribution]:
    d = initial_distribution(q, max_level)
    while True:
        yield d
        d = step_distribution(d)


def evolve(q: int, n_steps: int, max_level: int | None = None) -> list[StateDistribution]:
    """Exact laws of X_1 .. X_{n_steps}."""
    if n_steps < 1:
        raise ValueError("n_steps must be >= 1")
    return list(itertools.islice(trajectory(q, max_level), n_steps))


@dataclass(frozen=True)
class DecayRow:
    n: int
    dist: StateDistribution = field(repr=False)

    @property
    def alive(self) -> Fraction:
        return self.dist.alive_mass

    @property
    def alive_float(self) -> float:
        return self.dist.alive_float

    @property
    def ratio(self) -> float | None:
        """alive(n) * n / ln(n); undefined at n = 1."""
        if self.n < 2:
            return None
        return self.alive_float * self.n / math.log(self.n)


def alive_mass_decay(q: int, n_max: int, max_level: int | None = DECAY_LEVEL_CAP) -> list[DecayRow]:
    """Alive mass 1 - P(X_n = 0) and its ln(n)/n-normalised ratio for n <= n_max.

    The default level cap keeps the cost linear in n; the parked mass is
    below q^-2000 by n = 1000 and is reported per row.
    """
    return [DecayRow(d.step, d) for d in itertools.islice(trajectory(q, max_level), n_max)]


# -- census ---------------------------------------------------------------------

def census_size(q: int, n: int) -> int:
    return q ** (2 * (2 ** n - 1))


def census_counts(q: int, n: int, start: int = 0, stop: int | None = None) -> Counter:
    """Tally of s_{2^n-2} over coefficient tuples with flat index in [start, stop).

    Tuples are indexed by the base-q digits x_0..x_L, y_0..y_L (L = 2^n - 2),
    so disjoint ranges can be tallied independently and added.
    """
    field = gf_q(q)
    length = 2 ** n - 1
    total = census_size(q, n)
    stop = total if stop is None else min(stop, total)
    tally: Counter = Counter()
    for idx in range(start, stop):
        digits = [(idx // q ** j) % q for j in range(2 * length)]
        tally[count_solutions_elim(digits[:length], digits[length:], field).value] += 1
    return tally


@dataclass(frozen=True)
class CrossValidation:
    q: int
    n: int
    exact: bool
    samples: int
    census: dict[int, Fraction]
    chain: dict[int, Fraction]
    intervals: dict[int, tuple[float, float]] = field(default_factory=dict)

    @property
    def states(self) -> list[int]:
        return sorted(set(self.census) | set(self.chain))

    @property
    def matches(self) -> bool:
        if self.exact:
            return self.census == self.chain
        return all(lo <= float(self.chain.get(s, 0)) <= hi for s, (lo, hi) in self.intervals.items()) \
            and set(self.census) <= set(self.chain)


def clopper_pearson(successes: int, trials: int, confidence: float = 0.999) -> tuple[float, float]:
    from scipy.stats import beta

    alpha = 1 - confidence
    lo = 0.0 if successes == 0 else float(beta.ppf(alpha / 2, successes, trials - successes + 1))
    hi = 1.0 if successes == trials else float(beta.ppf(1 - alpha / 2, successes + 1, trials - successes))
    return lo, hi


def cross_validate(q: int, n: int, samples: int | None = None, seed: int = 0,
                   confidence: float = 0.999) -> CrossValidation:
    """Compare the chain's law of X_n with the census of s_{2^n-2}.

    Exhaustive (exact rational equality) unless ``samples`` is given, in which
    case uniformly drawn tuples yield Clopper-Pearson intervals.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    chain = evolve(q, n)[-1].as_counts()
    total = census_size(q, n)
    if samples is None:
        if total > CENSUS_LIMIT:
            raise ValueError(
                f"exhaustive census needs {total} tuples (limit {CENSUS_LIMIT}); pass samples=")
        tally = census_counts(q, n)
        census = {s: Fraction(c, total) for s, c in tally.items()}
        return CrossValidation(q, n, True, total, census, chain)
    field_ = gf_q(q)
    length = 2 ** n - 1
    rng = np.random.default_rng(seed)
    tally = Counter()
    for _ in range(samples):
        digits = rng.integers(0, q, size=2 * length).tolist()
        tally[count_solutions_elim(digits[:length], digits[length:], field_).value] += 1
    census = {s: Fraction(c, samples) for s, c in tally.items()}
    states = sorted(set(tally) | set(chain))
    intervals = {s: clopper_pearson(tally.get(s, 0), samples, confidence) for s in states}
    return CrossValidation(q, n, False, samples, census, chain, intervals)
