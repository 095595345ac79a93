from fractions import Fraction

import pytest

from kakeya.markov import (alive_mass_decay, census_counts, census_size, clopper_pearson,
                           cross_validate, evolve, initial_distribution, step_distribution,
                           StateDistribution)


def fraction_chain(q, n):
    """Independent oracle: the chain with plain Fractions and explicit transition rules."""
    dist = {0: Fraction(q - 1, q * q), 1: Fraction(q - 1, q), q: Fraction(1, q * q)}
    out = [dict(dist)]
    for _ in range(n - 1):
        new = {}
        for state, p in dist.items():
            if state == 0:
                moves = {0: Fraction(1)}
            else:
                l = state.bit_length() and next(e for e in range(200) if q ** e == state)
                moves = {0: Fraction(q - 1, q ** (l + 2)), state: 1 - Fraction(1, q ** (l + 1)),
                         state * q: Fraction(1, q ** (l + 2))}
            for target, w in moves.items():
                new[target] = new.get(target, 0) + p * w
        dist = {s: p for s, p in new.items() if p}
        out.append(dict(dist))
    return out


@pytest.mark.parametrize("q,expected", [
    (2, {1: Fraction(1, 2), 2: Fraction(1, 4), 0: Fraction(1, 4)}),
    (3, {1: Fraction(2, 3), 3: Fraction(1, 9), 0: Fraction(2, 9)}),
])
def test_initial_distribution(q, expected):
    assert initial_distribution(q).as_counts() == expected


def test_initial_distribution_sums_to_one():
    for q in range(2, 18):
        assert initial_distribution(q).total() == 1


def _point_mass(q, level):
    alive = [0] * level + [1]
    return StateDistribution(q, 1, 0, 0, tuple(alive))


def test_one_step_from_q0():
    # (q-1)/q^2, 1 - 1/q, 1/q^2 at l = 0
    assert step_distribution(_point_mass(2, 0)).as_counts() == {
        0: Fraction(1, 4), 1: Fraction(1, 2), 2: Fraction(1, 4)}


def test_one_step_from_q1():
    assert step_distribution(_point_mass(2, 1)).as_counts() == {
        0: Fraction(1, 8), 2: Fraction(3, 4), 4: Fraction(1, 8)}


def test_zero_is_absorbing():
    d = StateDistribution(3, 1, 0, 1, (0,))
    assert step_distribution(d).as_counts() == {0: Fraction(1)}


def test_step_preserves_expectation():
    for q in (2, 3, 7):
        for level in range(5):
            d = _point_mass(q, level)
            assert step_distribution(d).expectation() == d.expectation() == q ** level


def test_second_step_by_hand():
    d2 = evolve(2, 2)[1]
    assert d2.as_counts() == {0: Fraction(13, 32), 1: Fraction(1, 4), 2: Fraction(5, 16),
                              4: Fraction(1, 32)}
    assert d2.total() == 1 and d2.expectation() == 1


@pytest.mark.parametrize("q", [2, 3, 4, 5])
def test_matches_fraction_oracle(q):
    ours = evolve(q, 40)
    oracle = fraction_chain(q, 40)
    for d, ref in zip(ours, oracle):
        assert d.as_counts() == ref


def test_martingale_and_support():
    for q in (2, 3, 5):
        for d in evolve(q, 120):
            assert d.total() == 1
            assert d.expectation() == 1
            assert max(d.support) <= d.step


def test_absorption_strictly_increases():
    for q in (2, 3):
        dists = evolve(q, 60)
        assert all(a.dead < b.dead for a, b in zip(dists, dists[1:]))
    d = evolve(3, 50)
    assert d[49].dead > d[9].dead


def test_level_cap_encloses_exact_chain():
    exact = evolve(3, 30)
    capped = evolve(3, 30, max_level=4)
    for e, c in zip(exact, capped):
        assert c.total() == 1
        assert c.alive_mass <= e.alive_mass <= c.alive_mass + c.overflow
        assert c.dead <= e.dead <= c.dead + c.overflow
    with pytest.raises(ValueError):
        capped[-1].expectation()


def test_decay_table():
    rows = alive_mass_decay(3, 100)
    assert rows[0].ratio is None
    assert all(r.alive > 0 for r in rows)
    assert rows[99].alive < rows[9].alive
    assert all(r.dist.overflow == 0 for r in rows[:64])
    assert rows[64].dist.overflow > 0


def test_decay_regression_values():
    rows = alive_mass_decay(3, 20)
    assert rows[0].alive == Fraction(7, 9)
    assert rows[1].alive == Fraction(151, 243)
    assert rows[9].alive == 1 - evolve(3, 10)[-1].dead


@pytest.mark.parametrize("q,n", [(2, 1), (2, 2), (2, 3), (3, 1), (3, 2)])
def test_cross_validation_exact(q, n):
    cv = cross_validate(q, n)
    assert cv.exact and cv.matches
    assert cv.samples == census_size(q, n)


def test_census_partitions_add_up():
    whole = census_counts(2, 2)
    parts = census_counts(2, 2, 0, 20) + census_counts(2, 2, 20, 64)
    assert whole == parts


def test_cross_validation_sampling():
    cv = cross_validate(2, 4, samples=3000, seed=5)
    assert not cv.exact and cv.matches
    with pytest.raises(ValueError, match="samples"):
        cross_validate(2, 4)


def test_clopper_pearson_contains_estimate():
    lo, hi = clopper_pearson(30, 100)
    assert lo < 0.3 < hi
    assert clopper_pearson(0, 10)[0] == 0.0
    assert clopper_pearson(10, 10)[1] == 1.0
