import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kakeya.besicovitch import (FullPlane, HSet, KSet, SolutionCount, StarIndexSet, assemble_K,
                                assemble_Kn, build_stage_system, count_solutions_elim,
                                count_solutions_naive, effective_length, h_grid,
                                h_line_for_direction, is_star_index, line_points, membership_H,
                                naive_count, star)
from kakeya.field import gf, gf_q
from kakeya.ring import RingSpec, TruncatedSeries, enumerate_directions


def series(q, coeffs):
    return TruncatedSeries.of(gf_q(q), coeffs)


def test_star_index_set():
    s = StarIndexSet(20)
    assert s.indices == (0, 2, 6, 14)
    assert all((i in s) == (((i + 2) & (i + 1)) == 0) for i in range(21))
    assert 30 not in s
    assert is_star_index(30)


def test_star_examples():
    assert star(series(2, [1] * 8)) == series(2, [0, 1, 0, 1, 1, 1, 0])
    assert star(series(3, [0, 1, 2, 1])) == series(3, [0, 2, 0])
    assert star(TruncatedSeries.zero(gf(5), 6)) == TruncatedSeries.zero(gf(5), 5)
    with pytest.raises(ValueError, match="truncation too short"):
        star(series(2, [1]))


@settings(max_examples=200)
@given(st.sampled_from([2, 3, 4, 5, 9]), st.integers(2, 20), st.data())
def test_star_is_linear(q, k, data):
    f = gf_q(q)
    coeffs = st.lists(st.integers(0, q - 1), min_size=k, max_size=k)
    a = TruncatedSeries(f, tuple(data.draw(coeffs)))
    b = TruncatedSeries(f, tuple(data.draw(coeffs)))
    c = data.draw(st.integers(0, q - 1))
    assert star(a + b) == star(a) + star(b)
    assert star(a.scale(c)) == star(a).scale(c)


def test_line_points_examples():
    f2 = RingSpec.series(2, 1)
    o, one = f2.element(0), f2.element(1)
    assert line_points((o, o), (one, one), f2) == {(o, o), (one, one)}
    z4 = RingSpec.padic(2, 2)
    e = z4.element
    assert line_points((e(0), e(1)), (e(1), e(0)), z4) == {(e(i), e(1)) for i in range(4)}
    collapsed = line_points((e(0), e(0)), (e(2), e(0)), z4)
    assert collapsed == {(e(0), e(0)), (e(2), e(0))}
    with pytest.raises(ValueError):
        line_points((e(0), e(0)), (e(0), e(0)), z4)


def test_h_line_examples():
    f = gf(2)
    base, direction = h_line_for_direction(TruncatedSeries.zero(f, 4))
    assert base == (TruncatedSeries.zero(f, 3),) * 2
    assert direction == (series(2, [1, 0, 0]), TruncatedSeries.zero(f, 3))
    base, direction = h_line_for_direction(series(2, [1, 1, 1, 1]))
    assert base == (TruncatedSeries.zero(f, 3), series(2, [0, 1, 0]))
    assert direction == (series(2, [1, 0, 0]), series(2, [1, 1, 1]))


@pytest.mark.parametrize("q,k", [(2, 8), (3, 16), (4, 10), (5, 9), (9, 6)])
def test_h_lines_lie_in_h(q, k):
    f = gf_q(q)
    rng = random.Random(q * k)
    for _ in range(60):
        b = TruncatedSeries(f, tuple(rng.randrange(q) for _ in range(k + 1)))
        s = TruncatedSeries(f, tuple(rng.randrange(q) for _ in range(k)))
        (x0, y0), (d1, d2) = h_line_for_direction(b)
        assert membership_H(x0 + s * d1, y0 + s * d2)


# -- solution counts ----------------------------------------------------------------

@pytest.mark.parametrize("x,y,expected", [([1], [0], 1), ([0], [1], 0), ([0], [0], 2)])
def test_stage_zero_examples(x, y, expected):
    f = gf(2)
    assert count_solutions_elim(x, y, f).value == expected
    assert count_solutions_naive(x, y, f).value == expected


def test_stage_system_shape():
    f = gf(3)
    sys_ = build_stage_system([1, 2, 0, 1, 1, 2, 0], [0, 1, 1, 2, 0, 0, 1], f)
    assert sys_.free_indices == (0, 1, 3)
    assert len(sys_.rows) == 3  # E_0, E_2, E_6
    assert len(sys_.expressions) == 7


def test_length_mismatch():
    with pytest.raises(ValueError):
        count_solutions_elim([0, 1], [1], gf(2))


@pytest.mark.parametrize("n", range(6))
def test_elim_matches_naive_exhaustive_q2(n):
    f = gf(2)
    for idx in range(4 ** (n + 1)):
        d = [(idx >> j) & 1 for j in range(2 * (n + 1))]
        x, y = d[: n + 1], d[n + 1:]
        raw = naive_count(x, y, f)
        assert SolutionCount.from_count(2, raw) == count_solutions_elim(x, y, f)


@pytest.mark.parametrize("q,n,trials", [(3, 2, 1000), (3, 4, 200), (4, 3, 200), (5, 2, 300),
                                        (2, 9, 100), (9, 2, 100), (8, 3, 50)])
def test_elim_matches_naive_random(q, n, trials):
    f = gf_q(q)
    rng = random.Random(7 * q + n)
    for _ in range(trials):
        x = [rng.randrange(q) for _ in range(n + 1)]
        y = [rng.randrange(q) for _ in range(n + 1)]
        assert count_solutions_naive(x, y, f) == count_solutions_elim(x, y, f)


def test_naive_guard():
    with pytest.raises(ValueError, match="elim"):
        naive_count([0] * 25, [0] * 25, gf(2))


@pytest.mark.parametrize("j", [1, 2, 3])
def test_exponent_bound_at_star_stages(j):
    f = gf(2)
    n = 2 ** j - 2
    for idx in range(4 ** (n + 1)):
        d = [(idx >> b) & 1 for b in range(2 * (n + 1))]
        s = count_solutions_elim(d[: n + 1], d[n + 1:], f)
        assert s.exponent is None or s.exponent <= j


def test_vanishing_is_monotone():
    f = gf(2)
    for idx in range(4 ** 3):
        d = [(idx >> b) & 1 for b in range(6)]
        x, y = d[:3], d[3:]
        if count_solutions_elim(x, y, f):
            continue
        for ext in itertools.product(range(2), repeat=8):
            xe, ye = x + list(ext[:4]), y + list(ext[4:])
            for m in range(3, 7):
                assert not count_solutions_elim(xe[:m + 1], ye[:m + 1], f)


def test_solution_count_from_count():
    assert SolutionCount.from_count(3, 27).exponent == 3
    assert SolutionCount.from_count(3, 0).value == 0
    with pytest.raises(ValueError):
        SolutionCount.from_count(2, 6)


# -- membership and censuses -------------------------------------------------------------

def test_membership_examples():
    f = gf(2)
    for k in (1, 4, 9):
        z = TruncatedSeries.zero(f, k)
        assert membership_H(z, z)
    assert not membership_H(series(2, [0]), series(2, [1]))


@pytest.mark.parametrize("q,k", [(2, 1), (2, 3), (2, 4), (2, 5), (3, 1), (3, 3), (4, 2), (5, 2)])
def test_grid_matches_pointwise_membership(q, k):
    f = gf_q(q)
    grid = h_grid(f, k)
    pts = [TruncatedSeries.from_index(f, k, i) for i in range(q ** k)]
    for i, x in enumerate(pts):
        for j, y in enumerate(pts):
            assert grid[i, j] == membership_H(x, y)


def test_effective_length():
    assert [effective_length(k) for k in range(1, 17)] == [1, 1, 3, 3, 3, 3, 7, 7, 7, 7, 7, 7, 7, 7, 15, 15]


def test_h7_census_matches_chain():
    from kakeya.markov import evolve
    count = int(h_grid(gf(2), 7).sum())
    assert count == 8032
    assert count == 2 ** 14 * (1 - evolve(2, 3)[-1].dead)


def test_k_contains_every_canonical_direction_q2_k3():
    f = gf(2)
    spec = RingSpec.series(2, 3)
    kset = KSet(HSet(f))
    grid = kset.grid(3)
    els = spec.elements()
    for d1, d2 in enumerate_directions(spec):
        found = False
        for x0, y0 in itertools.product(els, repeat=2):
            if all(grid[(x0 + s * d1).index, (y0 + s * d2).index] for s in els):
                found = True
                break
        assert found, (d1, d2)


def test_k_membership_and_union_bound():
    f = gf(3)
    h = HSet(f)
    k_oracle = assemble_K(h)
    rng = random.Random(1)
    for _ in range(200):
        x = TruncatedSeries(f, tuple(rng.randrange(3) for _ in range(4)))
        y = TruncatedSeries(f, tuple(rng.randrange(3) for _ in range(4)))
        if h(x, y):
            assert k_oracle(y, x)
    for k in range(1, 5):
        assert k_oracle.count(k) <= 2 * h.count(k)
    bare = assemble_K(lambda x, y: membership_H(x, y))
    z, one = TruncatedSeries.zero(f, 2), series(3, [0, 1])
    assert bare(z, one) == k_oracle(z, one)


def test_kn_ignores_extra_coordinates():
    f = gf(2)
    member = assemble_Kn(4, assemble_K(HSet(f)))
    z = TruncatedSeries.zero(f, 3)
    junk = series(2, [1, 1, 1])
    assert member(z, z, junk, junk)
    x, y = series(2, [0]), series(2, [1])
    assert member(x, y, junk, z) == (membership_H(x, y) or membership_H(y, x))
    with pytest.raises(ValueError):
        assemble_Kn(1, member)
    with pytest.raises(ValueError):
        member(z, z)


def test_full_plane_grid():
    assert FullPlane(gf(2)).count(3) == 64
