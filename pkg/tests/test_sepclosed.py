from fractions import Fraction
from itertools import islice

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rmcodes.reals import real_from_rational
from rmcodes.sepclosed import (EmptyEnumeration, GapInterval, Inconclusive, NoWitnessAt,
                               SepClosedSet, WitnessedUpTo, complement_gap, dist_bounds, dump_set,
                               load_set, member_search, rational_set, rationals_in)

Q = Fraction
HALF_SET = rational_set((0, Q(1, 2)))


def r(q):
    return real_from_rational(Q(q))


def test_enumeration_order_and_uniqueness():
    got = list(islice(rationals_in([(Q(0), Q(1, 2))]), 8))
    assert got == [0, Q(1, 2), Q(1, 3), Q(1, 4), Q(1, 5), Q(2, 5), Q(1, 6), Q(1, 7)]
    many = list(islice(rationals_in([(Q(0), Q(1))]), 200))
    assert len(many) == len(set(many))
    assert all(0 <= q <= 1 for q in many)


def test_ambient():
    assert HALF_SET.ambient_violations(100) == []
    assert SepClosedSet.from_rationals([Q(1, 2), Q(3, 2)]).ambient_violations(5) == [1]


class TestMember:
    def test_enumerated_point(self):
        out = member_search(r(Q(1, 4)), HALF_SET, 5, 1000)
        assert isinstance(out, WitnessedUpTo) and out.K == 5

    def test_distance_exactly_quarter(self):
        assert member_search(r(Q(3, 4)), HALF_SET, 2, 500) == NoWitnessAt(2, 500)

    def test_zero_and_powers(self):
        S = SepClosedSet.from_generator(iter([Q(0)] + [Q(1, 2 ** n) for n in range(40)]))
        assert isinstance(member_search(r(0), S, 6, 100), WitnessedUpTo)

    @settings(max_examples=40, deadline=None)
    @given(st.fractions(0, 1, max_denominator=40), st.integers(0, 6))
    def test_soundness(self, q, K):
        x = r(q)
        out = member_search(x, HALF_SET, K, 400)
        if isinstance(out, WitnessedUpTo):
            for k, n in enumerate(out.witnesses):
                xn = HALF_SET.point(n)
                p = k + 3
                assert abs(x.approx(p) - xn.approx(p)) < Q(1, 2 ** k) + Q(1, 2 ** (k + 2))
        else:
            # brute force: nothing among the scanned points is that close
            assert all(abs(q - xn.approx(0)) >= Q(1, 2 ** out.k) - Q(1, 2 ** (out.k + 2))
                       for _, xn in HALF_SET.head(400))

    @settings(max_examples=30, deadline=None)
    @given(st.fractions(0, 1, max_denominator=30), st.integers(0, 5), st.integers(1, 200))
    def test_monotone_in_fuel(self, q, K, t):
        x = r(q)
        if isinstance(member_search(x, HALF_SET, K, t), WitnessedUpTo):
            assert isinstance(member_search(x, HALF_SET, K, t + 50), WitnessedUpTo)


class TestDist:
    def test_not_exhaustive(self):
        lo, hi = dist_bounds(r(Q(3, 4)), HALF_SET, 200)
        assert lo == 0
        assert Q(1, 4) <= hi <= Q(1, 4) + Q(1, 2 ** 8)

    def test_enumerated_point_upper_shrinks(self):
        _, hi_small = dist_bounds(r(Q(1, 3)), HALF_SET, 2)
        _, hi_big = dist_bounds(r(Q(1, 3)), HALF_SET, 10)
        assert hi_big < hi_small and hi_big <= Q(1, 2 ** 8)

    def test_exhaustive_single_point(self):
        S = SepClosedSet.from_rationals([Q(1, 2)], exhaustive=True)
        assert dist_bounds(r(0), S, 10) == (Q(1, 2) - Q(1, 256), Q(1, 2) + Q(1, 256))

    def test_empty(self):
        with pytest.raises(EmptyEnumeration):
            dist_bounds(r(0), SepClosedSet.from_rationals([]), 10)

    def test_exhaustive_needs_finite(self):
        with pytest.raises(ValueError):
            SepClosedSet(lambda n: r(0), exhaustive=True)


class TestGap:
    two = rational_set((0, Q(1, 3)), (Q(2, 3), 1))

    def test_two_intervals(self):
        out = complement_gap(r(Q(1, 2)), self.two, 4, 300)
        assert isinstance(out, GapInterval)
        assert abs(out.c - Q(1, 3)) <= Q(1, 16) and abs(out.d - Q(2, 3)) <= Q(1, 16)
        assert out.c < Q(1, 2) < out.d

    def test_inside(self):
        assert isinstance(complement_gap(r(Q(1, 4)), self.two, 4, 300), Inconclusive)

    def test_empty_prefix(self):
        out = complement_gap(r(Q(1, 2)), SepClosedSet.from_rationals([]), 4, 10)
        assert (out.c, out.d) == (0, 1)

    @settings(max_examples=40, deadline=None)
    @given(st.lists(st.fractions(0, 1, max_denominator=20), max_size=10),
           st.fractions(0, 1, max_denominator=64), st.integers(0, 6))
    def test_soundness(self, pts, q, k):
        S = SepClosedSet.from_rationals(pts)
        out = complement_gap(r(q), S, k, 100)
        if isinstance(out, GapInterval):
            assert out.c < q < out.d
            eps = Q(1, 2 ** k)
            assert not any(out.c + eps < p < out.d - eps for p in pts)
            assert not any(out.c < p < out.d for p in pts)


def test_file_round_trip():
    S = load_set("exhaustive\n# pts\n0\n1/3\n2/3 # tail comment\n")
    assert S.exhaustive and S.size == 3
    T = load_set(dump_set(S, 10))
    assert T.exhaustive and [x.approx(0) for _, x in T.head(10)] == [0, Q(1, 3), Q(2, 3)]
    with pytest.raises(ValueError, match="line 2"):
        load_set("0\nabc\n")
