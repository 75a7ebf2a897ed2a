from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rmcodes.reals import (Apart, IndistinguishableAt, RealCode, abs_, add, approx, ceil_log2,
                           eq_upto, format_rational, format_snapshot, hat_normalize,
                           is_fast_cauchy_upto, mul, neg, parse_rational, parse_snapshot,
                           real_from_rational, rmax, rmin)
from rmcodes.sequences import BinSeq, embed_real

rationals = st.fractions(min_value=-20, max_value=20, max_denominator=50)


def brute_fast_cauchy(x: RealCode, bound: int = 20) -> bool:
    qs = [x.approx(k) for k in range(bound + 1)]
    return all(abs(qs[n] - qs[n + i]) < Fraction(1, 2 ** n)
               for n in range(bound + 1) for i in range(bound + 1 - n))


bits = st.lists(st.integers(0, 1), max_size=24)


@st.composite
def codes(draw, depth=2):
    kind = draw(st.sampled_from(["const", "embed", "sum", "prod", "neg", "abs"] if depth else ["const", "embed"]))
    if kind == "const":
        return real_from_rational(draw(rationals))
    if kind == "embed":
        return embed_real(BinSeq.from_list(draw(bits), tail=draw(st.integers(0, 1))))
    if kind == "neg":
        return neg(draw(codes(depth - 1)))
    if kind == "abs":
        return abs_(draw(codes(depth - 1)))
    x, y = draw(codes(depth - 1)), draw(codes(depth - 1))
    return add(x, y) if kind == "sum" else mul(x, y)


class TestRationalText:
    @given(rationals)
    def test_round_trip(self, q):
        assert parse_rational(format_rational(q)) == q

    def test_format_is_reduced(self):
        assert format_rational(Fraction(6, -4)) == "-3/2"
        assert format_rational(Fraction(0)) == "0/1"

    @pytest.mark.parametrize("text", ["1/0", "abc", "1.5", "", "1//2"])
    def test_rejects(self, text):
        with pytest.raises(ValueError):
            parse_rational(text)

    def test_accepts_integers_and_signs(self):
        assert parse_rational("-7/2") == Fraction(-7, 2)
        assert parse_rational(" 4 ") == 4
        assert parse_rational("+2/4") == Fraction(1, 2)


def test_ceil_log2():
    assert [ceil_log2(n) for n in (1, 2, 3, 4, 5, 8, 9)] == [0, 1, 2, 2, 3, 3, 4]


class TestConstruction:
    def test_constants(self):
        assert real_from_rational(Fraction(1, 3)).approx(5) == Fraction(1, 3)
        assert all(real_from_rational(0).approx(k) == 0 for k in range(10))
        assert real_from_rational(Fraction(-7, 2)).approx(0) == Fraction(-7, 2)

    def test_approx_examples(self):
        assert approx(real_from_rational(Fraction(2, 3)), 10) == Fraction(2, 3)
        assert approx(embed_real(BinSeq.periodic([1, 0])), 4) == Fraction(21, 32)
        s = add(real_from_rational(Fraction(1, 3)), real_from_rational(Fraction(1, 6)))
        assert abs(approx(s, 3) - Fraction(1, 2)) < Fraction(1, 8)

    def test_arithmetic_examples(self):
        q = Fraction(1, 4)
        assert add(real_from_rational(q), real_from_rational(q)).approx(5) == Fraction(1, 2)
        x = embed_real(BinSeq.periodic([1, 1, 0]))
        assert all(mul(x, real_from_rational(0)).approx(k) == 0 for k in range(12))
        z = neg(add(x, neg(x)))
        assert all(abs(z.approx(k)) <= Fraction(2, 2 ** k) for k in range(12))

    def test_memoized_values_stable(self):
        calls = []

        def fn(k):
            calls.append(k)
            return Fraction(1, 3)

        x = RealCode(fn)
        assert [x.approx(4), x.approx(4)] == [Fraction(1, 3)] * 2
        assert calls.count(4) == 1

    def test_negative_index_rejected(self):
        with pytest.raises(ValueError):
            real_from_rational(1).approx(-1)


class TestHat:
    def test_constant_unchanged(self):
        x = hat_normalize(lambda k: Fraction(1, 2))
        assert all(x.approx(k) == Fraction(1, 2) for k in range(20))

    def test_geometric_partial_sums_unchanged(self):
        # s_n = sum_{j<=n} 2^-(j+1) = 1 - 2^-(n+1)
        raw = [1 - Fraction(1, 2 ** (n + 1)) for n in range(21)]
        x = hat_normalize(raw)
        assert [x.approx(k) for k in range(21)] == raw

    def test_alternating_frozen(self):
        x = hat_normalize(lambda k: Fraction(k % 2))
        # the pair (0, 1) already violates, so everything freezes at raw(0) = 0
        first_bad = next(n for n in range(20) for i in range(1, 20 - n)
                         if abs(Fraction(n % 2) - Fraction((n + i) % 2)) >= Fraction(1, 2 ** n))
        assert first_bad == 0
        assert [x.approx(k) for k in range(10)] == [0] * 10

    @given(st.lists(rationals, min_size=1, max_size=20))
    def test_always_fast_cauchy_and_idempotent(self, raw):
        x = hat_normalize(raw)
        assert brute_fast_cauchy(x)
        y = hat_normalize(lambda k: x.approx(k))
        assert all(x.approx(k) == y.approx(k) for k in range(21))

    @given(st.lists(rationals, min_size=2, max_size=12))
    def test_agrees_with_valid_prefix(self, raw):
        x = hat_normalize(raw)
        # brute force: longest prefix satisfying the condition among itself
        n = len(raw)
        good = 1
        while good < n and all(abs(raw[a] - raw[b]) < Fraction(1, 2 ** a)
                               for a in range(good + 1) for b in range(a, good + 1)):
            good += 1
        assert [x.approx(k) for k in range(good)] == raw[:good]


class TestInvariants:
    @settings(max_examples=60, deadline=None)
    @given(codes())
    def test_fast_cauchy(self, x):
        assert brute_fast_cauchy(x)
        assert is_fast_cauchy_upto(x.approx, 20)

    @settings(max_examples=40, deadline=None)
    @given(codes(1), codes(1), st.integers(0, 12))
    def test_add_shift(self, x, y, k):
        assert abs(add(x, y).approx(k) - (x.approx(k + 2) + y.approx(k + 2))) <= Fraction(2, 2 ** k)

    @settings(max_examples=40, deadline=None)
    @given(codes(1), codes(1), codes(1), st.integers(0, 8))
    def test_distributivity(self, x, y, z, k):
        lhs = mul(x, add(y, z)).approx(k)
        rhs = add(mul(x, y), mul(x, z)).approx(k)
        assert abs(lhs - rhs) <= Fraction(4, 2 ** k)

    @given(codes(1), codes(1), st.integers(0, 10))
    def test_min_max_bracket(self, x, y, k):
        lo, hi = rmin(x, y).approx(k + 3), rmax(x, y).approx(k + 3)
        assert lo <= hi + Fraction(1, 2 ** k)

    def test_snapshot_round_trip(self):
        x = embed_real(BinSeq.periodic([1, 0, 1]))
        text = format_snapshot(x, 6)
        assert text.splitlines()[0] == "realcode k_max=6"
        y = parse_snapshot(text)
        assert [y.approx(k) for k in range(7)] == [x.approx(k) for k in range(7)]
        assert y.approx(50) == x.approx(6)

    @pytest.mark.parametrize("text", ["", "realcode k_max=1\n0 0\n", "realcode k_max=0\n1 0\n",
                                      "bogus\n0 0\n"])
    def test_snapshot_rejects(self, text):
        with pytest.raises(ValueError):
            parse_snapshot(text)


class TestComparison:
    def test_zero_one(self):
        zero, one = real_from_rational(0), real_from_rational(1)
        assert isinstance(eq_upto(zero, one, 0), IndistinguishableAt)
        assert isinstance(eq_upto(zero, one, 2), IndistinguishableAt)
        out = eq_upto(zero, one, 3)
        assert isinstance(out, Apart) and out.sign < 0 and out.k == 3

    def test_identical_codes(self):
        x = embed_real(BinSeq.periodic([0, 1]))
        assert all(isinstance(eq_upto(x, x, k), IndistinguishableAt) for k in range(16))

    def test_converging_sequence(self):
        # partial sums of 1/4 + 1/16 + ... -> 1/3, each within 2^-(2n+2)
        third = hat_normalize(lambda k: sum(Fraction(1, 4 ** (j + 1)) for j in range(k + 1)))
        c = real_from_rational(Fraction(1, 3))
        assert all(isinstance(eq_upto(c, third, k), IndistinguishableAt) for k in range(11))

    @given(rationals, st.integers(0, 12))
    def test_same_rational_never_apart(self, q, k):
        a = real_from_rational(q)
        b = add(real_from_rational(q / 2), real_from_rational(q / 2))
        c = mul(real_from_rational(q), real_from_rational(1))
        assert isinstance(eq_upto(a, b, k), IndistinguishableAt)
        assert isinstance(eq_upto(a, c, k), IndistinguishableAt)
