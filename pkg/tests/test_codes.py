import random
from fractions import Fraction

import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from rmcodes.builtins import SUITE
from rmcodes.codes import (Associate, Modulus, NbhdCode, Quad, code_from_modulus, dump_associate,
                           dump_nbhd_code, eval_assoc, eval_code, extract_modulus,
                           load_associate, load_nbhd_code, modulus_from_code, totality_report)
from rmcodes.outcomes import Inconsistent, NeedFuel, Value
from rmcodes.reals import real_from_rational
from rmcodes.sequences import BaireSeq, BinSeq

Q = Fraction


class TestModulus:
    def test_shapes(self):
        assert Modulus.shifted(2)(5) == 7
        assert Modulus.constant(3)(100) == 3
        assert Modulus.shifted(0).is_monotone(20)
        assert not Modulus(lambda k: 5 - k).is_monotone(5)

    def test_negative_values_rejected(self):
        with pytest.raises(ValueError):
            Modulus(lambda k: -1)(0)


class TestAssociate:
    alpha = Associate({(): 0, (0,): 3, (1,): 5})

    def test_examples(self):
        assert eval_assoc(self.alpha, BinSeq.from_list([]), 2) == Value(2, 1)
        assert eval_assoc(self.alpha, BinSeq.from_list([], tail=1), 2) == Value(4, 1)
        assert eval_assoc(Associate({}), BaireSeq(lambda n: n), 10) == NeedFuel(10)

    def test_inconsistent(self):
        alpha = Associate({(0,): 1, (0, 0): 2})
        out = eval_assoc(alpha, BinSeq.from_list([]), 5)
        assert isinstance(out, Inconsistent)
        assert alpha.violations() == [((0,), (0, 0))]

    def test_repeat_is_consistent(self):
        alpha = Associate({(0,): 1, (0, 0): 1})
        assert alpha.violations() == []
        assert eval_assoc(alpha, BinSeq.from_list([]), 5) == Value(0, 1)

    @given(st.dictionaries(st.lists(st.integers(0, 2), max_size=4).map(tuple), st.integers(0, 3),
                           max_size=8),
           st.lists(st.integers(0, 2), max_size=6), st.integers(0, 6))
    def test_monotone_in_fuel(self, table, seq, t):
        alpha = Associate(table)
        assume(not alpha.violations())
        f = BaireSeq.from_list(seq)
        first = eval_assoc(alpha, f, t)
        if isinstance(first, Value):
            assert all(eval_assoc(alpha, f, t2) == first for t2 in range(t, t + 4))

    def test_text_round_trip(self):
        text = dump_associate(self.alpha)
        assert load_associate(text).table == self.alpha.table
        with pytest.raises(ValueError, match="line 1"):
            load_associate("[0] -1")
        with pytest.raises(ValueError, match="line 2"):
            load_associate("[] 0\n[0 1\n")


class TestNbhdCode:
    def test_single_quad(self):
        code = NbhdCode([Quad(Q(1, 2), Q(1), Q(7), Q(1, 8))])
        assert eval_code(code, real_from_rational(Q(1, 2)), 3, 1) == Value(Q(7), 3)

    def test_empty(self):
        assert isinstance(eval_code(NbhdCode([]), real_from_rational(0), 2, 10), NeedFuel)

    def test_quad_validation(self):
        with pytest.raises(ValueError):
            Quad(Q(0), Q(0), Q(0), Q(1))
        with pytest.raises(ValueError):
            Quad(Q(0), Q(1), Q(0), Q(-1))

    def test_identity_round_trip_example(self):
        code = code_from_modulus(lambda q: real_from_rational(q), Modulus.shifted(0), 6)
        out = eval_code(code, real_from_rational(Q(1, 3)), 4)
        assert isinstance(out, Value)
        assert abs(out.payload - Q(1, 3)) <= Q(1, 16) + Q(1, 64)

    def test_grid_at_level_two(self):
        code = code_from_modulus(lambda q: real_from_rational(q), Modulus.shifted(0), 2)
        level2 = [q for q in code.head() if q.s == Q(1, 4)]
        assert [q.a for q in level2] == [Q(i, 16) for i in range(17)]
        assert all(q.r == Q(1, 16) for q in level2)

    def test_constant_function(self):
        code = code_from_modulus(lambda q: real_from_rational(Q(1, 2)), Modulus.constant(0), 3)
        assert {q.b for q in code.head()} == {Q(1, 2)}

    def test_one_minus_example(self):
        code = code_from_modulus(lambda q: real_from_rational(1 - q), Modulus.shifted(0), 5)
        out = eval_code(code, real_from_rational(Q(1, 4)), 3)
        assert abs(out.payload - Q(3, 4)) <= Q(1, 8) + Q(1, 32)

    def test_mutation_is_flagged(self):
        base = list(code_from_modulus(lambda q: real_from_rational(q), Modulus.shifted(0), 3).head())
        x = real_from_rational(Q(1, 2))
        for i, q in enumerate(base):
            if q.s <= Q(1, 8) and abs(q.a - Q(1, 2)) < q.r / 2:
                bad = base[:]
                bad.insert(i, Quad(q.a, q.r, q.b + 5, q.s))
                out = eval_code(NbhdCode(bad), x, 3)
                assert isinstance(out, Inconsistent)
                break
        else:
            pytest.fail("no covering quadruple found")

    @pytest.mark.parametrize("name", list(SUITE))
    def test_round_trip_underhead(self, name):
        fn = SUITE[name]
        code = code_from_modulus(fn.on_rational, fn.modulus, 6)
        for k in range(7):
            for i in range(65):
                x = Q(i, 64)
                out = eval_code(code, real_from_rational(x), k)
                assert isinstance(out, Value)
                assert abs(out.payload - fn.exact(x)) <= Q(2, 2 ** k)

    @pytest.mark.parametrize("name", list(SUITE))
    def test_round_trip_overhead(self, name):
        fn = SUITE[name]
        code = code_from_modulus(fn.on_rational, fn.modulus, 7)
        rng = random.Random(name)
        for k in range(5):
            w = modulus_from_code(code, k)
            assert isinstance(w, int)
            for _ in range(400):
                x = Q(rng.randrange(2 ** 12 + 1), 2 ** 12)
                y = x + Q(rng.randrange(-2 ** 12, 2 ** 12), 2 ** (12 + w))
                if not 0 <= y <= 1 or abs(x - y) >= Q(1, 2 ** w):
                    continue
                assert abs(fn.exact(x) - fn.exact(y)) < Q(1, 2 ** k)

    def test_modulus_examples(self):
        one_ball = NbhdCode([Quad(Q(1, 2), Q(2), Q(3), Q(1, 8))])
        assert modulus_from_code(one_ball, 2) == 0
        assert isinstance(modulus_from_code(NbhdCode([]), 2), NeedFuel)
        m = extract_modulus(code_from_modulus(SUITE["identity"].on_rational, Modulus.shifted(0), 5))
        assert m(2) >= 2
        with pytest.raises(LookupError):
            extract_modulus(NbhdCode([]))(0)

    def test_totality(self):
        code = code_from_modulus(SUITE["abs-half"].on_rational, Modulus.shifted(0), 4)
        r = totality_report(code, 3, 4)
        assert r.fraction == 1 and not r.uncovered
        partial = totality_report(NbhdCode([Quad(Q(1, 4), Q(1, 4), Q(0), Q(1, 8))]), 3, 2)
        assert Q(3, 4) in partial.uncovered
        empty = totality_report(NbhdCode([]), 3, 2)
        assert empty.fraction == 0

    def test_text_round_trip(self):
        code = code_from_modulus(SUITE["one-minus"].on_rational, Modulus.shifted(0), 2)
        text = dump_nbhd_code(code)
        back = load_nbhd_code("# comment\n" + text)
        assert list(back.head()) == list(code.head())
        with pytest.raises(ValueError, match="line 1"):
            load_nbhd_code("1/2 1/2 0")

    @pytest.mark.parametrize("name", list(SUITE))
    def test_pairwise_consistency(self, name):
        fn = SUITE[name]
        code = code_from_modulus(fn.on_rational, fn.modulus, 3)
        assert code.inconsistencies() == []
