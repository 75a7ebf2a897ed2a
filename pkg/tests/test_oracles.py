from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given
from hypothesis import strategies as st

from rmcodes.codes import Associate, Modulus
from rmcodes.oracles import (BothCertified, BranchError, DiscontinuityWitness, ExhaustedAt, Found,
                             Fuel, InD, ModulusViolation, ModulusWitness, NoneAtDepth,
                             NoPathOfLength, NotInD, SurvivesTo, WitnessInvalid, domain_decider,
                             em_dispatch, exists2_search, grilliot_extract, kappa0_search,
                             mu_search, step_surrogate, suslin_depth_check)
from rmcodes.outcomes import NeedFuel
from rmcodes.reals import pow2, real_from_rational
from rmcodes.sequences import BaireSeq, BinSeq, fan_enumerate

Q = Fraction


def brute_zero(f, budget):
    return next((Found(n) for n in range(budget) if f(n) == 0), ExhaustedAt(budget))


class TestFuel:
    def test_accounting(self):
        fuel = Fuel(2)
        assert fuel.spend() and fuel.spend() and not fuel.spend()
        assert fuel.consumed == 2 and fuel.left == 0

    def test_negative(self):
        with pytest.raises(ValueError):
            Fuel(-1)


class TestMu:
    def test_examples(self):
        assert mu_search(BaireSeq.from_list([1, 1, 0], tail=1), 10) == Found(2)
        assert mu_search(BaireSeq.from_list([0]), 10) == Found(0)
        assert mu_search(BaireSeq.from_list([], tail=1), 10) == ExhaustedAt(10)

    def test_exists2_examples(self):
        assert exists2_search(BaireSeq.from_list([5, 0]), 8) == Found(1)
        assert exists2_search(BaireSeq.from_list([], tail=1), 8) == ExhaustedAt(8)
        assert exists2_search(BaireSeq(lambda n: 0 if n == 3 else 1), 8) == Found(3)

    def test_log(self):
        log = []
        mu_search(BaireSeq.from_list([1, 0]), 5, log)
        assert [str(p) for p in log] == ["1 mu f(0) 1", "2 mu f(1) 0"]

    def test_agree_all_supports(self):
        for bits in product((0, 1), repeat=12):
            f = BinSeq.from_list(list(bits), tail=1)
            assert mu_search(f, 12) == exists2_search(f, 12) == brute_zero(f, 12)

    @given(st.lists(st.integers(0, 5), max_size=15), st.integers(0, 20))
    def test_found_is_least(self, seq, budget):
        f = BaireSeq.from_list(seq, tail=1)
        out = mu_search(f, budget)
        assert out == brute_zero(f, budget)
        if isinstance(out, Found):
            assert out.witness <= budget and f(out.witness) == 0


class TestSuslin:
    def test_all_zero(self):
        assert suslin_depth_check(lambda s: 0, 4) == SurvivesTo(4, (0, 0, 0, 0))

    def test_nothing_nonempty(self):
        assert suslin_depth_check(lambda s: 0 if not s else 1, 3) == NoPathOfLength(1)

    def test_identity_prefixes(self):
        out = suslin_depth_check(lambda s: 0 if s == tuple(range(len(s))) else 1, 3)
        assert out == SurvivesTo(3, (0, 1, 2))


class TestKappa0:
    def test_examples(self):
        assert kappa0_search(lambda f: f(0), 1) == Found((0,))
        assert kappa0_search(lambda f: 1, 2) == NoneAtDepth(2)
        assert kappa0_search(lambda f: 1 - f(2), 3) == Found((0, 0, 1))

    def test_violation(self):
        with pytest.raises(ModulusViolation):
            kappa0_search(lambda f: f(5), 2)

    @pytest.mark.parametrize("m", range(0, 11, 2))
    def test_matches_brute_force(self, m):
        # Y(f) = 0 iff the first m bits spell the binary expansion of 2^m // 3
        target = tuple(int(b) for b in format((1 << m) // 3, f"0{m}b")) if m else ()

        def Y(f):
            return 0 if tuple(f(i) for i in range(m)) == target else 1

        out = kappa0_search(Y, m)
        brute = next((s for s in fan_enumerate(m) if Y(BinSeq.from_list(s)) == 0), None)
        assert out == Found(brute)


def step_witness():
    return (step_surrogate, real_from_rational(0), lambda n: real_from_rational(pow2(-n)), Q(1))


class TestGrilliot:
    def test_example(self):
        oracle = grilliot_extract(*step_witness())
        g = BaireSeq.from_list([1, 1, 0], tail=1)
        assert oracle(g, 10) == Found(2) == exists2_search(g, 10)

    def test_zero_and_none(self):
        oracle = grilliot_extract(*step_witness())
        assert oracle(BaireSeq.from_list([0]), 8) == Found(0)
        out = oracle(BaireSeq.from_list([], tail=1), 8)
        assert isinstance(out, (ExhaustedAt, NeedFuel))
        assert isinstance(exists2_search(BaireSeq.from_list([], tail=1), 8), ExhaustedAt)

    def test_support_six_agreement(self):
        oracle = grilliot_extract(*step_witness())
        for bits in product((0, 1), repeat=6):
            g = BinSeq.from_list(list(bits), tail=1)
            want = exists2_search(g, 6)
            got = oracle(g, 8)
            if isinstance(want, Found):
                assert got == want
            else:
                assert not isinstance(got, Found)

    def test_bad_witness(self):
        F, x0, seq, _ = step_witness()
        with pytest.raises(WitnessInvalid):
            grilliot_extract(F, x0, lambda n: real_from_rational(1), Q(1))
        with pytest.raises(WitnessInvalid):
            grilliot_extract(lambda x, fuel: real_from_rational(0), x0, seq, Q(1))


class TestDomainDecider:
    def test_total(self):
        alpha = Associate({(): 1})
        assert isinstance(domain_decider(alpha, lambda x, t: False, BinSeq.from_list([]), 10), InD)

    def test_empty_alpha(self):
        out = domain_decider(Associate({}), lambda x, t: t >= 3, BinSeq.from_list([1]), 50)
        assert isinstance(out, NotInD)

    def test_starts_with_zero(self):
        alpha = Associate({(0,): 1})

        def refuter(x, t):
            return t >= 1 and x(0) != 0

        assert isinstance(domain_decider(alpha, refuter, BinSeq.from_list([1]), 50), NotInD)
        assert isinstance(domain_decider(alpha, refuter, BinSeq.from_list([0]), 50), InD)

    def test_both(self):
        alpha = Associate({(): 1})
        with pytest.raises(BothCertified):
            domain_decider(alpha, lambda x, t: True, BinSeq.from_list([]), 10)

    def test_out_of_fuel(self):
        out = domain_decider(Associate({}), lambda x, t: False, BinSeq.from_list([]), 6)
        assert out == NeedFuel(6)

    @given(st.lists(st.integers(0, 1), min_size=1, max_size=4),
           st.lists(st.integers(0, 1), max_size=8), st.integers(1, 30))
    def test_monotone(self, prefix, bits, fuel):
        # D = sequences starting with prefix; alpha defined exactly there
        n = len(prefix)
        alpha = Associate({tuple(prefix): 1})

        def refuter(x, t):
            return t >= n and tuple(x(i) for i in range(n)) != tuple(prefix)

        x = BinSeq.from_list(bits)
        inside = tuple(x(i) for i in range(n)) == tuple(prefix)
        first = domain_decider(alpha, refuter, x, fuel)
        for more in (fuel + 1, fuel + 10, 200):
            later = domain_decider(alpha, refuter, x, more)
            if not isinstance(first, NeedFuel):
                assert type(later) is type(first)
        final = domain_decider(alpha, refuter, x, 200)
        assert isinstance(final, InD if inside else NotInD)


class TestDispatch:
    def test_continuous(self):
        out = em_dispatch("t", lambda t, m: (t, m(3)), lambda t, o: None,
                          lambda fuel: (ModulusWitness(Modulus.shifted(1)), ["found modulus"]), 5)
        assert out.branch == "continuous" and out.result == ("t", 4)

    def test_discontinuous(self):
        w = DiscontinuityWitness(*step_witness())
        out = em_dispatch("t", lambda t, m: None,
                          lambda t, oracle: oracle(BaireSeq.from_list([1, 0]), 8),
                          lambda fuel: (w, []), 5)
        assert out.branch == "discontinuous" and out.result == Found(1)

    def test_no_fuel(self):
        out = em_dispatch("t", None, None, lambda fuel: (None, []), 0)
        assert out.branch == "none" and isinstance(out.result, NeedFuel)

    def test_neither(self):
        out = em_dispatch("t", None, None, lambda fuel: (None, ["tried"]), 3)
        assert out.result == NeedFuel(3) and out.transcript[0] == "tried"

    def test_errors_tagged(self):
        def boom(t, m):
            raise ZeroDivisionError("x")

        with pytest.raises(BranchError) as info:
            em_dispatch("t", boom, None, lambda fuel: (ModulusWitness(Modulus.constant(0)), []), 3)
        assert info.value.branch == "continuous"

    def test_deterministic(self):
        def run():
            w = DiscontinuityWitness(*step_witness())
            return em_dispatch("t", None, lambda t, o: o(BaireSeq.from_list([1, 1, 1, 0]), 8),
                               lambda fuel: (w, ["w"]), 4)

        a, b = run(), run()
        assert (a.branch, a.result, a.transcript) == (b.branch, b.result, b.transcript)
