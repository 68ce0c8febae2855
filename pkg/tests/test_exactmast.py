import pytest

from agreetree.exactmast import (
    mast_bruteforce,
    mast_floor,
    mast_rooted,
    mast_unrooted,
)
from agreetree.generators import (
    RandomModel,
    gen_balanced,
    gen_caterpillar,
    gen_class_b,
    gen_random,
    gen_swap_pair,
    relabel,
)
from agreetree._rng import SplitMix64
from agreetree.treecore import parse_newick
from agreetree.treeops import restrict, verify_agreement

from oracles import mast_subsets_unrooted


def _random_rooted(n, seed):
    return gen_random(n, RandomModel("uniform", seed), rooted=True)


def _random_unrooted(n, seed):
    return gen_random(n, RandomModel("uniform", seed))


class TestRooted:
    def test_identical(self):
        t = _random_rooted(9, 13)
        res = mast_rooted(t, t)
        assert res.size == 9 and res.witness == t.leaves

    def test_disjoint(self):
        a = gen_balanced(1)
        b = relabel(gen_balanced(1), {1: 5, 2: 6})
        assert mast_rooted(a, b).size == 0

    def test_swap_pair_k1(self):
        assert mast_rooted(*gen_swap_pair(1)).size == 2

    def test_matches_bruteforce_randoms(self):
        rng = SplitMix64(99)
        for _ in range(60):
            n = 4 + rng.randrange(5)
            a = _random_rooted(n, rng.next_u64())
            b = _random_rooted(n, rng.next_u64())
            res = mast_rooted(a, b)
            assert res.size == mast_bruteforce(a, b)
            verify_agreement(a, b, res.witness)

    def test_partial_overlap(self):
        a = _random_rooted(8, 3)
        b = relabel(_random_rooted(8, 4), {i: i + 4 for i in range(1, 9)})
        res = mast_rooted(a, b)
        assert res.size == mast_bruteforce(a, b)
        assert res.witness <= a.leaves & b.leaves

    def test_monotone_under_restriction(self):
        rng = SplitMix64(5)
        for _ in range(10):
            a = _random_rooted(8, rng.next_u64())
            b = _random_rooted(8, rng.next_u64())
            whole = mast_rooted(a, b).size
            X = sorted(a.leaves)[:5]
            assert mast_rooted(restrict(a, X), restrict(b, X)).size <= whole

    def test_witness_deterministic_and_lex_small(self):
        a = _random_rooted(7, 70)
        b = _random_rooted(7, 71)
        w1 = mast_rooted(a, b).witness
        w2 = mast_rooted(a, b).witness
        assert w1 == w2


class TestUnrooted:
    def test_identical(self):
        t = _random_unrooted(8, 21)
        assert mast_unrooted(t, t).size == 8

    def test_swap_pair_k1(self):
        assert mast_unrooted(*gen_swap_pair(1, rooted=False)).size == 3

    def test_matches_subset_bruteforce(self):
        rng = SplitMix64(7)
        for _ in range(40):
            n = 4 + rng.randrange(4)
            a = _random_unrooted(n, rng.next_u64())
            b = _random_unrooted(n, rng.next_u64())
            res = mast_unrooted(a, b)
            assert res.size == mast_subsets_unrooted(a, b)
            verify_agreement(a, b, res.witness)

    def test_monotone_under_restriction(self):
        rng = SplitMix64(6)
        for _ in range(8):
            a = _random_unrooted(7, rng.next_u64())
            b = _random_unrooted(7, rng.next_u64())
            whole = mast_unrooted(a, b).size
            X = sorted(a.leaves)[:5]
            assert mast_unrooted(restrict(a, X), restrict(b, X)).size <= whole

    def test_agrees_with_per_rooting_sweep(self):
        from agreetree.exactmast import _rooted_size
        from agreetree.treecore import root_at_edge

        a = _random_unrooted(6, 100)
        b = _random_unrooted(6, 101)
        sweep = max(
            _rooted_size(root_at_edge(a, e1), root_at_edge(b, e2))
            for e1 in a.edges()
            for e2 in b.edges()
        )
        assert mast_unrooted(a, b).size == sweep

    def test_caterpillar_vs_balanced_at_most_logarithmic(self):
        for m in (2, 3, 4):
            n = 2**m
            cat = gen_caterpillar(n)
            bal = gen_class_b(m)
            assert mast_unrooted(cat, bal).size <= 2 * m + 1


class TestBruteforce:
    def test_disjoint(self):
        a = parse_newick("(1,2);")
        b = parse_newick("(3,4);")
        assert mast_bruteforce(a, b) == 0

    def test_single_common(self):
        a = parse_newick("(1,2);")
        b = parse_newick("(2,3);")
        assert mast_bruteforce(a, b) == 1

    def test_conflicting_quartets(self):
        a = parse_newick("((1,2),3,4);")
        b = parse_newick("((1,3),2,4);")
        assert mast_bruteforce(a, b) == 3

    def test_guard(self):
        a = _random_rooted(13, 1)
        b = _random_rooted(13, 2)
        with pytest.raises(ValueError, match="guard"):
            mast_bruteforce(a, b)


class TestFloor:
    def test_three_unrooted(self):
        assert mast_floor(3) == 3

    def test_three_rooted(self):
        assert mast_floor(3, rooted=True) == 2

    def test_four_unrooted(self):
        assert mast_floor(4) == 3

    def test_guard(self):
        with pytest.raises(ValueError, match="guard"):
            mast_floor(7)
