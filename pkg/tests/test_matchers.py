import math

import pytest

from agreetree._rng import SplitMix64
from agreetree.bounds import (
    alpha,
    beta,
    beta_k,
    delta_for_beta_k,
    match1_bound,
    match2_bound,
    t2_constant,
)
from agreetree.decompose import max_balanced_height
from agreetree.exactmast import mast_rooted
from agreetree.generators import (
    RandomModel,
    gen_balanced,
    gen_caterpillar,
    gen_class_b,
    gen_class_c,
    gen_extremal_fhk,
    gen_random,
    gen_swap_pair,
    relabel,
)
from agreetree.matchers import (
    DUMMY_LABEL_BASE,
    class_c_prunings,
    match1,
    match1_unrooted,
    match2,
    match2_multi,
    match2_unrooted,
    match_almost_balanced,
    pad_to_balanced,
)
from agreetree.treecore import TreeError, is_caterpillar, radius
from agreetree.treeops import is_subtree, restrict, verify_agreement

DELTA1 = 0.1705
DELTA2 = 0.0248


def random_subset_tree(m, t, seed):
    """A uniform random rooted tree over a random t-subset of 1..2^m."""
    rng = SplitMix64(seed)
    labels = list(range(1, 2**m + 1))
    rng.shuffle(labels)
    chosen = sorted(labels[:t])
    shape = gen_random(t, RandomModel("uniform", rng.next_u64()), rooted=True)
    return relabel(shape, {i + 1: chosen[i] for i in range(t)})


def permuted_balanced(m, seed):
    rng = SplitMix64(seed)
    perm = list(range(1, 2**m + 1))
    rng.shuffle(perm)
    return relabel(gen_balanced(m), {i + 1: perm[i] for i in range(2**m)})


class TestMatch1:
    def test_single_leaf_base_case(self):
        t1 = gen_balanced(3)
        t2 = random_subset_tree(3, 1, 5)
        leaves, trace = match1(t1, t2, DELTA1)
        assert leaves == t2.leaves
        assert [s.rule for s in trace.steps] == ["base"]

    def test_identical_trees_emit_one_leaf_per_level(self):
        for m in (1, 2, 5, 8):
            leaves, trace = match1(gen_balanced(m), gen_balanced(m), DELTA1)
            assert len(leaves) == m + 1
            counts = trace.counts()
            assert counts["case1"] == m and counts["base"] == 1

    def test_count_identity(self):
        # emitted leaves == case1 + cross + 1
        for seed in range(25):
            t1 = gen_balanced(6)
            t2 = random_subset_tree(6, 2 + seed, seed)
            leaves, trace = match1(t1, t2, DELTA1)
            counts = trace.counts()
            assert len(leaves) == counts["case1"] + counts["cross"] + 1

    @pytest.mark.parametrize("delta", [DELTA1, 0.05, 0.30])
    def test_guarantee_and_shape(self, delta):
        rng = SplitMix64(17)
        for m in range(2, 8):
            for _ in range(20):
                t = 2 + rng.randrange(2**m - 1)
                t1 = gen_balanced(m)
                t2 = random_subset_tree(m, t, rng.next_u64())
                leaves, trace = match1(t1, t2, delta)
                bound = max(1, match1_bound(m, t, delta))
                assert len(leaves) >= bound - 1e-9
                verify_agreement(t1, t2, leaves)
                assert is_caterpillar(restrict(t1, leaves))
                assert trace.check_product_inequality()

    def test_trace_records_t0(self):
        t1 = gen_balanced(4)
        t2 = random_subset_tree(4, 9, 3)
        _, trace = match1(t1, t2, DELTA1)
        assert trace.t0 == 9 and trace.m == 4

    def test_unbalanced_first_tree_rejected(self):
        with pytest.raises(TreeError, match="balanced"):
            match1(gen_caterpillar(8, rooted=True), gen_balanced(3), DELTA1)

    def test_leafset_containment_required(self):
        t2 = relabel(gen_balanced(1), {1: 100, 2: 200})
        with pytest.raises(TreeError, match="subset"):
            match1(gen_balanced(2), t2, DELTA1)

    def test_delta_domain(self):
        with pytest.raises(ValueError):
            match1(gen_balanced(2), gen_balanced(2), 0.5)


class TestMatch2:
    def test_identical_trees_return_everything(self):
        for m in (1, 3, 6):
            t = gen_balanced(m)
            leaves, trace = match2(t, t, DELTA2)
            assert leaves == t.leaves
            assert trace.check_path_bounds()

    def test_swap_pair_k1(self):
        t1, t2 = gen_swap_pair(1)
        leaves, _ = match2(t1, t2, DELTA2)
        assert len(leaves) >= 2
        assert mast_rooted(t1, t2).size == 2
        verify_agreement(t1, t2, leaves)

    @pytest.mark.parametrize("delta", [DELTA2, 0.01, 0.06])
    def test_guarantee_random_permutations(self, delta):
        rng = SplitMix64(23)
        for m in range(2, 7):
            for _ in range(20):
                t1 = permuted_balanced(m, rng.next_u64())
                t2 = permuted_balanced(m, rng.next_u64())
                leaves, trace = match2(t1, t2, delta)
                bound = max(1, match2_bound(m, m, 2**m, delta))
                assert len(leaves) >= bound - 1e-9
                verify_agreement(t1, t2, leaves)
                assert trace.check_path_bounds()

    def test_partial_overlap(self):
        rng = SplitMix64(31)
        for m1, m2, shift in ((3, 4, 5), (4, 4, 9), (5, 3, 20)):
            t1 = gen_balanced(m1)
            t2 = relabel(
                gen_balanced(m2), {i: i + shift for i in range(1, 2**m2 + 1)}
            )
            t = len(t1.leaves & t2.leaves)
            if t == 0:
                continue
            leaves, trace = match2(t1, t2, DELTA2)
            assert len(leaves) >= max(1, match2_bound(m1, m2, t, DELTA2)) - 1e-9
            verify_agreement(t1, t2, leaves)
            assert trace.check_path_bounds()

    def test_balanced_restriction_depth_at_full_overlap(self):
        rng = SplitMix64(41)
        for m in (4, 5, 6, 7):
            floor_height = math.floor(beta(DELTA2) * m)
            for _ in range(10):
                t1 = permuted_balanced(m, rng.next_u64())
                t2 = permuted_balanced(m, rng.next_u64())
                leaves, _ = match2(t1, t2, DELTA2)
                shape = restrict(t1, leaves)
                assert max_balanced_height(shape) >= floor_height

    def test_empty_intersection_rejected(self):
        t2 = relabel(gen_balanced(2), {i: i + 100 for i in range(1, 5)})
        with pytest.raises(TreeError, match="nonempty"):
            match2(gen_balanced(2), t2, DELTA2)

    def test_delta_domain(self):
        with pytest.raises(ValueError):
            match2(gen_balanced(2), gen_balanced(2), 0.25)


class TestPadding:
    def test_already_balanced(self):
        t = gen_balanced(3)
        padded = pad_to_balanced(t, 3)
        assert padded.balanced and padded.height == 3
        assert is_subtree(t, padded)

    def test_single_leaf_to_height_two(self):
        from agreetree.treecore import RootedTree

        leaf = RootedTree.leaf(1)
        padded = pad_to_balanced(leaf, 2)
        assert padded.nleaves == 4 and padded.balanced
        assert is_subtree(leaf, padded)

    def test_extremal_tree(self):
        t = gen_extremal_fhk(4, 2)
        padded = pad_to_balanced(t, 4)
        assert padded.balanced and padded.height == 4
        assert is_subtree(t, padded)

    def test_dummy_labels_reserved(self):
        padded = pad_to_balanced(gen_balanced(1), 3)
        dummies = padded.leaves - {1, 2}
        assert dummies and all(lab > DUMMY_LABEL_BASE for lab in dummies)

    def test_target_too_small(self):
        with pytest.raises(ValueError):
            pad_to_balanced(gen_balanced(3), 2)


class TestMatch1Unrooted:
    def test_identical_class_b(self):
        t = gen_class_b(3)
        leaves = match1_unrooted(t, t, DELTA1)
        n = t.nleaves
        assert len(leaves) >= max(1, alpha(DELTA1) * math.log2(2 * n / 3)) - 1e-9
        verify_agreement(t, t, leaves)

    def test_class_c_random_second(self):
        rng = SplitMix64(8)
        for m in (2, 3, 4):
            t1 = gen_class_c(m)
            n = t1.nleaves
            t2 = gen_random(n, RandomModel("uniform", rng.next_u64()))
            leaves = match1_unrooted(t1, t2, DELTA1)
            assert len(leaves) >= max(1, alpha(DELTA1) * math.log2(2 * n / 3)) - 1e-9
            verify_agreement(t1, t2, leaves)

    def test_class_b_random_second(self):
        rng = SplitMix64(9)
        for m in (2, 3, 5):
            t1 = gen_class_b(m)
            t2 = gen_random(2**m, RandomModel("uniform", rng.next_u64()))
            leaves = match1_unrooted(t1, t2, DELTA1)
            assert len(leaves) >= max(1, alpha(DELTA1) * m) - 1e-9
            verify_agreement(t1, t2, leaves)

    def test_unbalanced_rejected(self):
        t = gen_caterpillar(8)
        with pytest.raises(TreeError, match="balanced"):
            match1_unrooted(t, t, DELTA1)


class TestMatch2Unrooted:
    def test_identical_class_b(self):
        for m in (2, 3, 4):
            t = gen_class_b(m)
            assert match2_unrooted(t, t, DELTA2) == t.leaves

    def test_class_c_prunings_overlap(self):
        rng = SplitMix64(77)
        for m in (2, 3, 4, 5):
            n = 3 * 2 ** (m - 1)
            perm = list(range(1, n + 1))
            rng.shuffle(perm)
            t1 = gen_class_c(m)
            t2 = relabel(gen_class_c(m), {i + 1: perm[i] for i in range(n)})
            X, Y = class_c_prunings(t1, t2)
            assert len(X & Y) >= math.ceil(2 ** (m + 1) / 3)

    def test_class_c_guarantee(self):
        rng = SplitMix64(78)
        for m in (2, 3, 4):
            n = 3 * 2 ** (m - 1)
            perm = list(range(1, n + 1))
            rng.shuffle(perm)
            t1 = gen_class_c(m)
            t2 = relabel(gen_class_c(m), {i + 1: perm[i] for i in range(n)})
            leaves = match2_unrooted(t1, t2, DELTA2)
            bound = 2.0 ** (beta(DELTA2) * m - t2_constant(DELTA2))
            assert len(leaves) >= max(1, bound) - 1e-9
            verify_agreement(t1, t2, leaves)

    def test_class_mismatch_rejected(self):
        with pytest.raises(TreeError, match="same"):
            match2_unrooted(gen_class_b(2), gen_class_c(2), DELTA2)


class TestMatch2Multi:
    def test_identical_trees(self):
        t = gen_balanced(4)
        assert match2_multi([t, t, t], DELTA2) == t.leaves

    def test_three_random_balanced(self):
        trees = [permuted_balanced(6, seed) for seed in (1, 2, 3)]
        leaves = match2_multi(trees, DELTA2)
        assert leaves
        for i in range(3):
            for j in range(i + 1, 3):
                verify_agreement(trees[i], trees[j], leaves)

    def test_needs_two(self):
        with pytest.raises(TreeError):
            match2_multi([gen_balanced(2)], DELTA2)


class TestMatchAlmostBalanced:
    def test_balanced_input_single_mode(self):
        # a class-B tree has radius m = log n, within k log n - 1 for k = 2
        t1 = gen_class_b(4)
        t2 = gen_random(16, RandomModel("uniform", 55))
        leaves = match_almost_balanced(t1, t2, 2, mode="single")
        assert leaves
        verify_agreement(t1, t2, leaves)
        assert all(lab <= DUMMY_LABEL_BASE for lab in leaves)

    def test_both_mode_guarantee(self):
        rng = SplitMix64(60)
        k = 2
        hits = 0
        for _ in range(20):
            n = 32
            t1 = gen_random(n, RandomModel("yule", rng.next_u64()))
            t2 = gen_random(n, RandomModel("yule", rng.next_u64()))
            logn = math.log2(n)
            if radius(t1) > k * logn or radius(t2) > k * logn:
                continue
            hits += 1
            leaves = match_almost_balanced(t1, t2, k, mode="both")
            d = delta_for_beta_k(k)
            assert len(leaves) >= max(1, n ** beta_k(k, d)) - 1e-9
            verify_agreement(t1, t2, leaves)
        assert hits > 0

    def test_radius_precondition(self):
        t1 = gen_caterpillar(64)  # radius 16 >> 2 log 64 = 12
        t2 = gen_random(64, RandomModel("uniform", 5))
        with pytest.raises(TreeError, match="radius"):
            match_almost_balanced(t1, t2, 2, mode="single")
