import pytest
from hypothesis import given, strategies as st

from agreetree.generators import (
    RandomModel,
    enumerate_topologies,
    gen_balanced,
    gen_random,
    gen_swap_pair,
)
from agreetree.treecore import RootedTree, TreeError, parse_newick, to_newick
from agreetree.treeops import (
    AgreementError,
    clusters,
    is_isomorphic,
    is_subtree,
    join,
    lca,
    restrict,
    splits,
    verify_agreement,
)

from oracles import iso_rooted_search, iso_unrooted_search, restrict_unrooted_by_paths


class TestLca:
    def test_single_leaf(self):
        t = gen_balanced(2)
        assert lca(t, {3}).label == 3

    def test_cherry_side(self):
        t = parse_newick("((1,2),(3,4));")
        assert lca(t, {1, 2}) is t.left

    def test_across_root(self):
        t = parse_newick("((1,2),(3,4));")
        assert lca(t, {1, 3}) is t

    def test_missing_label(self):
        with pytest.raises(TreeError):
            lca(gen_balanced(2), {9})


class TestRestrict:
    def test_identity(self):
        t = gen_random(12, RandomModel("uniform", 3), rooted=True)
        assert is_isomorphic(restrict(t, t.leaves), t)

    def test_suppresses_degree_two(self):
        t = parse_newick("((1,2),(3,4));")
        assert to_newick(restrict(t, {1, 3, 4})) == "(1,(3,4));"

    def test_rooted_at_mrca(self):
        t = parse_newick("((1,2),(3,4));")
        assert to_newick(restrict(t, {3, 4})) == "(3,4);"

    def test_not_subset(self):
        with pytest.raises(TreeError):
            restrict(gen_balanced(2), {1, 99})

    def test_unrooted_too_small(self):
        with pytest.raises(TreeError):
            restrict(parse_newick("(1,2,3);"), {1, 2})

    @given(st.integers(0, 2**63), st.integers(7, 24))
    def test_unrooted_equals_path_union_oracle(self, seed, n):
        t = gen_random(n, RandomModel("uniform", seed))
        rng_labels = sorted(t.leaves)[: max(3, n // 3)]
        got = restrict(t, rng_labels)
        want = restrict_unrooted_by_paths(t, rng_labels)
        assert splits(got) == splits(want)

    @given(st.integers(0, 2**63))
    def test_restriction_composes(self, seed):
        t = gen_random(20, RandomModel("uniform", seed), rooted=True)
        X = sorted(t.leaves)[:12]
        Y = X[:5]
        assert is_isomorphic(restrict(restrict(t, X), Y), restrict(t, Y))


class TestJoin:
    def test_two_leaves(self):
        s = join(RootedTree.leaf(1), RootedTree.leaf(2))
        assert to_newick(s) == "(1,2);"

    def test_balanced_join(self):
        s = join(parse_newick("(1,2);"), parse_newick("(3,4);"))
        assert to_newick(s) == "((1,2),(3,4));"

    def test_overlap_rejected(self):
        with pytest.raises(TreeError):
            join(parse_newick("(1,2);"), parse_newick("(2,3);"))

    @given(st.integers(0, 2**63))
    def test_join_of_subtrees_is_subtree(self, seed):
        t = gen_random(16, RandomModel("uniform", seed), rooted=True)
        if t.left.nleaves < 2 or t.right.nleaves < 2:
            return
        xl = sorted(t.left.leaves)[:2]
        xr = sorted(t.right.leaves)[:2]
        s = join(restrict(t.left, xl), restrict(t.right, xr))
        assert is_subtree(s, t)


class TestClustersSplits:
    def test_cherry_clusters(self):
        assert clusters(parse_newick("(1,2);")) == {
            frozenset({1}),
            frozenset({2}),
            frozenset({1, 2}),
        }

    def test_three_leaf_clusters(self):
        got = clusters(parse_newick("((1,2),3);"))
        assert frozenset({1, 2}) in got and frozenset({1, 2, 3}) in got
        assert len(got) == 5

    def test_cluster_count(self):
        t = gen_random(17, RandomModel("uniform", 4), rooted=True)
        assert len(clusters(t)) == 2 * 17 - 1

    def test_star_splits(self):
        assert len(splits(parse_newick("(1,2,3);"))) == 3

    def test_quartet_split(self):
        got = splits(parse_newick("((1,2),3,4);"))
        assert frozenset({frozenset({1, 2}), frozenset({3, 4})}) in got

    def test_split_count(self):
        t = gen_random(16, RandomModel("uniform", 9))
        assert len(splits(t)) == 16 + (16 - 3)


class TestIsomorphism:
    def test_child_order_ignored(self):
        assert is_isomorphic(parse_newick("((1,2),3);"), parse_newick("(3,(2,1));"))

    def test_different_quartets(self):
        assert not is_isomorphic(parse_newick("((1,2),3,4);"), parse_newick("((1,3),2,4);"))

    def test_distinct_leafsets(self):
        assert not is_isomorphic(parse_newick("(1,2);"), parse_newick("(1,3);"))

    def test_mixed_kinds_rejected(self):
        with pytest.raises(TreeError):
            is_isomorphic(parse_newick("(1,2);"), parse_newick("(1,2,3);"))

    def test_agrees_with_search_unrooted(self):
        for n in (4, 5, 6):
            tops = list(enumerate_topologies(n))
            for i, a in enumerate(tops):
                for b in tops[i:]:
                    assert is_isomorphic(a, b) == iso_unrooted_search(a, b)

    def test_agrees_with_search_rooted(self):
        for n in (3, 4, 5):
            tops = list(enumerate_topologies(n, rooted=True))
            for i, a in enumerate(tops):
                for b in tops[i:]:
                    assert is_isomorphic(a, b) == iso_rooted_search(a, b)

    @given(st.integers(0, 2**63))
    def test_mutual_subtree_iff_isomorphic(self, seed):
        a = gen_random(8, RandomModel("uniform", seed), rooted=True)
        b = gen_random(8, RandomModel("uniform", seed + 1), rooted=True)
        both = is_subtree(a, b) and is_subtree(b, a)
        assert both == is_isomorphic(a, b)


class TestIsSubtree:
    def test_restriction_is_subtree(self):
        t = gen_random(14, RandomModel("uniform", 2), rooted=True)
        X = sorted(t.leaves)[:6]
        assert is_subtree(restrict(t, X), t)

    def test_single_leaf(self):
        t = gen_balanced(3)
        assert is_subtree(RootedTree.leaf(5), t)

    def test_wrong_quartet(self):
        host = parse_newick("((1,3),2,4);")
        assert not is_subtree(parse_newick("((1,2),3,4);"), host)


class TestVerifyAgreement:
    def test_single_common_leaf(self):
        t1 = gen_balanced(2)
        t2 = parse_newick("((1,3),(2,4));")
        cert = verify_agreement(t1, t2, {1})
        assert cert.restricted_shape == "1;"

    def test_matcher_style_output(self):
        t1, t2 = gen_swap_pair(1)
        cert = verify_agreement(t1, t2, {1, 4})
        assert cert.leaves == {1, 4}

    def test_swap_pair_full_set_fails(self):
        t1, t2 = gen_swap_pair(1)
        with pytest.raises(AgreementError, match="differing cluster"):
            verify_agreement(t1, t2, {1, 2, 3, 4})

    def test_unrooted_trivial_pair(self):
        u1, u2 = gen_swap_pair(1, rooted=False)
        cert = verify_agreement(u1, u2, {1, 2})
        assert cert.restricted_shape == "(1,2);"

    def test_label_not_shared(self):
        with pytest.raises(TreeError):
            verify_agreement(gen_balanced(1), gen_balanced(2), {3})
