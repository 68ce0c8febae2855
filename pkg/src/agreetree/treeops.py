"""Operations on trees: restriction, ancestors, joins, isomorphism, and
agreement-certificate verification.

Rooted isomorphism is decided by cluster-set equality and unrooted
isomorphism by split-set equality; both are canonical, order-free
characterisations of label-respecting isomorphism.  A rooted restriction is
rooted at the most recent common ancestor of the kept leaves.
"""

from __future__ import annotations

from dataclasses import dataclass

from .treecore import (
    RootedTree,
    TreeError,
    UnrootedTree,
    postorder,
    root_at_edge,
    to_newick,
    unroot,
)


class AgreementError(TreeError):
    """The two restrictions differ; carries the first differing part."""


def lca(t: RootedTree, labels) -> RootedTree:
    """Most recent common ancestor of a non-empty set of leaf labels."""
    X = frozenset(labels)
    if not X:
        raise TreeError("lca of an empty set")
    if not X <= t.leaves:
        raise TreeError(f"labels {sorted(X - t.leaves)} not in tree")
    node = t
    while not node.is_leaf:
        if X <= node.left.leaves:
            node = node.left
        elif X <= node.right.leaves:
            node = node.right
        else:
            return node
    return node


def restrict(t, labels):
    """Restriction T|X: the minimal subgraph spanning X with degree-2
    vertices suppressed; rooted restrictions are rooted at the MRCA of X.

    X must be a subset of the leaf labels; unrooted restrictions need
    |X| >= 3.
    """
    X = frozenset(labels)
    if isinstance(t, RootedTree):
        if not X:
            raise TreeError("cannot restrict to an empty leaf set")
        if not X <= t.leaves:
            raise TreeError(f"labels {sorted(X - t.leaves)} not in tree")
        return _restrict_rooted(t, X)
    if len(X) < 3:
        raise TreeError("unrooted restriction needs at least 3 leaves")
    if not X <= t.leaves:
        raise TreeError(f"labels {sorted(X - t.leaves)} not in tree")
    pivot = min(X)
    rooted = root_at_edge(t, _pendant_edge(t, pivot))
    return unroot(_restrict_rooted(rooted, X))


def _pendant_edge(t: UnrootedTree, label):
    v = t.label_vertex[label]
    return (v, t.adj[v][0])


def _restrict_rooted(t: RootedTree, X: frozenset) -> RootedTree:
    def rec(node):
        if node.is_leaf:
            return node if node.label in X else None
        left = rec(node.left)
        right = rec(node.right)
        if left is not None and right is not None:
            return RootedTree.branch(left, right)
        return left if left is not None else right

    return rec(t)


def join(s_left: RootedTree, s_right: RootedTree) -> RootedTree:
    """New root over two rooted trees with disjoint leaf sets."""
    if s_left.leaves & s_right.leaves:
        raise TreeError(
            f"joined trees share leaves {sorted(s_left.leaves & s_right.leaves)}"
        )
    return RootedTree.branch(s_left, s_right)


def clusters(t: RootedTree) -> frozenset:
    """{ leaf set of every node }; 2n-1 clusters for n leaves."""
    return frozenset(node.leaves for node in postorder(t))


def splits(t: UnrootedTree) -> frozenset:
    """One leaf bipartition per edge, each a frozenset of the two sides;
    n + (n-3) distinct splits for n leaves."""
    all_leaves = t.leaves
    sides = _directed_leafsets(t)
    return frozenset(
        frozenset((sides[(u, v)], all_leaves - sides[(u, v)])) for u, v in t.edges()
    )


def _directed_leafsets(t: UnrootedTree) -> dict:
    """(u, v) -> labels on the v side of edge u-v, for every direction."""
    sides = {}
    for u, v in t.edges():
        for key in ((u, v), (v, u)):
            stack = [key]
            while stack:
                a, b = stack[-1]
                if (a, b) in sides:
                    stack.pop()
                    continue
                if t.is_leaf_vertex(b):
                    sides[(a, b)] = frozenset((t.leaf_label[b],))
                    stack.pop()
                    continue
                kids = [(b, w) for w in t.adj[b] if w != a]
                pending = [k for k in kids if k not in sides]
                if pending:
                    stack.extend(pending)
                    continue
                sides[(a, b)] = sides[kids[0]] | sides[kids[1]]
                stack.pop()
    return sides


def _same_kind(t1, t2):
    if isinstance(t1, RootedTree) != isinstance(t2, RootedTree):
        raise TreeError("cannot compare a rooted tree with an unrooted tree")


def is_isomorphic(t1, t2) -> bool:
    """Label-respecting isomorphism; False for distinct leaf sets."""
    _same_kind(t1, t2)
    if t1.leaves != t2.leaves:
        return False
    if isinstance(t1, RootedTree):
        return clusters(t1) == clusters(t2)
    return splits(t1) == splits(t2)


def is_subtree(s, t) -> bool:
    """True iff restricting t to s's leaves recovers s exactly."""
    _same_kind(s, t)
    if not s.leaves <= t.leaves:
        return False
    return is_isomorphic(s, restrict(t, s.leaves))


@dataclass(frozen=True)
class AgreementCertificate:
    """Evidence that two trees agree on a leaf set: the set plus the
    canonical serialisation of the (common) restricted shape."""

    leaves: frozenset
    restricted_shape: str


def verify_agreement(t1, t2, labels) -> AgreementCertificate:
    """Check T1|X == T2|X and return a certificate; raise AgreementError
    otherwise.

    Unrooted conventions: any X with |X| <= 2 agrees trivially (there is
    only one topology on up to three leaves); such degenerate certificates
    serialise as "a;" or "(a,b);".  An empty X yields an empty certificate.
    """
    _same_kind(t1, t2)
    X = frozenset(labels)
    common = t1.leaves & t2.leaves
    if not X <= common:
        raise TreeError(f"labels {sorted(X - common)} not shared by both trees")
    if not X:
        return AgreementCertificate(X, "")
    rooted = isinstance(t1, RootedTree)
    if not rooted and len(X) <= 2:
        body = ",".join(str(x) for x in sorted(X))
        shape = f"{body};" if len(X) == 1 else f"({body});"
        return AgreementCertificate(X, shape)
    r1 = restrict(t1, X)
    r2 = restrict(t2, X)
    if rooted:
        c1, c2 = clusters(r1), clusters(r2)
        what = "cluster"
    else:
        c1, c2 = splits(r1), splits(r2)
        what = "split"
    if c1 != c2:
        diff = min(c1 ^ c2, key=_part_key)
        raise AgreementError(
            f"restrictions to {sorted(X)} differ; first differing {what}: "
            f"{_part_repr(diff)}"
        )
    return AgreementCertificate(X, to_newick(r1))


def _part_key(part):
    if part and isinstance(next(iter(part)), frozenset):  # a split: two sides
        return tuple(sorted(tuple(sorted(side)) for side in part))
    return (tuple(sorted(part)),)


def _part_repr(part):
    if part and isinstance(next(iter(part)), frozenset):
        a, b = sorted((sorted(side) for side in part))
        return f"{a} | {b}"
    return str(sorted(part))
