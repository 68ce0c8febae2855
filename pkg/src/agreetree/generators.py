"""Tree constructions: balanced trees, caterpillars, seeded random models,
the extremal bounded-balance trees, swap-permutation pairs, and exhaustive
topology enumeration for tiny leaf counts.

Random generation is deterministic per (model, seed, n) using the portable
splitmix64 stream, so every generated tree is reproducible from its recorded
seed.  Enumeration is guarded against combinatorial explosion; set
``AGREETREE_GUARDS=off`` (or pass ``force=True``) to lift the guard.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass

from ._rng import SplitMix64
from .treecore import RootedTree, TreeError, UnrootedTree, unroot

UNIFORM = "uniform"
YULE = "yule"

ENUM_GUARD_UNROOTED = 7
ENUM_GUARD_ROOTED = 6


def guards_lifted() -> bool:
    return os.environ.get("AGREETREE_GUARDS", "").lower() == "off"


@dataclass(frozen=True)
class RandomModel:
    """A named random-tree model plus the 64-bit seed that fixes it."""

    kind: str  # UNIFORM (uniform over labelled topologies) or YULE
    seed: int = 0

    def __post_init__(self):
        if self.kind not in (UNIFORM, YULE):
            raise ValueError(f"unknown random model {self.kind!r}")


# --------------------------------------------------------------------------
# Deterministic constructions
# --------------------------------------------------------------------------


def _balanced_over(labels) -> RootedTree:
    labels = list(labels)
    if len(labels) == 1:
        return RootedTree.leaf(labels[0])
    half = len(labels) // 2
    return RootedTree.branch(_balanced_over(labels[:half]), _balanced_over(labels[half:]))


def gen_balanced(m: int) -> RootedTree:
    """Balanced rooted tree of height m with leaves 1..2^m left-to-right."""
    if not 0 <= m <= 20:
        raise ValueError(f"balanced height m={m} out of range [0, 20]")
    return _balanced_over(range(1, 2**m + 1))


def gen_caterpillar(n: int, rooted: bool = False):
    """Caterpillar with leaves 1..n in spine order."""
    if rooted:
        if n < 1:
            raise ValueError("rooted caterpillar needs n >= 1")
        if n == 1:
            return RootedTree.leaf(1)
        node = RootedTree.branch(RootedTree.leaf(n - 1), RootedTree.leaf(n))
        for i in range(n - 2, 0, -1):
            node = RootedTree.branch(RootedTree.leaf(i), node)
        return node
    if n < 3:
        raise ValueError("unrooted caterpillar needs n >= 3")
    adj = {}
    labels = {}
    # Leaf vertex i-1 carries label i; spine vertices follow.
    spine = [n + j for j in range(n - 2)]
    for j, s in enumerate(spine):
        adj[s] = []
        if j > 0:
            adj[s].append(spine[j - 1])
            adj[spine[j - 1]].append(s)
    def attach(leaf_label, s):
        v = leaf_label - 1
        adj[v] = [s]
        adj[s].append(v)
        labels[v] = leaf_label
    attach(1, spine[0])
    attach(2, spine[0])
    for j in range(1, n - 2):
        attach(j + 2, spine[j])
    attach(n, spine[-1])
    return UnrootedTree(adj, labels)


def gen_class_b(m: int) -> UnrootedTree:
    """Unrooted balanced tree with an edge center and 2^m leaves (m >= 2)."""
    if m < 2:
        raise ValueError("class-B trees need m >= 2 (at least 4 leaves)")
    return unroot(gen_balanced(m))


def gen_class_c(m: int) -> UnrootedTree:
    """Unrooted balanced tree with a vertex center and 3 * 2^(m-1) leaves."""
    if m < 1:
        raise ValueError("class-C trees need m >= 1")
    adj = {0: []}
    labels = {}
    counter = itertools.count(1)
    next_label = itertools.count(1)

    def bal(parent, depth):
        vid = next(counter)
        adj[vid] = [parent]
        adj[parent].append(vid)
        if depth == 0:
            labels[vid] = next(next_label)
        else:
            bal(vid, depth - 1)
            bal(vid, depth - 1)

    for _ in range(3):
        bal(0, m - 1)
    return UnrootedTree(adj, labels)


def gen_extremal_fhk(h: int, k: int) -> RootedTree:
    """The extremal tree of height <= h whose balanced restrictions top out
    at height k: balanced when h == k or k == 0, otherwise the join of the
    (h-1, k) and (h-1, k-1) extremal trees.  Leaves are 1..f(h,k)."""
    if not 0 <= k <= h:
        raise ValueError(f"need 0 <= k <= h, got h={h}, k={k}")
    counter = itertools.count(1)

    def bal(depth):
        if depth == 0:
            return RootedTree.leaf(next(counter))
        return RootedTree.branch(bal(depth - 1), bal(depth - 1))

    def rec(h, k):
        if h == k or k == 0:
            return bal(k)
        return RootedTree.branch(rec(h - 1, k), rec(h - 1, k - 1))

    return rec(h, k)


def swap_sequence(k: int) -> tuple:
    """The recursive quarter-swap permutation of (1, ..., 4^k)."""
    if k < 0:
        raise ValueError("k must be >= 0")

    def rec(seq):
        if len(seq) == 1:
            return seq
        q = len(seq) // 4
        s1, s2, s3, s4 = seq[:q], seq[q : 2 * q], seq[2 * q : 3 * q], seq[3 * q :]
        return rec(s1) + rec(s3) + rec(s2) + rec(s4)

    return rec(tuple(range(1, 4**k + 1)))


def gen_swap_pair(k: int, rooted: bool = True):
    """The conjectured-extremal pair: two balanced trees of height 2k, the
    second with leaves permuted by swap_sequence(k).  The unrooted variant
    removes both roots."""
    if k < 1:
        raise ValueError("swap pairs need k >= 1")
    t1 = gen_balanced(2 * k)
    t2 = _balanced_over(swap_sequence(k))
    if rooted:
        return t1, t2
    return unroot(t1), unroot(t2)


def relabel(t, mapping: dict):
    """Replace every leaf label via ``mapping`` (a bijection on the labels)."""
    if isinstance(t, RootedTree):

        def rec(node):
            if node.is_leaf:
                return RootedTree.leaf(mapping[node.label])
            return RootedTree.branch(rec(node.left), rec(node.right))

        out = rec(t)
        if out.nleaves != t.nleaves:
            raise TreeError("relabel mapping is not injective on the leaves")
        return out
    new_labels = {v: mapping[lab] for v, lab in t.leaf_label.items()}
    return UnrootedTree({v: list(ns) for v, ns in t.adj.items()}, new_labels)


# --------------------------------------------------------------------------
# Random models
# --------------------------------------------------------------------------


class _MNode:
    __slots__ = ("label", "left", "right")

    def __init__(self, label, left=None, right=None):
        self.label = label
        self.left = left
        self.right = right


def _freeze(node: _MNode) -> RootedTree:
    if node.label is not None:
        return RootedTree.leaf(node.label)
    return RootedTree.branch(_freeze(node.left), _freeze(node.right))


def _uniform_rooted(n: int, rng: SplitMix64) -> RootedTree:
    """Uniform over the (2n-3)!! labelled rooted topologies: each new leaf
    goes into a uniformly random edge (counting the edge above the root)."""
    root = _MNode(1)
    edges = []  # (parent, "left"/"right"); the root position is index 0
    for lab in range(2, n + 1):
        pick = rng.randrange(len(edges) + 1)
        new_leaf = _MNode(lab)
        if pick == 0:
            root = _MNode(None, root, new_leaf)
            edges.append((root, "left"))
            edges.append((root, "right"))
        else:
            parent, side = edges[pick - 1]
            child = getattr(parent, side)
            mid = _MNode(None, child, new_leaf)
            setattr(parent, side, mid)
            edges.append((mid, "left"))
            edges.append((mid, "right"))
    return _freeze(root)


def _yule_rooted(n: int, rng: SplitMix64) -> RootedTree:
    """Yule (random splitting): repeatedly bifurcate a uniformly random
    extant leaf; the new tip takes the next unused label."""
    if n == 1:
        return RootedTree.leaf(1)
    root = _MNode(None, _MNode(1), _MNode(2))
    tips = [root.left, root.right]
    for lab in range(3, n + 1):
        i = rng.randrange(len(tips))
        node = tips[i]
        node.left = _MNode(node.label)
        node.right = _MNode(lab)
        node.label = None
        tips[i] = node.left
        tips.append(node.right)
    return _freeze(root)


def _uniform_unrooted(n: int, rng: SplitMix64) -> UnrootedTree:
    """Uniform over the (2n-5)!! labelled unrooted topologies by sequential
    insertion of leaves 4..n into a uniformly random edge."""
    adj = {0: [1, 2, 3], 1: [0], 2: [0], 3: [0]}
    labels = {1: 1, 2: 2, 3: 3}
    edges = [(0, 1), (0, 2), (0, 3)]
    next_vertex = 4
    for lab in range(4, n + 1):
        pick = rng.randrange(len(edges))
        u, v = edges[pick]
        w = next_vertex
        x = next_vertex + 1
        next_vertex += 2
        adj[u][adj[u].index(v)] = w
        adj[v][adj[v].index(u)] = w
        adj[w] = [u, v, x]
        adj[x] = [w]
        labels[x] = lab
        edges[pick] = (u, w)
        edges.append((w, v))
        edges.append((w, x))
    return UnrootedTree(adj, labels)


def gen_random(n: int, model: RandomModel, rooted: bool = False):
    """Random tree on leaves 1..n; identical for identical (model, seed, n)."""
    rng = SplitMix64(model.seed)
    if rooted:
        if n < 1:
            raise ValueError("rooted random trees need n >= 1")
        return _uniform_rooted(n, rng) if model.kind == UNIFORM else _yule_rooted(n, rng)
    if n < 3:
        raise ValueError("unrooted random trees need n >= 3")
    if model.kind == UNIFORM:
        return _uniform_unrooted(n, rng)
    return unroot(_yule_rooted(n, rng))


# --------------------------------------------------------------------------
# Exhaustive enumeration (tiny n)
# --------------------------------------------------------------------------


def _rooted_insertions(t: RootedTree, lab: int):
    """All trees obtained by inserting ``lab`` at any edge or above the root."""
    yield RootedTree.branch(t, RootedTree.leaf(lab))
    if not t.is_leaf:
        for left in _rooted_insertions(t.left, lab):
            yield RootedTree.branch(left, t.right)
        for right in _rooted_insertions(t.right, lab):
            yield RootedTree.branch(t.left, right)


def _unrooted_insert(t: UnrootedTree, edge, lab: int) -> UnrootedTree:
    adj = {v: list(ns) for v, ns in t.adj.items()}
    u, v = edge
    w = max(adj) + 1
    x = w + 1
    adj[u][adj[u].index(v)] = w
    adj[v][adj[v].index(u)] = w
    adj[w] = [u, v, x]
    adj[x] = [w]
    labels = dict(t.leaf_label)
    labels[x] = lab
    return UnrootedTree(adj, labels)


def enumerate_topologies(n: int, rooted: bool = False, force: bool = False):
    """Yield every labelled topology on leaves 1..n exactly once:
    (2n-3)!! rooted, (2n-5)!! unrooted."""
    limit = ENUM_GUARD_ROOTED if rooted else ENUM_GUARD_UNROOTED
    if n > limit and not force and not guards_lifted():
        raise ValueError(
            f"enumeration of n={n} exceeds the guard (n <= {limit}); "
            "pass force=True or set AGREETREE_GUARDS=off"
        )
    if rooted:
        if n < 1:
            raise ValueError("rooted enumeration needs n >= 1")

        def rec_r(k):
            if k == 1:
                yield RootedTree.leaf(1)
                return
            for t in rec_r(k - 1):
                yield from _rooted_insertions(t, k)

        yield from rec_r(n)
        return
    if n < 3:
        raise ValueError("unrooted enumeration needs n >= 3")

    def rec_u(k):
        if k == 3:
            yield UnrootedTree({0: [1, 2, 3], 1: [0], 2: [0], 3: [0]}, {1: 1, 2: 2, 3: 3})
            return
        for t in rec_u(k - 1):
            for edge in t.edges():
                yield _unrooted_insert(t, edge, k)

    yield from rec_u(n)
