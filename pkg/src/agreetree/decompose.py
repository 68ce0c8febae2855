"""Structural decompositions and the general agreement pipeline.

A binary tree either contains a balanced restriction of substantial height
or a long path (and hence a large caterpillar restriction); ``ramsey_split``
decides which, with thresholds phi(n, a) for the balanced height and
(log n)^psi(n, b) for the path length.  ``caterpillar_agree`` handles a
caterpillar first tree through monotone subsequences, and ``agree_general``
combines everything into the unconditional pipeline whose output is at
least (alpha*/2) sqrt(log n) + alpha* log(2/3) leaves.
"""

from __future__ import annotations

import math
from bisect import bisect_left
from dataclasses import dataclass

from .bounds import GuaranteeReport, clamp, general_bound, optimal_delta_match1, phi, psi
from .exactmast import mast_unrooted
from .matchers import match1
from .treecore import (
    RootedTree,
    TreeError,
    UnrootedTree,
    diameter_path,
    is_caterpillar,
    postorder,
    root_at_leaf_edge,
    unroot,
)
from .treeops import restrict, verify_agreement


def _ceil(x: float) -> int:
    """Ceiling with a tiny slack against float noise on exact integers."""
    return math.ceil(x - 1e-9)


# --------------------------------------------------------------------------
# Balanced restrictions of rooted trees
# --------------------------------------------------------------------------


def max_balanced_height(t: RootedTree) -> int:
    """Largest k such that some leaf subset restricts to a balanced tree of
    height k: b(leaf) = 0, b(u) = max(b(l), b(r), 1 + min(b(l), b(r)))."""
    vals = {}
    for node in postorder(t):
        if node.is_leaf:
            vals[id(node)] = 0
        else:
            bl = vals[id(node.left)]
            br = vals[id(node.right)]
            vals[id(node)] = max(bl, br, 1 + min(bl, br))
    return vals[id(t)]


def extract_balanced(t: RootedTree, k: int) -> frozenset:
    """A leaf set whose restriction is balanced of height k (2^k leaves).

    Splits k-1/k-1 across the children whenever both support it, otherwise
    descends into a child that supports k; leaf picks take the smallest
    label."""
    vals = {}
    mins = {}
    for node in postorder(t):
        if node.is_leaf:
            vals[id(node)] = 0
            mins[id(node)] = node.label
        else:
            bl = vals[id(node.left)]
            br = vals[id(node.right)]
            vals[id(node)] = max(bl, br, 1 + min(bl, br))
            mins[id(node)] = min(mins[id(node.left)], mins[id(node.right)])
    if k > vals[id(t)]:
        raise TreeError(f"tree has no balanced restriction of height {k}")
    out = []

    def pick(node, k):
        if k == 0:
            out.append(mins[id(node)])
            return
        bl = vals[id(node.left)]
        br = vals[id(node.right)]
        if 1 + min(bl, br) >= k:
            pick(node.left, k - 1)
            pick(node.right, k - 1)
        elif bl >= k:
            pick(node.left, k)
        else:
            pick(node.right, k)

    pick(t, k)
    return frozenset(out)


# --------------------------------------------------------------------------
# Paths and caterpillars
# --------------------------------------------------------------------------


def longest_path(t: UnrootedTree) -> list:
    """A maximum-length leaf-to-leaf vertex path (the tree diameter)."""
    return diameter_path(t)


def _min_label_in_branch(t: UnrootedTree, avoid: int, start: int) -> int:
    best = None
    stack = [(avoid, start)]
    while stack:
        parent, v = stack.pop()
        if t.is_leaf_vertex(v):
            lab = t.leaf_label[v]
            best = lab if best is None else min(best, lab)
        else:
            stack.extend((v, w) for w in t.adj[v] if w != parent)
    return best


def max_caterpillar(t: UnrootedTree) -> frozenset:
    """Leaf set of a maximum caterpillar restriction: both endpoints of a
    diameter path plus the smallest leaf hanging off each internal path
    vertex."""
    path = diameter_path(t)
    onpath = set(path)
    labels = [t.leaf_label[path[0]], t.leaf_label[path[-1]]]
    for v in path[1:-1]:
        for w in t.adj[v]:
            if w not in onpath:
                labels.append(_min_label_in_branch(t, v, w))
    return frozenset(labels)


# --------------------------------------------------------------------------
# Longest monotone subsequence
# --------------------------------------------------------------------------


def _longest_increasing(seq):
    """Patience-style O(n log n) LIS with back pointers."""
    tails = []  # smallest tail value per length
    tail_pos = []  # index in seq of that tail
    prev = [None] * len(seq)
    for i, x in enumerate(seq):
        j = bisect_left(tails, x)
        if j == len(tails):
            tails.append(x)
            tail_pos.append(i)
        else:
            tails[j] = x
            tail_pos[j] = i
        if j > 0:
            prev[i] = tail_pos[j - 1]
    if not tail_pos:
        return []
    out = []
    i = tail_pos[-1]
    while i is not None:
        out.append(seq[i])
        i = prev[i]
    out.reverse()
    return out


def lis(seq):
    """Longest monotone subsequence of distinct integers.

    Returns (subsequence, direction); the longer of increasing/decreasing,
    increasing on ties.  Always at least ceil(sqrt(n)) long."""
    seq = list(seq)
    if len(set(seq)) != len(seq):
        raise ValueError("lis needs distinct values")
    inc = _longest_increasing(seq)
    dec = [-x for x in _longest_increasing([-x for x in seq])]
    if len(inc) >= len(dec):
        return inc, "increasing"
    return dec, "decreasing"


# --------------------------------------------------------------------------
# The balanced-or-path split
# --------------------------------------------------------------------------


@dataclass
class RamseyOutcome:
    """Either a balanced restriction meeting the phi threshold or a long
    path meeting the (log n)^psi threshold; one always exists for n > 2."""

    kind: str  # "balanced" or "path"
    leaves: frozenset
    height: int | None
    path_edges: int | None
    phi_value: float
    psi_value: float
    balanced_threshold: int
    path_threshold: int

    def meets_threshold(self) -> bool:
        if self.kind == "balanced":
            return self.height >= self.balanced_threshold
        return self.path_edges >= self.path_threshold

    def as_dict(self):
        return {
            "kind": self.kind,
            "leaves": sorted(self.leaves),
            "height": self.height,
            "path_edges": self.path_edges,
            "phi": self.phi_value,
            "psi": self.psi_value,
            "balanced_threshold": self.balanced_threshold,
            "path_threshold": self.path_threshold,
            "meets_threshold": self.meets_threshold(),
        }


def ramsey_split(t, a: float = 0.5, b: float = 0.5) -> RamseyOutcome:
    """Find a balanced restriction of height >= ceil(phi(n, a)) or report
    the maximum caterpillar around a longest path (guaranteed to have at
    least (log n)^psi(n, b) edges when no such balanced restriction
    exists)."""
    n = len(t.leaves)
    if n <= 2:
        raise TreeError("ramsey_split needs more than 2 leaves")
    if abs(a + b - 1) > 1e-12:
        raise ValueError("a + b must equal 1")
    phi_v = phi(n, a)
    psi_v = psi(n, b)
    bal_threshold = _ceil(phi_v)
    path_threshold = _ceil(math.log2(n) ** psi_v)
    rooted = t if isinstance(t, RootedTree) else root_at_leaf_edge(t)
    best_height = max_balanced_height(rooted)
    if best_height >= bal_threshold:
        leaves = extract_balanced(rooted, best_height)
        return RamseyOutcome(
            "balanced", leaves, best_height, None, phi_v, psi_v, bal_threshold, path_threshold
        )
    unrooted = t if isinstance(t, UnrootedTree) else unroot(t)
    path = diameter_path(unrooted)
    leaves = max_caterpillar(unrooted)
    return RamseyOutcome(
        "path", leaves, None, len(path) - 1, phi_v, psi_v, bal_threshold, path_threshold
    )


# --------------------------------------------------------------------------
# Caterpillar agreement
# --------------------------------------------------------------------------


def caterpillar_spine_order(t: UnrootedTree) -> list:
    """Leaf labels of a caterpillar in spine order.

    A spine order is unique only up to reversal and swapping the two leaves
    of each end cherry; the lexicographically smallest equivalent form is
    returned."""
    if not is_caterpillar(t):
        raise TreeError("not a caterpillar")
    path = diameter_path(t)
    onpath = set(path)
    order = [t.leaf_label[path[0]]]
    for v in path[1:-1]:
        for w in t.adj[v]:
            if w not in onpath:
                order.append(t.leaf_label[w])
    order.append(t.leaf_label[path[-1]])
    if len(order) == 3:
        return sorted(order)
    candidates = []
    for swap_front in (False, True):
        for swap_back in (False, True):
            cand = list(order)
            if swap_front:
                cand[0], cand[1] = cand[1], cand[0]
            if swap_back:
                cand[-1], cand[-2] = cand[-2], cand[-1]
            candidates.append(cand)
            candidates.append(cand[::-1])
    return min(candidates)


def _directed_min_labels(t: UnrootedTree) -> dict:
    """(u, v) -> smallest leaf label on the v side, for every direction."""
    mins = {}
    for u in t.adj:
        for v in t.adj[u]:
            stack = [(u, v)]
            while stack:
                key = stack[-1]
                if key in mins:
                    stack.pop()
                    continue
                a, w = key
                if t.is_leaf_vertex(w):
                    mins[key] = t.leaf_label[w]
                    stack.pop()
                    continue
                kids = [(w, x) for x in t.adj[w] if x != a]
                pending = [k for k in kids if k not in mins]
                if pending:
                    stack.extend(pending)
                    continue
                mins[key] = min(mins[k] for k in kids)
                stack.pop()
    return mins


def circular_leaf_order(t: UnrootedTree) -> list:
    """Leaves in the circular order of the canonical planar embedding, cut
    so the smallest label comes first.

    The embedding is a depth-first traversal from the vertex adjacent to
    the smallest leaf, visiting branches in order of their smallest label.
    """
    mins = _directed_min_labels(t)
    start_leaf = t.label_vertex[min(t.leaves)]
    top = t.adj[start_leaf][0]
    order = []
    stack = [(None, top)]
    while stack:
        parent, v = stack.pop()
        if t.is_leaf_vertex(v):
            order.append(t.leaf_label[v])
            continue
        kids = sorted(
            (w for w in t.adj[v] if w != parent), key=lambda w: mins[(v, w)]
        )
        stack.extend((v, w) for w in reversed(kids))
    cut = order.index(min(order))
    return order[cut:] + order[:cut]


def caterpillar_agree(t1: UnrootedTree, t2: UnrootedTree) -> frozenset:
    """Agreement of a caterpillar t1 with an arbitrary t2 on the same
    leaves; at least max(1, log2(n) / 3) leaves.

    Pipeline: read t1's spine order; linearise t2's circular leaf order;
    take the longest monotone subsequence X of the spine positions (at
    least sqrt n leaves); inside t2|X keep a maximum caterpillar Y (at
    least log |X| leaves); both restrictions to Y are caterpillars, and
    their exact agreement is computed by the unrooted oracle (cheap, since
    |Y| is logarithmic)."""
    if not is_caterpillar(t1):
        raise TreeError("caterpillar_agree requires a caterpillar first tree")
    if t1.leaves != t2.leaves:
        raise TreeError("caterpillar_agree requires identical leaf sets")
    spine = caterpillar_spine_order(t1)
    position = {lab: i for i, lab in enumerate(spine)}
    linear = circular_leaf_order(t2)
    subseq, _ = lis([position[lab] for lab in linear])
    X = frozenset(spine[p] for p in subseq)
    if len(X) < 3:
        return X  # up to three leaves agree trivially
    Y = max_caterpillar(restrict(t2, X))
    result = mast_unrooted(restrict(t1, Y), restrict(t2, Y))
    return result.witness


# --------------------------------------------------------------------------
# The general pipeline
# --------------------------------------------------------------------------

EXACT_CUTOFF = 64  # run the exact oracle as an extra attempt up to here


def agree_general(t1: UnrootedTree, t2: UnrootedTree):
    """Agreement of two arbitrary unrooted trees on the same n > 2 leaves.

    Tries the balanced-or-path split on each tree (matching a balanced
    restriction with match1, or a maximum caterpillar with
    caterpillar_agree), plus the exact oracle for n <= 64, and returns the
    largest valid result with its guarantee report."""
    if not isinstance(t1, UnrootedTree) or not isinstance(t2, UnrootedTree):
        raise TreeError("agree_general works on unrooted trees")
    if t1.leaves != t2.leaves:
        raise TreeError("agree_general requires identical leaf sets")
    n = t1.nleaves
    if n <= 2:
        raise TreeError("agree_general needs more than 2 leaves")
    delta_star = optimal_delta_match1()[0]
    attempts = []
    for first, second in ((t1, t2), (t2, t1)):
        outcome = ramsey_split(first, 0.5, 0.5)
        A = outcome.leaves
        if outcome.kind == "balanced":
            if len(A) < 3:
                attempts.append(frozenset(A))
                continue
            balanced_first = restrict(root_at_leaf_edge(first), A)
            rooted_second = root_at_leaf_edge(restrict(second, A))
            leaves, _ = match1(balanced_first, rooted_second, delta_star)
            attempts.append(frozenset(leaves))
        else:
            attempts.append(caterpillar_agree(restrict(first, A), restrict(second, A)))
    if n <= EXACT_CUTOFF:
        attempts.append(mast_unrooted(t1, t2).witness)
    best = min(attempts, key=lambda X: (-len(X), tuple(sorted(X))))
    verify_agreement(t1, t2, best)
    report = GuaranteeReport(
        "agree", clamp(general_bound(n)), len(best), params={"n": n, "delta": delta_star}
    )
    return best, report
