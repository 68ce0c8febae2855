"""Guarantee-certified greedy agreement matchers.

``match1`` matches a balanced rooted tree against an arbitrary rooted tree
and returns a caterpillar-shaped agreement of at least
max(1, match1_bound(m, t, delta)) leaves.  ``match2`` matches two balanced
rooted trees and returns an agreement of at least
max(1, match2_bound(m1, m2, t, delta)) leaves.  Both emit traces from which
the per-step shrink inequalities of their analyses can be re-checked.

Unrooted wrappers reduce edge-centered (class B) and vertex-centered
(class C) balanced trees to the rooted algorithms, and the almost-balanced
entry point embeds small-radius trees into balanced ones by padding with
reserved dummy labels (> 10^9) that can never appear in any output.

Every "choose any leaf" step picks the smallest label, and every "swap if
necessary" performs no swap when the required inequalities already hold, so
runs are exactly reproducible.
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, field

from .bounds import (
    BETA_DELTA_SUP,
    delta_for_alpha_k,
    delta_for_beta_k,
    optimal_delta_match1,
    optimal_delta_match2,
)
from .treecore import (
    CLASS_B,
    CLASS_C,
    RootedTree,
    TreeError,
    UnrootedTree,
    center,
    classify_balanced,
    radius,
    root_at_edge,
    root_at_leaf_edge,
)
from .treeops import restrict

logger = logging.getLogger(__name__)

DUMMY_LABEL_BASE = 10**9
_PAD_HEIGHT_GUARD = 21  # padded trees materialise 2^height leaves


def _orient(u: RootedTree, v: RootedTree):
    """Swap children (virtually) so that the cross counts do not exceed the
    diagonal counts and t_ll <= t_rr; no swap when already admissible.

    Returns ((u_left, u_right, v_left, v_right), (t_ll, t_lr, t_rl, t_rr)).
    """
    ku = (u.left, u.right)
    kv = (v.left, v.right)
    c = [[len(ku[i].leaves & kv[j].leaves) for j in (0, 1)] for i in (0, 1)]
    for su, sv in ((0, 0), (0, 1), (1, 0), (1, 1)):
        t_ll = c[su][sv]
        t_lr = c[su][1 - sv]
        t_rl = c[1 - su][sv]
        t_rr = c[1 - su][1 - sv]
        if t_lr + t_rl <= t_ll + t_rr and t_ll <= t_rr:
            return (ku[su], ku[1 - su], kv[sv], kv[1 - sv]), (t_ll, t_lr, t_rl, t_rr)
    raise AssertionError("some orientation always satisfies both inequalities")


# --------------------------------------------------------------------------
# match1: one balanced tree vs an arbitrary tree
# --------------------------------------------------------------------------


@dataclass
class Match1Step:
    rule: str  # base | case1 | skip-left | skip-right | cross | heavy
    t: int  # shared-leaf count at this call
    u_size: int
    v_size: int
    emitted: int | None = None

    def as_dict(self):
        return {
            "rule": self.rule,
            "t": self.t,
            "u_size": self.u_size,
            "v_size": self.v_size,
            "emitted": self.emitted,
        }


@dataclass
class Match1Trace:
    """Single-path recursion record.

    The emitted-leaf count is (#case1 + #cross + 1), and the shrink factors
    per rule are: case1 >= 1/4, cross >= delta/2, heavy > 1-delta, with the
    two skip rules keeping t unchanged.
    """

    delta: float
    m: int
    t0: int
    steps: list = field(default_factory=list)

    def counts(self) -> dict:
        out = {"base": 0, "case1": 0, "skip-left": 0, "skip-right": 0, "cross": 0, "heavy": 0}
        for s in self.steps:
            out[s.rule] += 1
        return out

    def product_lower_bound(self) -> float:
        c = self.counts()
        return (
            self.t0
            * 0.25 ** c["case1"]
            * (self.delta / 2) ** c["cross"]
            * (1 - self.delta) ** c["heavy"]
        )

    def check_product_inequality(self, slack: float = 1e-9) -> bool:
        """Final-call t against t0 * (1/4)^a * (delta/2)^d * (1-delta)^e."""
        return self.steps[-1].t >= self.product_lower_bound() - slack


def match1(t1: RootedTree, t2: RootedTree, delta: float):
    """Greedy agreement of a balanced t1 against t2 with L(t2) <= L(t1).

    Walks one root-to-base path, emitting one leaf per "case1" step (both
    left pairs share a leaf) and per "cross" step (the antidiagonal carries
    at least a delta fraction), descending into the heavy diagonal
    otherwise.  Returns (leaf set, trace); the restriction of either tree to
    the leaf set is a caterpillar.
    """
    if not isinstance(t1, RootedTree) or not isinstance(t2, RootedTree):
        raise TreeError("match1 needs two rooted trees")
    if not t1.balanced:
        raise TreeError("match1 requires the first tree to be balanced")
    if not t2.leaves <= t1.leaves:
        raise TreeError("match1 requires L(t2) to be a subset of L(t1)")
    if not 0 < delta < 0.5:
        raise ValueError(f"match1 needs delta in (0, 1/2), got {delta}")
    trace = Match1Trace(delta, t1.height, t2.nleaves)
    out = []
    u, v = t1, t2
    while True:
        shared = u.leaves & v.leaves
        t_uv = len(shared)
        if t_uv == 0:
            raise AssertionError("recursed into an empty intersection")
        if u.nleaves == 1 or v.nleaves == 1:
            z = min(shared)
            trace.steps.append(Match1Step("base", t_uv, u.nleaves, v.nleaves, z))
            out.append(z)
            break
        (ul, ur, vl, vr), (t_ll, t_lr, t_rl, t_rr) = _orient(u, v)
        if t_ll > 0:
            z = min(ul.leaves & vl.leaves)
            trace.steps.append(Match1Step("case1", t_uv, u.nleaves, v.nleaves, z))
            out.append(z)
            u, v = ur, vr
            continue
        if t_rl == 0:
            # nothing under v's left child is shared with u
            trace.steps.append(Match1Step("skip-left", t_uv, u.nleaves, v.nleaves))
            v = vr
            continue
        if t_lr == 0:
            # nothing under u's left child is shared with v
            trace.steps.append(Match1Step("skip-right", t_uv, u.nleaves, v.nleaves))
            u = ur
            continue
        if t_lr + t_rl >= delta * t_uv:
            if t_lr > t_rl:
                ul, ur, vl, vr = ur, ul, vr, vl
                t_lr, t_rl = t_rl, t_lr
            z = min(ul.leaves & vr.leaves)
            trace.steps.append(Match1Step("cross", t_uv, u.nleaves, v.nleaves, z))
            out.append(z)
            u, v = ur, vl
            continue
        trace.steps.append(Match1Step("heavy", t_uv, u.nleaves, v.nleaves))
        u, v = ur, vr
    return frozenset(out), trace


# --------------------------------------------------------------------------
# match2: two balanced trees
# --------------------------------------------------------------------------


@dataclass
class Match2Node:
    rule: str  # base | diag | anti | shrink | skip1 | skip2
    t: int
    u_size: int
    v_size: int
    emitted: int | None = None
    children: tuple = ()

    def as_dict(self):
        return {
            "rule": self.rule,
            "t": self.t,
            "u_size": self.u_size,
            "v_size": self.v_size,
            "emitted": self.emitted,
            "children": [c.as_dict() for c in self.children],
        }


@dataclass
class Match2Trace:
    """The recursion-call tree.  ``diag``/``anti`` branch into two calls
    with t >= delta * t_parent each; ``shrink`` keeps one call with
    t > (1-3 delta) t_parent; ``skip1``/``skip2`` keep one call with
    t > (1-2 delta) t_parent and descend only one tree."""

    delta: float
    m1: int
    m2: int
    t0: int
    root: Match2Node = None

    def paths(self):
        """Yield every root-to-leaf path as a list of nodes."""
        path = []

        def walk(node):
            path.append(node)
            if not node.children:
                yield list(path)
            for child in node.children:
                yield from walk(child)
            path.pop()

        yield from walk(self.root)

    def leaf_count(self) -> int:
        total = 0
        stack = [self.root]
        while stack:
            node = stack.pop()
            if node.children:
                stack.extend(node.children)
            else:
                total += 1
        return total

    def min_branch_depth(self) -> int:
        """Minimum number of branching (diag/anti) steps over all paths."""
        best = None
        for path in self.paths():
            branches = sum(1 for nd in path if nd.rule in ("diag", "anti"))
            best = branches if best is None else min(best, branches)
        return best

    def check_path_bounds(self, slack: float = 1e-9) -> bool:
        """Per-step shrink factors and the 2m step budget, on every path."""
        d = self.delta
        factor = {"diag": d, "anti": d, "shrink": 1 - 3 * d, "skip1": 1 - 2 * d, "skip2": 1 - 2 * d}
        for path in self.paths():
            if len(path) - 1 > self.m1 + self.m2:
                return False
            for parent, child in zip(path, path[1:]):
                if child.t < factor[parent.rule] * parent.t - slack:
                    return False
        return True


def match2(t1: RootedTree, t2: RootedTree, delta: float):
    """Greedy agreement of two balanced rooted trees sharing t > 0 leaves.

    Branches into both child pairs whenever both the diagonal (or both the
    antidiagonal) pairs carry at least a delta fraction of the shared
    leaves; otherwise discards sub-delta sides.  Returns (leaf set, trace).
    """
    if not isinstance(t1, RootedTree) or not isinstance(t2, RootedTree):
        raise TreeError("match2 needs two rooted trees")
    if not (t1.balanced and t2.balanced):
        raise TreeError("match2 requires both trees to be balanced")
    if not 0 < delta < 0.25:
        raise ValueError(f"match2 needs delta in (0, 1/4), got {delta}")
    t0 = len(t1.leaves & t2.leaves)
    if t0 == 0:
        raise TreeError("match2 requires a nonempty shared leaf set")
    trace = Match2Trace(delta, t1.height, t2.height, t0)

    def rec(u, v):
        shared = u.leaves & v.leaves
        t_uv = len(shared)
        if t_uv == 0:
            raise AssertionError("recursed into an empty intersection")
        if u.nleaves == 1 or v.nleaves == 1:
            z = min(shared)
            return {z}, Match2Node("base", t_uv, u.nleaves, v.nleaves, z)
        (ul, ur, vl, vr), (t_ll, t_lr, t_rl, t_rr) = _orient(u, v)
        need = delta * t_uv
        if t_ll >= need and t_rr >= need:
            xl, nl = rec(ul, vl)
            xr, nr = rec(ur, vr)
            return xl | xr, Match2Node("diag", t_uv, u.nleaves, v.nleaves, None, (nl, nr))
        if t_lr >= need and t_rl >= need:
            xl, nl = rec(ul, vr)
            xr, nr = rec(ur, vl)
            return xl | xr, Match2Node("anti", t_uv, u.nleaves, v.nleaves, None, (nl, nr))
        if t_lr < need and t_rl < need:
            x, child = rec(ur, vr)
            return x, Match2Node("shrink", t_uv, u.nleaves, v.nleaves, None, (child,))
        if t_lr < need:  # t_rl >= need: drop u's left side only
            x, child = rec(ur, v)
            return x, Match2Node("skip1", t_uv, u.nleaves, v.nleaves, None, (child,))
        x, child = rec(u, vr)  # t_rl < need <= t_lr: drop v's left side only
        return x, Match2Node("skip2", t_uv, u.nleaves, v.nleaves, None, (child,))

    leaves, root = rec(t1, t2)
    trace.root = root
    return frozenset(leaves), trace


# --------------------------------------------------------------------------
# Padding for almost-balanced trees
# --------------------------------------------------------------------------


def pad_to_balanced(
    t: RootedTree, target_height: int, dummy_start: int = DUMMY_LABEL_BASE + 1
) -> RootedTree:
    """Balanced supertree of height ``target_height`` containing ``t`` as a
    subtree; added leaves take fresh labels from the reserved dummy range.

    The result materialises 2^target_height leaves, so the height is capped
    at 21 (about two million leaves)."""
    if target_height < t.height:
        raise ValueError(
            f"target height {target_height} is below the tree height {t.height}"
        )
    if target_height > _PAD_HEIGHT_GUARD:
        raise ValueError(
            f"padding to height {target_height} would materialise "
            f"2^{target_height} leaves (guard is {_PAD_HEIGHT_GUARD})"
        )
    counter = itertools.count(dummy_start)

    def dummy(h):
        if h == 0:
            return RootedTree.leaf(next(counter))
        return RootedTree.branch(dummy(h - 1), dummy(h - 1))

    def rec(node, h):
        if node.is_leaf:
            if h == 0:
                return node
            return RootedTree.branch(rec(node, h - 1), dummy(h - 1))
        return RootedTree.branch(rec(node.left, h - 1), rec(node.right, h - 1))

    return rec(t, target_height)


def strip_dummies(labels) -> frozenset:
    return frozenset(x for x in labels if x <= DUMMY_LABEL_BASE)


# --------------------------------------------------------------------------
# Unrooted wrappers
# --------------------------------------------------------------------------


def _branch_leaves(t: UnrootedTree, avoid: int, start: int) -> frozenset:
    """Leaf labels in the branch entered via ``start`` when coming from
    ``avoid``."""
    out = []
    stack = [(avoid, start)]
    while stack:
        parent, v = stack.pop()
        if t.is_leaf_vertex(v):
            out.append(t.leaf_label[v])
        else:
            stack.extend((v, w) for w in t.adj[v] if w != parent)
    return frozenset(out)


def _center_branches(t: UnrootedTree):
    """(center vertex, branches) for a vertex-centered tree; branches are
    (neighbour, leaf set) sorted by smallest leaf label."""
    (z,) = center(t)
    branches = [(w, _branch_leaves(t, z, w)) for w in t.adj[z]]
    branches.sort(key=lambda item: min(item[1]))
    return z, branches


def _central_edge(t: UnrootedTree):
    c = center(t)
    if len(c) != 2:
        raise TreeError("tree has a vertex center, not a central edge")
    return tuple(sorted(c))


def match1_unrooted(t1: UnrootedTree, t2: UnrootedTree, delta: float) -> frozenset:
    """One-balanced matching for unrooted trees.

    Edge-centered t1: root t1 at its central edge and t2 at the pendant
    edge of leaf min(L); run match1.  Vertex-centered t1: drop the branch
    whose leaf set has the largest minimum label, restrict both trees to
    the remaining leaves (now edge-centered), and proceed as above.
    """
    cls = classify_balanced(t1)
    if cls.kind not in (CLASS_B, CLASS_C):
        raise TreeError("match1_unrooted requires a balanced unrooted first tree")
    if t1.leaves != t2.leaves:
        raise TreeError("match1_unrooted requires identical leaf sets")
    if cls.kind == CLASS_C:
        if cls.m == 1:
            return frozenset(t1.leaves)  # 3 leaves: the unique topology
        _, branches = _center_branches(t1)
        drop = max(branches, key=lambda item: min(item[1]))
        keep = t1.leaves - drop[1]
        return match1_unrooted(restrict(t1, keep), restrict(t2, keep), delta)
    r1 = root_at_edge(t1, _central_edge(t1))
    r2 = root_at_leaf_edge(t2)
    leaves, _ = match1(r1, r2, delta)
    return leaves


def class_c_prunings(t1: UnrootedTree, t2: UnrootedTree):
    """Leaf sets (X, Y) after deleting one center branch from each
    vertex-centered tree, chosen to maximise |X & Y| over the 3x3 choices
    (ties toward the branch pair with the smallest minimum labels)."""
    _, branches1 = _center_branches(t1)
    _, branches2 = _center_branches(t2)
    best = None
    for _, b1 in branches1:
        for _, b2 in branches2:
            overlap = len(b1 & b2)
            if best is None or overlap > best[0]:
                best = (overlap, b1, b2)
    return t1.leaves - best[1], t2.leaves - best[2]


def match2_unrooted(t1: UnrootedTree, t2: UnrootedTree, delta: float) -> frozenset:
    """Two-balanced matching for unrooted trees of the same balance class.

    Edge-centered: root both at their central edges and run match2.
    Vertex-centered: delete one center branch from each (maximising the
    remaining overlap, which is always at least 2^(m+1)/3), root the pruned
    trees at their centers, and run match2 on those.
    """
    c1 = classify_balanced(t1)
    c2 = classify_balanced(t2)
    if c1.kind not in (CLASS_B, CLASS_C) or c1 != c2:
        raise TreeError(
            f"match2_unrooted requires two balanced unrooted trees of the same "
            f"class, got {c1} and {c2}"
        )
    if t1.leaves != t2.leaves:
        raise TreeError("match2_unrooted requires identical leaf sets")
    if c1.kind == CLASS_B:
        r1 = root_at_edge(t1, _central_edge(t1))
        r2 = root_at_edge(t2, _central_edge(t2))
        leaves, _ = match2(r1, r2, delta)
        return leaves
    if c1.m == 1:
        return frozenset(t1.leaves)  # 3 leaves: the unique topology
    X, Y = class_c_prunings(t1, t2)
    pruned1 = restrict(t1, X)
    pruned2 = restrict(t2, Y)
    r1 = root_at_edge(pruned1, _central_edge(pruned1))
    r2 = root_at_edge(pruned2, _central_edge(pruned2))
    leaves, _ = match2(r1, r2, delta)
    return leaves


def match2_multi(trees, delta: float) -> frozenset:
    """Iterated matching of 2 or more equal-height balanced rooted trees.

    Match the first two; inside the agreement keep its largest balanced
    restriction (one leaf per deepest-level subtree; at full overlap this
    is at least ceil(beta * m) high); match that against the third; and so
    on.  If an intermediate shared leaf set empties, the best prefix result
    is returned and a warning logged.  The final set is a pairwise
    agreement of every input."""
    from .decompose import extract_balanced, max_balanced_height

    trees = list(trees)
    if len(trees) < 2:
        raise TreeError("match2_multi needs at least two trees")
    heights = {t.height for t in trees}
    if len(heights) != 1 or not all(t.balanced for t in trees):
        raise TreeError("match2_multi requires balanced rooted trees of equal height")
    if not 0 < delta < BETA_DELTA_SUP:
        raise ValueError(
            f"match2_multi needs delta in (0, {BETA_DELTA_SUP:.6f}) so that the "
            f"guaranteed extraction depth beta*m is positive, got {delta}"
        )
    leaves, _ = match2(trees[0], trees[1], delta)
    cur = restrict(trees[0], leaves)
    for pos, nxt in enumerate(trees[2:], start=2):
        kept = extract_balanced(cur, max_balanced_height(cur))
        cur_bal = restrict(cur, kept)
        if not cur_bal.leaves & nxt.leaves:
            logger.warning(
                "match2_multi: empty intersection with tree %d; "
                "returning the agreement of the first %d trees",
                pos,
                pos,
            )
            return frozenset(cur.leaves)
        leaves, _ = match2(cur_bal, nxt, delta)
        cur = restrict(cur_bal, leaves)
    return frozenset(cur.leaves)


# --------------------------------------------------------------------------
# Almost-balanced trees
# --------------------------------------------------------------------------


def _root_near_center(t: UnrootedTree) -> RootedTree:
    """Root at the central edge, or (vertex center) at the center edge
    leading toward the smallest leaf; height <= radius + 1."""
    c = center(t)
    if len(c) == 2:
        return root_at_edge(t, tuple(sorted(c)))
    (z,) = c
    w = min(t.adj[z], key=lambda w: min(_branch_leaves(t, z, w)))
    return root_at_edge(t, (z, w))


def match_almost_balanced(
    t1: UnrootedTree,
    t2: UnrootedTree,
    k: float,
    delta: float | None = None,
    mode: str = "auto",
) -> frozenset:
    """Matching for small-radius ("almost balanced") unrooted trees.

    mode "single" (radius(t1) <= k log n - 1): root t1 near its center, pad
    to a balanced tree of height ceil(k log n), root t2 arbitrarily, and run
    match1; guarantees alpha_k log n leaves.  mode "both" (both radii
    <= k log n): pad both and run match2; guarantees n^beta_k leaves.  mode
    "auto" picks "both" when both radii allow it.  Dummy padding labels are
    never emitted (they occur in only one tree)."""
    if t1.leaves != t2.leaves:
        raise TreeError("match_almost_balanced requires identical leaf sets")
    n = t1.nleaves
    logn = math.log2(n)
    r1 = radius(t1)
    r2 = radius(t2)
    if mode == "auto":
        mode = "both" if (r1 <= k * logn and r2 <= k * logn) else "single"
    if mode == "single":
        if r1 > k * logn - 1:
            raise TreeError(
                f"radius {r1} exceeds k log n - 1 = {k * logn - 1:.3f}"
            )
        if delta is None:
            delta = delta_for_alpha_k(k)
        target = math.ceil(k * logn)
        padded = pad_to_balanced(_root_near_center(t1), max(target, 0))
        leaves, _ = match1(padded, root_at_leaf_edge(t2), delta)
        out = strip_dummies(leaves)
        if len(out) != len(leaves):
            raise AssertionError("dummy labels can never be part of an agreement")
        return out
    if mode != "both":
        raise ValueError(f"mode must be auto, single, or both, got {mode!r}")
    if r1 > k * logn or r2 > k * logn:
        raise TreeError(
            f"radii ({r1}, {r2}) exceed k log n = {k * logn:.3f}"
        )
    if delta is None:
        delta = delta_for_beta_k(k)
    ra = _root_near_center(t1)
    rb = _root_near_center(t2)
    target = max(math.ceil(k * logn), ra.height, rb.height)
    pa = pad_to_balanced(ra, target, dummy_start=DUMMY_LABEL_BASE + 1)
    pb = pad_to_balanced(rb, target, dummy_start=2 * DUMMY_LABEL_BASE + 1)
    leaves, _ = match2(pa, pb, delta)
    out = strip_dummies(leaves)
    if len(out) != len(leaves):
        raise AssertionError("dummy labels can never be part of an agreement")
    return out


def default_delta(algorithm: str) -> float:
    """The numerically optimal delta for a matcher family."""
    if algorithm == "match1":
        return optimal_delta_match1()[0]
    if algorithm == "match2":
        return optimal_delta_match2()[0]
    raise ValueError(f"no default delta for {algorithm!r}")
