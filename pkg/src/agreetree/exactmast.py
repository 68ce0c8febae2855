"""Ground-truth maximum-agreement computation.

``mast_rooted`` is the O(|T1|*|T2|)-state dynamic program over node pairs;
``mast_unrooted`` maximises the rooted value over all pairs of rootings,
sharing subproblems across rootings through tables indexed by directed
edges (each directed edge of an unrooted tree names the pending rooted
subtree on its far side).  ``mast_bruteforce`` is the independent
subset-enumeration oracle used to validate both.  These are oracles, not
performance-tuned algorithms; they are exact and fast enough at desk scale.

Witnesses are deterministic: DP ties are broken toward the candidate with
the lexicographically smallest sorted leaf tuple, and the unrooted search
takes the first maximising rooting pair in canonical edge order.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from .generators import enumerate_topologies, guards_lifted
from .treecore import RootedTree, UnrootedTree, postorder, root_at_edge
from .treeops import AgreementCertificate, clusters, restrict, splits, verify_agreement

BRUTEFORCE_GUARD = 12
FLOOR_GUARD = 6


@dataclass
class MastResult:
    size: int
    witness: frozenset
    certificate: AgreementCertificate


def _merge(a: tuple, b: tuple) -> tuple:
    return tuple(sorted(a + b))


def _pick(candidates):
    """Largest witness; ties toward the lexicographically smallest tuple."""
    return min(candidates, key=lambda w: (-len(w), w))


def mast_rooted(t1: RootedTree, t2: RootedTree) -> MastResult:
    """Exact rooted MAST with a reconstructed witness leaf set."""
    common = t1.leaves & t2.leaves
    if not common:
        return MastResult(0, frozenset(), AgreementCertificate(frozenset(), ""))
    nodes1 = postorder(t1)
    nodes2 = postorder(t2)
    idx1 = {id(u): i for i, u in enumerate(nodes1)}
    idx2 = {id(v): j for j, v in enumerate(nodes2)}
    W = [[()] * len(nodes2) for _ in nodes1]
    for i, u in enumerate(nodes1):
        row = W[i]
        for j, v in enumerate(nodes2):
            if u.is_leaf:
                row[j] = (u.label,) if u.label in v.leaves else ()
            elif v.is_leaf:
                row[j] = (v.label,) if v.label in u.leaves else ()
            else:
                li, ri = idx1[id(u.left)], idx1[id(u.right)]
                lj, rj = idx2[id(v.left)], idx2[id(v.right)]
                row[j] = _pick(
                    (
                        _merge(W[li][lj], W[ri][rj]),
                        _merge(W[li][rj], W[ri][lj]),
                        row[lj],
                        row[rj],
                        W[li][j],
                        W[ri][j],
                    )
                )
    best = W[-1][-1]
    witness = frozenset(best)
    return MastResult(len(best), witness, verify_agreement(t1, t2, witness))


def _rooted_size(t1: RootedTree, t2: RootedTree) -> int:
    """Size-only rooted DP (no witness bookkeeping)."""
    nodes1 = postorder(t1)
    nodes2 = postorder(t2)
    idx1 = {id(u): i for i, u in enumerate(nodes1)}
    idx2 = {id(v): j for j, v in enumerate(nodes2)}
    M = [[0] * len(nodes2) for _ in nodes1]
    for i, u in enumerate(nodes1):
        row = M[i]
        for j, v in enumerate(nodes2):
            if u.is_leaf:
                row[j] = 1 if u.label in v.leaves else 0
            elif v.is_leaf:
                row[j] = 1 if v.label in u.leaves else 0
            else:
                li, ri = idx1[id(u.left)], idx1[id(u.right)]
                lj, rj = idx2[id(v.left)], idx2[id(v.right)]
                row[j] = max(
                    M[li][lj] + M[ri][rj],
                    M[li][rj] + M[ri][lj],
                    row[lj],
                    row[rj],
                    M[li][j],
                    M[ri][j],
                )
    return M[-1][-1]


# --------------------------------------------------------------------------
# Unrooted MAST via all rootings, with shared directed-edge tables
# --------------------------------------------------------------------------


class _Directed:
    """Directed-edge view of an unrooted tree: entry i is the rooted subtree
    hanging below directed edge dirs[i] = (u, v) (on the v side)."""

    def __init__(self, t: UnrootedTree):
        self.tree = t
        self.dirs = []
        self.index = {}
        for u in sorted(t.adj):
            for v in t.adj[u]:
                self.index[(u, v)] = len(self.dirs)
                self.dirs.append((u, v))
        self.children = []
        self.label = []
        for u, v in self.dirs:
            if t.is_leaf_vertex(v):
                self.children.append(())
                self.label.append(t.leaf_label[v])
            else:
                self.children.append(
                    tuple(self.index[(v, w)] for w in t.adj[v] if w != u)
                )
                self.label.append(None)
        # Bottom-up processing order (children before parents).
        self.order = []
        done = [False] * len(self.dirs)
        for start in range(len(self.dirs)):
            stack = [start]
            while stack:
                i = stack[-1]
                if done[i]:
                    stack.pop()
                    continue
                pending = [c for c in self.children[i] if not done[c]]
                if pending:
                    stack.extend(pending)
                else:
                    done[i] = True
                    self.order.append(i)
                    stack.pop()
        self.leafset = [None] * len(self.dirs)
        for i in self.order:
            if self.label[i] is not None:
                self.leafset[i] = frozenset((self.label[i],))
            else:
                a, b = self.children[i]
                self.leafset[i] = self.leafset[a] | self.leafset[b]

    def edge_sides(self, edge):
        """Directed indices (side of u, side of v) for undirected (u, v)."""
        u, v = edge
        return self.index[(v, u)], self.index[(u, v)]


def _pairwise_table(d1: _Directed, d2: _Directed):
    """M[i][j] = rooted MAST size of pending subtree i (of T1) vs j (of T2)."""
    M = [[0] * len(d2.dirs) for _ in d1.dirs]
    for i in d1.order:
        row = M[i]
        lab1 = d1.label[i]
        for j in d2.order:
            if lab1 is not None:
                row[j] = 1 if lab1 in d2.leafset[j] else 0
            elif d2.label[j] is not None:
                row[j] = 1 if d2.label[j] in d1.leafset[i] else 0
            else:
                a1, b1 = d1.children[i]
                a2, b2 = d2.children[j]
                row[j] = max(
                    M[a1][a2] + M[b1][b2],
                    M[a1][b2] + M[b1][a2],
                    row[a2],
                    row[b2],
                    M[a1][j],
                    M[b1][j],
                )
    return M


def _whole_vs_dirs(A, B, M, other: _Directed, own_leaves):
    """g[j] = rooted MAST of (whole tree rooted with child sides A, B) vs
    pending subtree j of the other tree."""
    g = [0] * len(other.dirs)
    for j in other.order:
        if other.label[j] is not None:
            g[j] = 1 if other.label[j] in own_leaves else 0
        else:
            a2, b2 = other.children[j]
            g[j] = max(
                M[A][a2] + M[B][b2],
                M[A][b2] + M[B][a2],
                g[a2],
                g[b2],
                M[A][j],
                M[B][j],
            )
    return g


def _unrooted_best_rooting(t1: UnrootedTree, t2: UnrootedTree):
    """(value, best edge of t1, best edge of t2), deterministic."""
    d1 = _Directed(t1)
    d2 = _Directed(t2)
    M = _pairwise_table(d1, d2)
    Mt = [[M[i][j] for i in range(len(d1.dirs))] for j in range(len(d2.dirs))]
    edges1 = t1.edges()
    edges2 = t2.edges()
    sides2 = [d2.edge_sides(e) for e in edges2]
    g2 = [
        _whole_vs_dirs(A2, B2, Mt, d1, t2.leaves) for (A2, B2) in sides2
    ]
    cap = len(t1.leaves & t2.leaves)
    best_val, best_pair = -1, None
    for e1 in edges1:
        A1, B1 = d1.edge_sides(e1)
        g1 = _whole_vs_dirs(A1, B1, M, d2, t1.leaves)
        for k2, e2 in enumerate(edges2):
            A2, B2 = sides2[k2]
            val = max(
                M[A1][A2] + M[B1][B2],
                M[A1][B2] + M[B1][A2],
                g1[A2],
                g1[B2],
                g2[k2][A1],
                g2[k2][B1],
            )
            if val > best_val:
                best_val, best_pair = val, (e1, e2)
                if best_val == cap:
                    return best_val, best_pair[0], best_pair[1]
    return best_val, best_pair[0], best_pair[1]


def mast_unrooted(t1: UnrootedTree, t2: UnrootedTree) -> MastResult:
    """Exact unrooted MAST: the maximum rooted MAST over all pairs of edge
    rootings, with the witness taken from the first maximising pair."""
    common = t1.leaves & t2.leaves
    if not common:
        return MastResult(0, frozenset(), AgreementCertificate(frozenset(), ""))
    value, e1, e2 = _unrooted_best_rooting(t1, t2)
    rooted = mast_rooted(root_at_edge(t1, e1), root_at_edge(t2, e2))
    if rooted.size != value:
        raise AssertionError(
            f"rooting sweep found {value} but the witness DP returned {rooted.size}"
        )
    witness = rooted.witness
    return MastResult(value, witness, verify_agreement(t1, t2, witness))


def _unrooted_size(t1: UnrootedTree, t2: UnrootedTree) -> int:
    if not (t1.leaves & t2.leaves):
        return 0
    return _unrooted_best_rooting(t1, t2)[0]


# --------------------------------------------------------------------------
# Brute-force oracle and the minimum over topology pairs
# --------------------------------------------------------------------------


def _agrees(t1, t2, X) -> bool:
    if isinstance(t1, RootedTree):
        return clusters(restrict(t1, X)) == clusters(restrict(t2, X))
    return splits(restrict(t1, X)) == splits(restrict(t2, X))


def mast_bruteforce(t1, t2, force: bool = False) -> int:
    """Subset-enumeration MAST (descending size, early exit); guarded to at
    most 12 shared leaves."""
    common = sorted(t1.leaves & t2.leaves)
    if len(common) > BRUTEFORCE_GUARD and not force and not guards_lifted():
        raise ValueError(
            f"{len(common)} shared leaves exceeds the brute-force guard "
            f"({BRUTEFORCE_GUARD}); pass force=True or set AGREETREE_GUARDS=off"
        )
    # Any 2 shared leaves agree rooted; any 3 agree unrooted.
    trivial = 2 if isinstance(t1, RootedTree) else 3
    for size in range(len(common), trivial, -1):
        for X in combinations(common, size):
            if _agrees(t1, t2, X):
                return size
    return min(len(common), trivial)


def mast_floor(n: int, rooted: bool = False, force: bool = False) -> int:
    """Exact min of MAST over all pairs of topologies on leaves 1..n."""
    if n > FLOOR_GUARD and not force and not guards_lifted():
        raise ValueError(
            f"mast_floor guard is n <= {FLOOR_GUARD}; "
            "pass force=True or set AGREETREE_GUARDS=off"
        )
    tops = list(enumerate_topologies(n, rooted=rooted, force=force))
    size_fn = _rooted_size if rooted else _unrooted_size
    best = n
    for i in range(len(tops)):
        for j in range(i + 1, len(tops)):
            best = min(best, size_fn(tops[i], tops[j]))
            if best <= (2 if rooted else 3):
                return best  # cannot go lower: small subsets agree trivially
    return best
