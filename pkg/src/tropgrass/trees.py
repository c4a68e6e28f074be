"""Phylogenetic trees with exact rational edge weights.

Trees are unrooted, carry leaf labels 1..n, and have no degree-two internal
vertices. Distance vectors use the max-plus (log) convention shared with the
Grassmannian module: the four-point condition asks that the maximum of the
three quartet pairing sums is attained at least twice.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import combinations

from .arith import as_fraction
from .errors import FourPointViolation, InvalidTree, ReconstructionError

DEGENERATE = "DEGENERATE"


def iter_pairs(n):
    """Ordered pairs (i, j), 1 <= i < j <= n, in lexicographic order."""
    return combinations(range(1, n + 1), 2)


def pair_index(n, i, j):
    if i > j:
        i, j = j, i
    if not (1 <= i < j <= n):
        raise IndexError(f"pair ({i},{j}) out of range for n={n}")
    return (i - 1) * n - i * (i + 1) // 2 + j - 1


@dataclass(frozen=True)
class DistVector:
    """Pairwise leaf distances, stored for i < j in lexicographic order."""

    n: int
    entries: tuple

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("need at least one leaf")
        ent = tuple(as_fraction(v) for v in self.entries)
        want = self.n * (self.n - 1) // 2
        if len(ent) != want:
            raise ValueError(f"expected {want} entries, got {len(ent)}")
        object.__setattr__(self, "entries", ent)

    @classmethod
    def from_map(cls, n, mapping):
        ent = []
        for i, j in iter_pairs(n):
            if (i, j) in mapping:
                ent.append(mapping[(i, j)])
            elif (j, i) in mapping:
                ent.append(mapping[(j, i)])
            else:
                raise ValueError(f"missing entry for pair ({i},{j})")
        return cls(n, tuple(ent))

    def __getitem__(self, pair):
        i, j = pair
        return self.entries[pair_index(self.n, i, j)]

    def items(self):
        return zip(iter_pairs(self.n), self.entries)

    def replace(self, pair, value):
        idx = pair_index(self.n, *pair)
        ent = list(self.entries)
        ent[idx] = as_fraction(value)
        return DistVector(self.n, tuple(ent))


@dataclass(frozen=True)
class PhyloTree:
    """Unrooted weighted tree; leaves[k] is the node carrying label k+1.

    Internal edge weights must be nonnegative; leaf edge weights may be any
    rational. Edges are canonicalized to (min, max, weight) and sorted.
    """

    n: int
    edges: tuple
    leaves: tuple

    def __post_init__(self):
        if self.n < 1:
            raise InvalidTree("need at least one leaf")
        leaves = tuple(int(v) for v in self.leaves)
        if len(leaves) != self.n or len(set(leaves)) != self.n:
            raise InvalidTree("leaves must name one distinct node per label")
        edges = []
        seen_pairs = set()
        for a, b, w in self.edges:
            a, b = int(a), int(b)
            if a == b:
                raise InvalidTree("self-loop edge")
            if a > b:
                a, b = b, a
            if (a, b) in seen_pairs:
                raise InvalidTree(f"duplicate edge ({a},{b})")
            seen_pairs.add((a, b))
            edges.append((a, b, as_fraction(w)))
        edges.sort(key=lambda e: (e[0], e[1]))
        object.__setattr__(self, "edges", tuple(edges))
        object.__setattr__(self, "leaves", leaves)

        nodes = set(leaves)
        for a, b, _ in edges:
            nodes.add(a)
            nodes.add(b)
        if len(edges) != len(nodes) - 1:
            raise InvalidTree("edge count does not match a tree")
        adj = {v: [] for v in nodes}
        for a, b, w in edges:
            adj[a].append((b, w))
            adj[b].append((a, w))
        seen = {leaves[0]}
        stack = [leaves[0]]
        while stack:
            v = stack.pop()
            for u, _ in adj[v]:
                if u not in seen:
                    seen.add(u)
                    stack.append(u)
        if seen != nodes:
            raise InvalidTree("tree is not connected")
        leafset = set(leaves)
        for v in nodes:
            d = len(adj[v])
            if v in leafset:
                if self.n >= 2 and d != 1:
                    raise InvalidTree(f"leaf node {v} has degree {d}")
            elif d < 3:
                raise InvalidTree(f"internal node {v} has degree {d}")
        for a, b, w in edges:
            if a not in leafset and b not in leafset and w < 0:
                raise InvalidTree(f"negative internal edge weight on ({a},{b})")

    @classmethod
    def star(cls, n, weights):
        """Star tree: leaves 1..n joined at center n+1 with given weights."""
        if n < 3:
            raise InvalidTree("star needs at least three leaves")
        ws = list(weights)
        if len(ws) != n:
            raise InvalidTree("one weight per leaf required")
        return cls(n, tuple((n + 1, i + 1, w) for i, w in enumerate(ws)),
                   tuple(range(1, n + 1)))

    @cached_property
    def adjacency(self):
        adj = {}
        for a, b, w in self.edges:
            adj.setdefault(a, []).append((b, w))
            adj.setdefault(b, []).append((a, w))
        for v in self.leaves:
            adj.setdefault(v, [])
        return {v: tuple(nbrs) for v, nbrs in adj.items()}

    @property
    def nodes(self):
        return tuple(sorted(self.adjacency))

    @property
    def internal_nodes(self):
        leafset = set(self.leaves)
        return tuple(v for v in self.nodes if v not in leafset)

    def label_of(self, node):
        return self.leaves.index(node) + 1


def tree_distance(tree):
    """Distance vector of path weight sums between all leaf pairs."""
    n = tree.n
    ent = [None] * (n * (n - 1) // 2)
    adj = tree.adjacency
    for i in range(1, n + 1):
        src = tree.leaves[i - 1]
        dist = {src: Fraction(0)}
        stack = [src]
        while stack:
            v = stack.pop()
            for u, w in adj[v]:
                if u not in dist:
                    dist[u] = dist[v] + w
                    stack.append(u)
        for j in range(i + 1, n + 1):
            ent[pair_index(n, i, j)] = dist[tree.leaves[j - 1]]
    return DistVector(n, tuple(ent))


def _pairing_sums(x, quartet):
    i, j, k, l = quartet
    return (
        ((i, j), (k, l), x[i, j] + x[k, l]),
        ((i, k), (j, l), x[i, k] + x[j, l]),
        ((i, l), (j, k), x[i, l] + x[j, k]),
    )


def four_point_check(x):
    """True iff every quartet's maximal pairing sum is attained twice."""
    for quartet in combinations(range(1, x.n + 1), 4):
        sums = [s for _, _, s in _pairing_sums(x, quartet)]
        top = max(sums)
        if sums.count(top) < 2:
            return False
    return True


def quartet_split(x, quartet):
    """The strictly smaller pairing of a quartet, or DEGENERATE.

    Raises FourPointViolation when the maximal sum is attained only once.
    """
    q = tuple(sorted(quartet))
    if len(set(q)) != 4:
        raise ValueError("quartet needs four distinct leaves")
    trips = _pairing_sums(x, q)
    sums = [s for _, _, s in trips]
    top = max(sums)
    if sums.count(top) < 2:
        raise FourPointViolation(f"four-point condition fails on quartet {q}")
    low = min(sums)
    if low == top:
        return DEGENERATE
    for p1, p2, s in trips:
        if s == low:
            return (p1, p2)


def reconstruct_tree(x):
    """Rebuild a PhyloTree realizing x exactly.

    Agglomerates never-separated pairs: (a, b) merge into a junction once
    D(a,b) + D(k,l) <= D(a,k) + D(b,l) for every other pair k, l. Junction
    distances follow from the solved attachment weights, so the output
    distances match x exactly. Zero-weight internal edges are contracted.
    """
    if not four_point_check(x):
        raise FourPointViolation("input violates the four-point condition")
    n = x.n
    if n == 1:
        return PhyloTree(1, (), (1,))
    if n == 2:
        return PhyloTree(2, ((1, 2, x[1, 2]),), (1, 2))

    D = {frozenset(p): v for p, v in x.items()}

    def dist(a, b):
        return D[frozenset((a, b))]

    active = list(range(1, n + 1))
    edges = []
    next_id = n + 1

    def attach(junction, node, w):
        if node > n and w < 0:
            raise ReconstructionError("solved a negative internal weight")
        edges.append((junction, node, w))

    while len(active) > 3:
        pair = None
        for a, b in combinations(active, 2):
            others = [k for k in active if k != a and k != b]
            separated = False
            for k, l in combinations(others, 2):
                s = dist(a, b) + dist(k, l)
                if s > dist(a, k) + dist(b, l) or s > dist(a, l) + dist(b, k):
                    separated = True
                    break
            if not separated:
                pair = (a, b)
                break
        if pair is None:
            raise ReconstructionError("no never-separated pair; input inconsistent")
        a, b = pair
        others = [k for k in active if k != a and k != b]
        wa = (dist(a, b) + dist(a, others[0]) - dist(b, others[0])) / 2
        for k in others[1:]:
            if (dist(a, b) + dist(a, k) - dist(b, k)) / 2 != wa:
                raise ReconstructionError("inconsistent attachment weights")
        u = next_id
        next_id += 1
        attach(u, a, wa)
        attach(u, b, dist(a, b) - wa)
        for k in others:
            D[frozenset((u, k))] = (dist(a, k) + dist(b, k) - dist(a, b)) / 2
        active = others + [u]

    p, q, r = active
    z = next_id
    attach(z, p, (dist(p, q) + dist(p, r) - dist(q, r)) / 2)
    attach(z, q, (dist(p, q) + dist(q, r) - dist(p, r)) / 2)
    attach(z, r, (dist(p, r) + dist(q, r) - dist(p, q)) / 2)
    return _contract_zero_internal(n, edges)


def _contract_zero_internal(n, edges):
    parent = {}

    def find(v):
        root = v
        while parent.get(root, root) != root:
            root = parent[root]
        while parent.get(v, v) != v:
            parent[v], v = root, parent[v]
        return root

    for a, b, w in edges:
        if a > n and b > n and w == 0:
            ra, rb = find(a), find(b)
            if ra != rb:
                lo, hi = min(ra, rb), max(ra, rb)
                parent[hi] = lo
    out = []
    for a, b, w in edges:
        ra, rb = find(a), find(b)
        if ra != rb:
            out.append((ra, rb, w))
    return PhyloTree(n, tuple(out), tuple(range(1, n + 1)))


def _fraction_str(w):
    return f"{w.numerator}/{w.denominator}"


def to_newick(tree):
    """Newick string with decimal lengths annotated by exact rationals.

    Rooted at the internal vertex next to leaf 1 (at leaf 1 itself for
    two-leaf trees); children are ordered by the smallest leaf label in
    their subtree, so the output is deterministic.
    """
    if tree.n == 1:
        return "1;"
    adj = tree.adjacency
    label = {node: lbl for lbl, node in enumerate(tree.leaves, start=1)}

    def min_label(v, parent):
        if v in label:
            return label[v]
        return min(min_label(u, v) for u, _ in adj[v] if u != parent)

    def render(v, parent, w):
        if v in label:
            body = str(label[v])
        else:
            kids = sorted(
                ((u, wu) for u, wu in adj[v] if u != parent),
                key=lambda e: min_label(e[0], v),
            )
            body = "(" + ",".join(render(u, v, wu) for u, wu in kids) + ")"
        if w is None:
            return body
        return f"{body}:{float(w)!r}[{_fraction_str(w)}]"

    leaf1 = tree.leaves[0]
    if tree.n == 2:
        (nbr, w), = adj[leaf1]
        return f"({render(nbr, leaf1, w)}){label[leaf1]};"
    (root, _), = adj[leaf1]
    kids = sorted(adj[root], key=lambda e: min_label(e[0], root))
    return "(" + ",".join(render(u, root, wu) for u, wu in kids) + ");"
