"""Tropical Grassmannian of planes on the dense torus orbit.

Points carry LOG coordinates (max-plus): x_kl plays the role of log|p_kl|,
taken modulo the all-ones lineality and normalized so that x_12 = 0.
Membership is the quartet condition that the maximum pairing sum is attained
at least twice, which is the same condition tree distance vectors satisfy,
so points convert to trees without a sign flip. convert_convention bridges
log-values to the valuation (min-plus) numbers used elsewhere.

All section evaluations are Gauss-norm computations: the value of a Laurent
polynomial f in the coordinate-set variables is the maximum over its terms
of log|coeff| plus the weighted sum of normalized coordinates.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import combinations

from .arith import LaurentPoly, TropNum, as_fraction
from .errors import (
    BoundaryStratum,
    DimensionMismatch,
    InvalidCherryOrder,
    MembershipError,
)
from .trees import (
    DEGENERATE,
    DistVector,
    PhyloTree,
    four_point_check,
    iter_pairs,
    pair_index,
    quartet_split,
    reconstruct_tree,
    tree_distance,
)


class _NegInf:
    """log-value of zero; the additive identity's image under log|.|"""

    __slots__ = ()

    def __repr__(self):
        return "NEG_INF"


NEG_INF = _NegInf()


def _canon(a, b):
    return (a, b) if a < b else (b, a)


@dataclass(frozen=True)
class PlueckerPoint:
    """Point of the dense torus orbit in log coordinates, x_12 = 0.

    Entries are rationals for all pairs i < j in lexicographic order; an
    infinite coordinate would place the point on a boundary stratum, which
    this module does not model, so those inputs are rejected outright.
    """

    n: int
    entries: tuple

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("need at least two indices")
        vals = []
        for v in self.entries:
            if v is None or (isinstance(v, TropNum) and v.is_inf):
                raise BoundaryStratum(
                    "infinite coordinate: boundary strata are not supported"
                )
            if isinstance(v, TropNum):
                v = v.value
            vals.append(as_fraction(v))
        want = self.n * (self.n - 1) // 2
        if len(vals) != want:
            raise ValueError(f"expected {want} entries, got {len(vals)}")
        base = vals[0]
        object.__setattr__(self, "entries", tuple(v - base for v in vals))

    @classmethod
    def from_map(cls, n, mapping):
        return cls(n, DistVector.from_map(n, mapping).entries)

    @classmethod
    def from_distances(cls, dv):
        return cls(dv.n, dv.entries)

    def value(self, k, l):
        if k > l:
            k, l = l, k
        return self.entries[pair_index(self.n, k, l)]

    def as_distvector(self):
        return DistVector(self.n, self.entries)

    def items(self):
        return zip(iter_pairs(self.n), self.entries)


def membership(x):
    """True iff x lies in the tropical Grassmannian torus part."""
    return four_point_check(x.as_distvector())


def combinatorial_type(x):
    if not membership(x):
        raise MembershipError("point fails the quartet condition")
    return reconstruct_tree(x.as_distvector())


@dataclass(frozen=True)
class CherryOrder:
    """Partial order on the non-base leaves: totally ordered subtrees.

    The representation enforces the structural conditions: leaves of
    different subtrees are incomparable and each subtree is a chain. The
    chain condition on quartets is checked by verify_cherry_property.
    """

    n: int
    base: tuple
    subtrees: tuple

    def __post_init__(self):
        i, j = self.base
        if i == j or not (1 <= i <= self.n and 1 <= j <= self.n):
            raise InvalidCherryOrder("base must be two distinct leaf labels")
        object.__setattr__(self, "base", (int(i), int(j)))
        subtrees = tuple(tuple(int(s) for s in st) for st in self.subtrees)
        object.__setattr__(self, "subtrees", subtrees)
        rest = [s for st in subtrees for s in st]
        if sorted(rest) != sorted(set(range(1, self.n + 1)) - {i, j}):
            raise InvalidCherryOrder(
                "subtrees must partition the leaves outside the base pair"
            )
        if any(not st for st in subtrees):
            raise InvalidCherryOrder("empty subtree")

    @cached_property
    def position(self):
        pos = {}
        for a, st in enumerate(self.subtrees):
            for t, s in enumerate(st):
                pos[s] = (a, t)
        return pos

    def reversed_within(self):
        """Same partition with every chain reversed: still a cherry order."""
        return CherryOrder(self.n, self.base,
                           tuple(tuple(reversed(st)) for st in self.subtrees))


def build_cherry_order(tree, i, j):
    """Cherry order for base (i, j): branches along the i-j spine, leaves
    of each branch in depth-first order from its attachment.

    For a chain k < l < m in one branch the depth-first order forces the
    meet of {k,m} to be no deeper than the meets of {k,l} and {l,m}, which
    is exactly the quartet condition, so the construction cannot fail on a
    valid tree; verify_cherry_property still runs as a guard.
    """
    adj = tree.adjacency
    label = {node: lbl for lbl, node in enumerate(tree.leaves, start=1)}
    src = tree.leaves[i - 1]
    dst = tree.leaves[j - 1]

    parent = {src: None}
    stack = [src]
    while stack:
        v = stack.pop()
        for u, _ in adj[v]:
            if u not in parent:
                parent[u] = v
                stack.append(u)
    spine = [dst]
    while spine[-1] != src:
        spine.append(parent[spine[-1]])
    spine.reverse()
    on_spine = set(spine)

    def min_label(v, avoid):
        best = None
        stack = [(v, avoid)]
        seen = {v}
        while stack:
            w, par = stack.pop()
            if w in label:
                best = label[w] if best is None else min(best, label[w])
            for u, _ in adj[w]:
                if u != par and u not in seen:
                    seen.add(u)
                    stack.append((u, w))
        return best

    def branch_leaves(root, attach):
        # depth-first preorder, children ordered by smallest label below
        out = []

        def walk(v, par):
            if v in label:
                out.append(label[v])
                return
            kids = sorted(
                (u for u, _ in adj[v] if u != par),
                key=lambda u: min_label(u, v),
            )
            for u in kids:
                walk(u, v)

        walk(root, attach)
        return tuple(out)

    subtrees = []
    for v in spine:
        hanging = sorted(
            (u for u, _ in adj[v] if u not in on_spine),
            key=lambda u: min_label(u, v),
        )
        for u in hanging:
            subtrees.append(branch_leaves(u, v))
    order = CherryOrder(tree.n, (i, j), tuple(subtrees))
    if not verify_cherry_property(order, tree):
        raise InvalidCherryOrder("constructed order fails the cherry property")
    return order


def verify_cherry_property(order, tree):
    """Check the order against the tree.

    The partition must match the tree's arrangement along the base path:
    two leaves share a stored subtree exactly when the quartet with the
    base pair splits them off together (degenerate quartets are neutral).
    On top of that, every chain k < l < m within one subtree must satisfy
    the quartet condition: {k,l} or {l,m} is paired in the split of
    {base_i, k, l, m}. Totality within subtrees and incomparability across
    them hold by representation.
    """
    if order.n != tree.n:
        raise DimensionMismatch("order and tree disagree on the leaf count")
    i, j = order.base
    x = tree_distance(tree)
    pos = order.position
    rest = sorted(pos)
    for k, l in combinations(rest, 2):
        split = quartet_split(x, (i, j, k, l))
        if split is DEGENERATE:
            continue
        paired_off = {k, l} in (set(split[0]), set(split[1]))
        same_subtree = pos[k][0] == pos[l][0]
        if same_subtree and not paired_off:
            return False
        if not same_subtree and paired_off:
            return False
    for st in order.subtrees:
        for k, l, m in combinations(st, 3):
            split = quartet_split(x, (i, k, l, m))
            if split is DEGENERATE:
                continue
            parts = (set(split[0]), set(split[1]))
            if {k, l} not in parts and {l, m} not in parts:
                return False
    return True


@dataclass(frozen=True)
class IndexSetI:
    """The 2(n-2) coordinate-set pairs; sorted order fixes variable indices."""

    base: tuple
    pairs: tuple

    def __post_init__(self):
        pairs = tuple(sorted(_canon(*p) for p in self.pairs))
        if len(set(pairs)) != len(pairs):
            raise InvalidCherryOrder("coordinate set has repeated indices")
        if _canon(*self.base) in pairs:
            raise InvalidCherryOrder("coordinate set may not contain the base")
        object.__setattr__(self, "pairs", pairs)

    @cached_property
    def index(self):
        return {p: t for t, p in enumerate(self.pairs)}

    @property
    def num_vars(self):
        return len(self.pairs)


def coordinate_set_I(order):
    i, j = order.base
    pairs = []
    for st in order.subtrees:
        for s in st:
            pairs.append(_canon(i, s))
        pairs.append(_canon(j, st[0]))
        for a, b in zip(st, st[1:]):
            pairs.append(_canon(a, b))
    out = IndexSetI((i, j), tuple(pairs))
    if len(out.pairs) != 2 * (order.n - 2):
        raise InvalidCherryOrder("coordinate set has the wrong cardinality")
    return out


@dataclass(frozen=True)
class PlueckerExpansion:
    """Every affine coordinate as a Laurent polynomial in the I-variables.

    Coefficients are nonzero integers; coordinates in I are their own
    variable. Building the table asserts that no term is ever lost when the
    rewriting rules combine subexpressions, so the Gauss-norm evaluation
    sees every product of the recursion.
    """

    order: CherryOrder
    index_set: IndexSetI
    polys: tuple

    @cached_property
    def table(self):
        return dict(self.polys)

    def __getitem__(self, pair):
        p = _canon(*pair)
        if p == _canon(*self.index_set.base):
            return LaurentPoly.one(self.index_set.num_vars)
        return self.table[p]

    def pairs(self):
        return tuple(p for p, _ in self.polys)


def _add_disjoint(f, g):
    h = f + g
    if len(h.terms) != len(f.terms) + len(g.terms):
        raise InvalidCherryOrder("unexpected cancellation in the expansion")
    return h


def expand_pluecker(order, index_set=None):
    """Expansion table for all pairs != base via the three rewriting rules.

    (a) second-and-later base-j coordinates through the inverted first
        base-i coordinate, (b) cross-subtree pairs through the quadratic
        relation, (c) same-subtree non-adjacent pairs through the inverted
        base-i coordinate of the predecessor. The coordinates are treated
        as antisymmetric in their two indices, so every rule is valid in
        any orientation and the results are unique.
    """
    iset = index_set if index_set is not None else coordinate_set_I(order)
    i, j = order.base
    pos = order.position
    subtrees = order.subtrees
    nv = iset.num_vars
    memo = {}

    def oriented(a, b):
        p = expand(_canon(a, b))
        return p if a < b else -p

    def expand(pair):
        got = memo.get(pair)
        if got is not None:
            return got
        t = iset.index.get(pair)
        if t is not None:
            res = LaurentPoly.variable(nv, t)
            memo[pair] = res
            return res
        a, b = pair
        if i == a or i == b:
            raise InvalidCherryOrder("base-i coordinate missing from I")
        if j == a or j == b:
            s = b if a == j else a
            st, p = pos[s]
            prev = subtrees[st][p - 1]
            body = _add_disjoint(
                oriented(prev, s), oriented(i, s) * oriented(j, prev)
            )
            res = (oriented(i, prev) ** -1) * body
            if j > s:
                res = -res
        else:
            sta, pa = pos[a]
            stb, pb = pos[b]
            if sta != stb:
                res = _add_disjoint(
                    oriented(i, a) * oriented(j, b),
                    -(oriented(i, b) * oriented(j, a)),
                )
            else:
                k, l = (a, b) if pa < pb else (b, a)
                m = subtrees[sta][max(pa, pb) - 1]
                body = _add_disjoint(
                    oriented(i, k) * oriented(m, l),
                    oriented(i, l) * oriented(k, m),
                )
                res = (oriented(i, m) ** -1) * body
                if k > l:
                    res = -res
        for _, c in res.terms:
            if c.as_rational().denominator != 1:
                raise InvalidCherryOrder("non-integer expansion coefficient")
        memo[pair] = res
        return res

    polys = []
    base = _canon(i, j)
    for pair in iter_pairs(order.n):
        if pair == base:
            continue
        polys.append((pair, expand(pair)))
    return PlueckerExpansion(order, iset, tuple(polys))


def section_eval(x, expansion, f):
    """log of the section value |f| at x: the Gauss-norm maximum
    max over terms of ( log|coeff| + sum alpha_kl (x_kl - x_ij) ).

    Returns a rational, or NEG_INF for f = 0.
    """
    iset = expansion.index_set
    if f.num_vars != iset.num_vars:
        raise DimensionMismatch("polynomial is not in the I-variables")
    i, j = iset.base
    xij = x.value(i, j)
    r = [-(x.value(*p) - xij) for p in iset.pairs]
    v = f.gauss_eval(r)
    if v.is_inf:
        return NEG_INF
    return -v.value


def eval_pair_poly(x, expansion, f):
    """Norm log-value of a Laurent polynomial in ALL pair variables.

    Variables follow iter_pairs(n) lexicographically and stand for the
    coordinates normalized against the (1,2) entry, so the variable for
    the pair (1,2) is the constant 1 and its exponents drop out. With
    that convention every expansion choice returns the same value.

    Internally each term is rescaled to the expansion's own base by a
    power of the (1,2) coordinate, and negative exponents are cleared by
    multiplying through with coordinate powers; both steps are exact
    because the norm is multiplicative and never zero on coordinates.
    """
    n = x.n
    pairs = tuple(iter_pairs(n))
    if f.num_vars != len(pairs):
        raise DimensionMismatch("polynomial is not in the pair variables")
    if f.is_zero:
        return NEG_INF
    iset = expansion.index_set
    nv = iset.num_vars
    i, j = iset.base
    xij = x.value(i, j)
    idx12 = 0
    degs = [sum(e for t, e in enumerate(exps) if t != idx12)
            for exps, _ in f.terms]
    top = max(degs)
    shifts = [0] * len(pairs)
    reterms = []
    for (exps, coeff), d in zip(f.terms, degs):
        es = list(exps)
        es[idx12] = top - d
        for t, e in enumerate(es):
            if -e > shifts[t]:
                shifts[t] = -e
        reterms.append((es, coeff))
    subs = [expansion[p] for p in pairs]
    total = LaurentPoly.zero(nv)
    for exps, coeff in reterms:
        term = LaurentPoly.constant(nv, coeff)
        for t, e in enumerate(exps):
            k = e + shifts[t]
            if k:
                term = term * subs[t] ** k
        total = total + term
    val = section_eval(x, expansion, total)
    if val is NEG_INF:
        return NEG_INF
    corr = Fraction(0)
    for p, s in zip(pairs, shifts):
        if s:
            corr += s * (x.value(*p) - xij)
    return val - corr + top * xij


@dataclass(frozen=True)
class SectionReport:
    ok: bool
    pairs_checked: int
    base: tuple
    first_violation: tuple

    def __bool__(self):
        return self.ok


def _strict_weights(tree):
    # same topology, internal weights 1 and leaf weights 0: quartet splits
    # of this tree read off the combinatorics exactly
    leafset = set(tree.leaves)
    edges = tuple(
        (a, b, Fraction(0) if a in leafset or b in leafset else Fraction(1))
        for a, b, _ in tree.edges
    )
    return PhyloTree(tree.n, edges, tree.leaves)


def _check_cone_compat(x, tree):
    if x.n != tree.n:
        raise DimensionMismatch("point and tree disagree on n")
    dv = x.as_distvector()
    topo = tree_distance(_strict_weights(tree))
    for quartet in combinations(range(1, x.n + 1), 4):
        sx = quartet_split(dv, quartet)
        if sx is DEGENERATE:
            continue
        if sx != quartet_split(topo, quartet):
            raise MembershipError(
                f"point lies outside the closed cone of the tree at {quartet}"
            )


def verify_section_identity(x, tree=None, base=(1, 2), order=None):
    """Check log|u_kl(section(x))| = x_kl - x_ij for every pair != base.

    Returns a SectionReport that is truthy on success and records the
    number of pairs checked and the first violating pair otherwise.
    """
    if not membership(x):
        raise MembershipError("point fails the quartet condition")
    if tree is None:
        tree = combinatorial_type(x)
    else:
        _check_cone_compat(x, tree)
    i, j = base
    if order is None:
        order = build_cherry_order(tree, i, j)
    elif order.base != (i, j):
        raise InvalidCherryOrder("order base does not match the base pair")
    expansion = expand_pluecker(order)
    xij = x.value(i, j)
    checked = 0
    basepair = _canon(i, j)
    for pair in iter_pairs(x.n):
        if pair == basepair:
            continue
        checked += 1
        got = section_eval(x, expansion, expansion[pair])
        want = x.value(*pair) - xij
        if got is NEG_INF or got != want:
            return SectionReport(False, checked, (i, j), (pair, want, got))
    return SectionReport(True, checked, (i, j), None)


def section_choices(x, tree=None, bases=((1, 2), (1, 3), (2, 3))):
    """Expansions for several base pairs and chain orientations."""
    if tree is None:
        tree = combinatorial_type(x)
    out = []
    for i, j in bases:
        order = build_cherry_order(tree, i, j)
        out.append(expand_pluecker(order))
        rev = order.reversed_within()
        if rev != order:
            out.append(expand_pluecker(rev))
    return tuple(out)


def section_well_defined(x, panel, choices=None):
    """True iff every polynomial in the panel evaluates identically under
    at least three distinct choices of base pair and cherry order."""
    if not membership(x):
        raise MembershipError("point fails the quartet condition")
    if choices is None:
        choices = section_choices(x)
    if len(choices) < 3:
        raise ValueError("need at least three choices")
    for f in panel:
        vals = [eval_pair_poly(x, expansion, f) for expansion in choices]
        first = vals[0]
        for v in vals[1:]:
            if first is NEG_INF or v is NEG_INF:
                if not (first is NEG_INF and v is NEG_INF):
                    return False
            elif v != first:
                return False
    return True


def convert_convention(v):
    """Negate between log-values and valuations; INF pairs with NEG_INF."""
    if v is NEG_INF:
        return TropNum.INF
    if isinstance(v, TropNum):
        return NEG_INF if v.is_inf else -v.value
    return TropNum(-as_fraction(v))
