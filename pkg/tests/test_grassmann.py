import random
from fractions import Fraction
from itertools import combinations

import pytest

from conftest import random_phylo_tree
from tropgrass.arith import LaurentPoly, PuiseuxCoeff, TropNum
from tropgrass.errors import (
    BoundaryStratum,
    InvalidCherryOrder,
    MembershipError,
)
from tropgrass.grassmann import (
    NEG_INF,
    CherryOrder,
    PlueckerPoint,
    build_cherry_order,
    combinatorial_type,
    convert_convention,
    coordinate_set_I,
    eval_pair_poly,
    expand_pluecker,
    membership,
    section_choices,
    section_eval,
    section_well_defined,
    verify_cherry_property,
    verify_section_identity,
)
from tropgrass.trees import PhyloTree, iter_pairs, tree_distance

F = Fraction


def cherry_tree(leaf_w=F(1), mid_w=F(1)):
    return PhyloTree(
        4,
        ((5, 1, leaf_w), (5, 2, leaf_w), (6, 3, leaf_w), (6, 4, leaf_w),
         (5, 6, mid_w)),
        (1, 2, 3, 4),
    )


def caterpillar6():
    # cherries {1,2} and {5,6} at the ends, 3 and 4 along the spine
    return PhyloTree(
        6,
        ((7, 1, F(0)), (7, 2, F(0)), (8, 3, F(0)), (9, 4, F(0)),
         (10, 5, F(0)), (10, 6, F(0)), (7, 8, F(1)), (8, 9, F(1)),
         (9, 10, F(1))),
        (1, 2, 3, 4, 5, 6),
    )


def pt(tree):
    return PlueckerPoint.from_distances(tree_distance(tree))


def pair_vars(n):
    pairs = tuple(iter_pairs(n))
    return {p: LaurentPoly.variable(len(pairs), t) for t, p in enumerate(pairs)}


def random_matrix_coords(rng, n):
    """Affine coordinates p_kl / p_12 of a random rational 2xn matrix with
    all minors nonzero."""
    while True:
        M = [[F(rng.randrange(-9, 10), rng.choice((1, 2, 3))) for _ in range(n)]
             for _ in range(2)]
        p = {}
        for k, l in iter_pairs(n):
            d = M[0][k - 1] * M[1][l - 1] - M[0][l - 1] * M[1][k - 1]
            if d == 0:
                p = None
                break
            p[(k, l)] = d
        if p is not None:
            base = p[(1, 2)]
            return {pair: v / base for pair, v in p.items()}


def random_pair_poly(rng, n, max_terms=4):
    pairs = tuple(iter_pairs(n))
    terms = []
    for _ in range(rng.randrange(1, max_terms + 1)):
        exps = [0] * len(pairs)
        for _ in range(rng.randrange(1, 4)):
            exps[rng.randrange(len(pairs))] += rng.choice((-1, 1, 1, 2))
        if rng.random() < 0.3:
            coeff = PuiseuxCoeff.t_power(
                F(rng.randrange(-2, 3)), rng.randrange(1, 4)
            )
        else:
            coeff = PuiseuxCoeff.rational(rng.randrange(-5, 6))
        if not coeff.is_zero:
            terms.append((tuple(exps), coeff))
    if not terms:
        return LaurentPoly.one(len(pairs))
    return LaurentPoly.from_terms(len(pairs), terms)


# --- membership and types ------------------------------------------------


def test_membership_on_trees_and_violations():
    rng = random.Random(71)
    for _ in range(20):
        assert membership(pt(random_phylo_tree(rng, rng.randrange(4, 8))))
    # pairing sums 5, 6, 7
    bad = PlueckerPoint(4, (F(2), F(3), F(3), F(4), F(3), F(3)))
    assert not membership(bad)


def test_membership_matches_quartet_scan():
    rng = random.Random(72)
    for _ in range(1000):
        n = rng.randrange(4, 7)
        t = random_phylo_tree(rng, n)
        ent = list(tree_distance(t).entries)
        for _ in range(rng.randrange(0, 3)):
            ent[rng.randrange(len(ent))] += F(rng.randrange(-2, 3))
        x = PlueckerPoint(n, tuple(ent))
        expect = True
        for q in combinations(range(1, n + 1), 4):
            i, j, k, l = q
            sums = sorted(
                (x.value(i, j) + x.value(k, l),
                 x.value(i, k) + x.value(j, l),
                 x.value(i, l) + x.value(j, k))
            )
            if sums[1] != sums[2]:
                expect = False
                break
        assert membership(x) == expect


def test_boundary_strata_rejected():
    with pytest.raises(BoundaryStratum):
        PlueckerPoint(4, (TropNum.INF, F(0), F(0), F(0), F(0), F(0)))
    with pytest.raises(BoundaryStratum):
        PlueckerPoint(4, (F(0), None, F(0), F(0), F(0), F(0)))


def test_normalization():
    a = PlueckerPoint(4, (F(5), F(6), F(6), F(6), F(6), F(5)))
    b = PlueckerPoint(4, (F(0), F(1), F(1), F(1), F(1), F(0)))
    assert a == b
    assert a.value(1, 2) == 0


def test_combinatorial_type():
    t = combinatorial_type(pt(cherry_tree()))
    assert len(t.internal_nodes) == 2
    star = combinatorial_type(PlueckerPoint(4, (F(2),) * 6))
    assert len(star.internal_nodes) == 1
    with pytest.raises(MembershipError):
        combinatorial_type(PlueckerPoint(4, (F(2), F(3), F(3), F(4), F(3), F(3))))


# --- cherry orders --------------------------------------------------------


def test_build_cherry_order_n4():
    order = build_cherry_order(cherry_tree(), 1, 2)
    assert order.subtrees == ((3, 4),)
    assert verify_cherry_property(order, cherry_tree())
    assert verify_cherry_property(order.reversed_within(), cherry_tree())


def test_build_cherry_order_caterpillar():
    order = build_cherry_order(caterpillar6(), 1, 2)
    assert order.subtrees == ((3, 4, 5, 6),)
    assert verify_cherry_property(order, caterpillar6())


def test_cherry_property_violations():
    t = caterpillar6()
    # chain 4 < 3 < 5: the quartet {1,3,4,5} pairs the outer two
    bad_chain = CherryOrder(6, (1, 2), ((4, 3, 5, 6),))
    assert not verify_cherry_property(bad_chain, t)
    # leaves of different branches merged into one subtree
    merged = CherryOrder(6, (1, 6), ((2, 3), (4,), (5,)))
    assert not verify_cherry_property(merged, t)
    # one branch split across two subtrees
    split = CherryOrder(6, (1, 2), ((3, 4), (5, 6)))
    assert not verify_cherry_property(split, t)


def test_build_cherry_order_random_trees():
    rng = random.Random(73)
    for _ in range(40):
        t = random_phylo_tree(rng, rng.randrange(4, 9))
        i = rng.randrange(1, t.n + 1)
        j = rng.randrange(1, t.n + 1)
        while j == i:
            j = rng.randrange(1, t.n + 1)
        order = build_cherry_order(t, i, j)
        assert verify_cherry_property(order, t)
        assert verify_cherry_property(order.reversed_within(), t)


def test_cherry_order_structural_validation():
    with pytest.raises(InvalidCherryOrder):
        CherryOrder(4, (1, 1), ((3, 4),))
    with pytest.raises(InvalidCherryOrder):
        CherryOrder(4, (1, 2), ((3,),))  # 4 missing
    with pytest.raises(InvalidCherryOrder):
        CherryOrder(4, (1, 2), ((3, 4), (4,)))  # 4 twice


# --- coordinate set and expansion ----------------------------------------


def test_coordinate_set_n4():
    order = build_cherry_order(cherry_tree(), 1, 2)
    iset = coordinate_set_I(order)
    assert iset.pairs == ((1, 3), (1, 4), (2, 3), (3, 4))
    assert iset.num_vars == 4


def test_coordinate_set_cardinality_random():
    rng = random.Random(74)
    for _ in range(200):
        t = random_phylo_tree(rng, rng.randrange(4, 9))
        i, j = rng.sample(range(1, t.n + 1), 2)
        iset = coordinate_set_I(build_cherry_order(t, i, j))
        assert len(iset.pairs) == 2 * (t.n - 2)
        assert len(set(iset.pairs)) == len(iset.pairs)


def test_expand_n4_frozen():
    order = build_cherry_order(cherry_tree(), 1, 2)
    exp = expand_pluecker(order)
    # variables: 0=(1,3), 1=(1,4), 2=(2,3), 3=(3,4)
    want = LaurentPoly.from_terms(
        4, (((-1, 0, 0, 1), 1), ((-1, 1, 1, 0), 1))
    )
    assert exp[(2, 4)] == want
    for pair in ((1, 3), (1, 4), (2, 3), (3, 4)):
        assert exp[pair] == LaurentPoly.variable(4, exp.index_set.index[pair])
    assert exp[(1, 2)] == LaurentPoly.one(4)


def test_expansion_soundness_random_matrices():
    rng = random.Random(75)
    for _ in range(30):
        n = rng.randrange(4, 7)
        u = random_matrix_coords(rng, n)
        t = random_phylo_tree(rng, n)
        i, j = rng.sample(range(1, n + 1), 2)
        exp = expand_pluecker(build_cherry_order(t, i, j))
        bi, bj = exp.index_set.base
        # antisymmetric: re-normalizing to base (i, j) flips sign when i > j
        scale = u[(bi, bj)] if bi < bj else -u[(bj, bi)]
        vals = [u[p] / scale for p in exp.index_set.pairs]
        for pair in iter_pairs(n):
            if pair == (min(bi, bj), max(bi, bj)):
                continue
            assert exp[pair].eval_rational(vals) == u[pair] / scale


def test_expansion_coeffs_are_integers():
    rng = random.Random(76)
    for _ in range(20):
        t = random_phylo_tree(rng, rng.randrange(4, 8))
        exp = expand_pluecker(build_cherry_order(t, 1, 2))
        for pair, poly in exp.polys:
            assert poly.terms, f"empty expansion for {pair}"
            for _, c in poly.terms:
                r = c.as_rational()
                assert r.denominator == 1 and r != 0


# --- section evaluation ----------------------------------------------------


def test_section_eval_frozen():
    t = cherry_tree()
    x = pt(t)
    exp = expand_pluecker(build_cherry_order(t, 1, 2))
    f13 = exp[(1, 3)]
    assert section_eval(x, exp, f13) == x.value(1, 3) - x.value(1, 2)
    assert section_eval(x, exp, LaurentPoly.one(4)) == 0
    assert section_eval(x, exp, LaurentPoly.zero(4)) is NEG_INF


def test_section_eval_quadratic_relation_cancels():
    # u13*u24 - u14*u23 equals u34 after expansion; the naive per-term
    # maximum would give x14 + x23 - 2*x12 instead
    t = cherry_tree()
    x = pt(t)
    exp = expand_pluecker(build_cherry_order(t, 1, 2))
    v = pair_vars(4)
    f = v[(1, 3)] * v[(2, 4)] - v[(1, 4)] * v[(2, 3)]
    got = eval_pair_poly(x, exp, f)
    assert got == x.value(3, 4) - x.value(1, 2) == 0
    naive = x.value(1, 4) + x.value(2, 3) - 2 * x.value(1, 2)
    assert naive == 2 and got != naive


def test_pluecker_relation_evaluates_to_neg_inf():
    rng = random.Random(77)
    v = pair_vars(4)
    rel = v[(1, 2)] * v[(3, 4)] - v[(1, 3)] * v[(2, 4)] + v[(1, 4)] * v[(2, 3)]
    for _ in range(10):
        t = random_phylo_tree(rng, 4)
        x = pt(t)
        exp = expand_pluecker(build_cherry_order(t, 1, 2))
        assert eval_pair_poly(x, exp, rel) is NEG_INF


def test_section_identity_random_trees():
    rng = random.Random(78)
    for _ in range(50):
        t = random_phylo_tree(rng, rng.randrange(4, 8))
        report = verify_section_identity(pt(t))
        assert report
        assert report.pairs_checked == t.n * (t.n - 1) // 2 - 1
        assert report.first_violation is None


def test_section_identity_boundary_points():
    # zero internal weights put the point on the cone boundary
    t = cherry_tree(mid_w=F(0))
    assert verify_section_identity(pt(t))
    rng = random.Random(79)
    for _ in range(20):
        tree = random_phylo_tree(rng, rng.randrange(4, 8))
        zeroed = PhyloTree(
            tree.n,
            tuple((a, b, F(0) if rng.random() < 0.5 else w)
                  for a, b, w in tree.edges),
            tree.leaves,
        )
        assert verify_section_identity(pt(zeroed))


def test_section_identity_pairs_checked_n6():
    report = verify_section_identity(pt(caterpillar6()))
    assert report.ok and report.pairs_checked == 14


def test_section_identity_reports_violation_for_bad_order():
    x = pt(caterpillar6())
    bad = CherryOrder(6, (1, 2), ((4, 3, 5, 6),))
    report = verify_section_identity(x, order=bad)
    assert not report
    assert report.first_violation is not None
    pair, want, got = report.first_violation
    assert got != want


def test_section_identity_preconditions():
    with pytest.raises(MembershipError):
        verify_section_identity(
            PlueckerPoint(4, (F(2), F(3), F(3), F(4), F(3), F(3)))
        )
    # a tree of the wrong combinatorial type is rejected
    x = pt(cherry_tree())
    wrong = PhyloTree(
        4,
        ((5, 1, F(0)), (5, 3, F(0)), (6, 2, F(0)), (6, 4, F(0)), (5, 6, F(1))),
        (1, 2, 3, 4),
    )
    with pytest.raises(MembershipError):
        verify_section_identity(x, tree=wrong)


def test_section_well_defined_random_panels():
    rng = random.Random(80)
    for _ in range(10):
        n = rng.randrange(4, 6)
        t = random_phylo_tree(rng, n)
        x = pt(t)
        panel = [random_pair_poly(rng, n) for _ in range(5)]
        panel.append(pair_vars(n)[(1, n)])
        assert section_well_defined(x, panel)


def test_relation_neg_inf_under_every_choice():
    rng = random.Random(81)
    v = pair_vars(4)
    rel = v[(1, 2)] * v[(3, 4)] - v[(1, 3)] * v[(2, 4)] + v[(1, 4)] * v[(2, 3)]
    x = pt(random_phylo_tree(rng, 4))
    for exp in section_choices(x):
        assert eval_pair_poly(x, exp, rel) is NEG_INF


def test_gauss_maximality_over_terms():
    rng = random.Random(82)
    for _ in range(30):
        t = random_phylo_tree(rng, 5)
        x = pt(t)
        exp = expand_pluecker(build_cherry_order(t, 1, 2))
        nv = exp.index_set.num_vars
        terms = []
        for _ in range(rng.randrange(1, 5)):
            exps = tuple(rng.randrange(-2, 3) for _ in range(nv))
            c = rng.randrange(-4, 5)
            if c:
                terms.append((exps, c))
        if not terms:
            continue
        f = LaurentPoly.from_terms(nv, terms)
        whole = section_eval(x, exp, f)
        singles = [
            section_eval(x, exp, LaurentPoly.from_terms(nv, [term]))
            for term in f.terms
        ]
        assert whole == max(singles)
        assert all(whole >= s for s in singles)


def test_convert_convention():
    assert convert_convention(F(3)) == TropNum(F(-3))
    assert convert_convention(0) == TropNum(F(0))
    assert convert_convention(convert_convention(F(3))) == F(3)
    assert convert_convention(NEG_INF) == TropNum.INF
    assert convert_convention(TropNum.INF) is NEG_INF
