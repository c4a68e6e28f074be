import math
import random
from fractions import Fraction

import pytest

from tropgrass.arith import LaurentPoly, PuiseuxCoeff, TropNum
from tropgrass.errors import (
    DimensionMismatch,
    NegativeExponentAtBoundary,
    NonIntegralSlope,
    OutsideDomain,
    UnboundedPolyhedron,
)
from tropgrass.skeleton import (
    BlockPoint,
    MetricGraph,
    PLFunction,
    SlopeReport,
    StandardBlock,
    block_polytope,
    block_sigma_eval,
    check_slope_formula,
    degrees,
    edge_slope,
)

F = Fraction


def random_nonneg_poly(rng, d, max_terms=4):
    terms = []
    for _ in range(rng.randrange(1, max_terms + 1)):
        exps = tuple(rng.randrange(0, 4) for _ in range(d))
        if rng.random() < 0.4:
            c = PuiseuxCoeff.t_power(F(rng.randrange(-3, 4), rng.choice((1, 2))))
        else:
            c = PuiseuxCoeff.rational(rng.randrange(-5, 6) or 1)
        terms.append((exps, c))
    return LaurentPoly.from_terms(d, terms)


def random_block_point(rng, block):
    m = block.r + block.s
    v = [F(0)] * m
    budget = block.vpi
    for t in range(block.r):
        v[t] = F(rng.randrange(0, 4), 4) * budget / max(block.r, 1)
    for t in range(block.r, m):
        v[t] = F(rng.randrange(0, 9), rng.choice((1, 2, 3)))
    return BlockPoint(tuple(v))


# --- blocks and their polytopes -------------------------------------------


def test_block_validation():
    with pytest.raises(ValueError):
        StandardBlock(2, 3, 0, F(1))
    with pytest.raises(ValueError):
        StandardBlock(2, 1, 2, F(1))
    with pytest.raises(ValueError):
        StandardBlock(2, 1, -1, F(1))
    with pytest.raises(ValueError):
        StandardBlock(2, 1, 1, F(0))


def test_block_polytope_triangle():
    P = block_polytope(StandardBlock(2, 2, 0, F(1)))
    assert P.contains((F(1, 2), F(1, 4)))
    assert P.contains((F(0), F(1)))
    assert not P.contains((F(3, 4), F(1, 2)))
    assert not P.contains((F(-1, 8), F(0)))
    assert P.lattice_points() == ((0, 0), (0, 1), (1, 0))


def test_block_polytope_quadrant():
    P = block_polytope(StandardBlock(2, 0, 2, F(1)))
    assert P.contains((F(5), F(7)))
    assert not P.contains((F(-1), F(0)))
    with pytest.raises(UnboundedPolyhedron):
        P.lattice_points()


def test_block_polytope_strip():
    P = block_polytope(StandardBlock(2, 1, 1, F(2)))
    assert P.contains((F(2), F(100)))
    assert P.contains((F(0), F(0)))
    assert not P.contains((F(5, 2), F(0)))


def test_block_point_validation():
    with pytest.raises(OutsideDomain):
        BlockPoint((F(-1), F(0)))
    p = BlockPoint((F(1, 3), F(2)))
    assert p.v0(StandardBlock(2, 1, 1, F(2))) == F(5, 3)


# --- sigma evaluation -------------------------------------------------------


def test_sigma_eval_coordinates_and_constants():
    b = StandardBlock(3, 1, 1, F(2))
    p = BlockPoint((F(1, 2), F(3)))
    for t, want in ((0, F(1, 2)), (1, F(3)), (2, F(0))):
        assert block_sigma_eval(b, p, LaurentPoly.variable(3, t)) == TropNum(want)
    c = LaurentPoly.constant(3, PuiseuxCoeff.t_power(3))
    assert block_sigma_eval(b, p, c) == TropNum(F(3))
    assert block_sigma_eval(b, p, LaurentPoly.zero(3)) == TropNum.INF


def test_sigma_eval_errors():
    b = StandardBlock(2, 1, 1, F(1))
    p = BlockPoint((F(1, 2), F(0)))
    with pytest.raises(NegativeExponentAtBoundary):
        block_sigma_eval(b, p, LaurentPoly.monomial(2, (-1, 0)))
    with pytest.raises(OutsideDomain):
        block_sigma_eval(b, BlockPoint((F(3, 2), F(0))), LaurentPoly.one(2))
    with pytest.raises(DimensionMismatch):
        block_sigma_eval(b, p, LaurentPoly.one(3))
    with pytest.raises(DimensionMismatch):
        block_sigma_eval(b, BlockPoint((F(0),)), LaurentPoly.one(2))


def test_sigma_eval_multiplicative():
    rng = random.Random(101)
    for _ in range(150):
        d = rng.randrange(1, 5)
        r = rng.randrange(0, d + 1)
        s = rng.randrange(0, d - r + 1)
        b = StandardBlock(d, r, s, F(rng.randrange(1, 5), rng.choice((1, 2))))
        p = random_block_point(rng, b)
        f = random_nonneg_poly(rng, d)
        g = random_nonneg_poly(rng, d)
        assert block_sigma_eval(b, p, f * g) == (
            block_sigma_eval(b, p, f) * block_sigma_eval(b, p, g)
        )


def test_sigma_eval_monotone():
    rng = random.Random(102)
    for _ in range(80):
        d = rng.randrange(1, 5)
        r = rng.randrange(0, d + 1)
        s = rng.randrange(0, d - r + 1)
        m = r + s
        b = StandardBlock(d, r, s, F(2))
        small = [F(rng.randrange(0, 3), 4) / max(r, 1) if t < r
                 else F(rng.randrange(0, 5)) for t in range(m)]
        grow = [F(rng.randrange(0, 3), 4) / max(r, 1) if t < r
                else F(rng.randrange(0, 5)) for t in range(m)]
        lo = BlockPoint(tuple(small))
        hi = BlockPoint(tuple(a + c for a, c in zip(small, grow)))
        f = random_nonneg_poly(rng, d)
        v_lo = block_sigma_eval(b, lo, f)
        v_hi = block_sigma_eval(b, hi, f)
        assert v_lo + v_hi == v_lo  # min-plus: v_lo <= v_hi


def test_val_section_identity_on_grid():
    for r, s in ((0, 2), (1, 1), (2, 0)):
        for vpi in (F(1), F(3, 2)):
            b = StandardBlock(r + s, r, s, vpi)
            P = block_polytope(b)
            grid = [F(k, 2) for k in range(0, 5)]
            for v1 in grid:
                for v2 in grid:
                    if not P.contains((v1, v2)):
                        continue
                    p = BlockPoint((v1, v2))
                    got = (
                        block_sigma_eval(b, p, LaurentPoly.variable(2, 0)),
                        block_sigma_eval(b, p, LaurentPoly.variable(2, 1)),
                    )
                    assert got == (TropNum(v1), TropNum(v2))


# --- metric graphs ----------------------------------------------------------


def line_graph():
    g = MetricGraph(
        ("a", "c", "b"),
        (("a", "c", F(1)), ("c", "b", F(1))),
        (("a", "la"), ("b", "rb")),
    )
    return g


def test_degrees():
    g = line_graph()
    assert degrees(g, "a") == (1, 1)
    assert degrees(g, "c") == (2, 0)
    iso = MetricGraph(("x",), (), ())
    assert degrees(iso, "x") == (0, 0)
    tri = MetricGraph(
        (1, 2, 3, 4),
        ((1, 2, F(1)), (1, 3, F(1)), (1, 4, F(1))),
        (),
    )
    assert degrees(tri, 1) == (3, 0)


def test_metric_graph_validation():
    with pytest.raises(ValueError):
        MetricGraph((1, 2), ((1, 2, F(0)),), ())
    with pytest.raises(ValueError):
        MetricGraph((1,), ((1, 1, F(1)),), ())
    with pytest.raises(ValueError):
        MetricGraph((1, 2), ((1, 3, F(1)),), ())
    with pytest.raises(ValueError):
        MetricGraph((1, 2), (), ((1, "t"), (2, "t")))


def test_pl_function_integrality():
    g = line_graph()
    PLFunction.on(g, {"a": F(0), "c": F(1), "b": F(3)})
    with pytest.raises(NonIntegralSlope):
        PLFunction.on(g, {"a": F(0), "c": F(1, 2), "b": F(1)})


def test_edge_slope():
    g = MetricGraph(("u", "w"), (("u", "w", F(2)),), ())
    f = PLFunction.on(g, {"u": F(0), "w": F(2)})
    assert edge_slope(f, "u", g.edges[0]) == 1
    assert edge_slope(f, "w", g.edges[0]) == -1
    const = PLFunction.on(g, {"u": F(5), "w": F(5)})
    assert edge_slope(const, "u", g.edges[0]) == 0
    with pytest.raises(ValueError):
        edge_slope(f, "nope", g.edges[0])


def test_slope_formula_subdivided_segment():
    g = MetricGraph(
        ("u", "m", "w"),
        (("u", "m", F(1, 2)), ("m", "w", F(1, 2))),
        (),
    )
    f = PLFunction.on(g, {"u": F(0), "m": F(1, 2), "w": F(1)})
    report = check_slope_formula(g, f)
    assert not report
    assert dict(report.vertex_sums)["m"] == 0
    assert report.defects == (("u", F(1)), ("w", F(-1)))


def test_slope_formula_two_rays():
    g = MetricGraph(("o",), (), (("o", "east"), ("o", "west")))
    f = PLFunction.on(g, {"o": F(0)}, {"east": 1, "west": -1})
    assert check_slope_formula(g, f)


def test_slope_formula_min_kink():
    # min(0, x - c) on a line: balanced at the flanks, defect -1 at c
    g = line_graph()
    f = PLFunction.on(
        g, {"a": F(-1), "c": F(0), "b": F(0)}, {"la": -1, "rb": 0}
    )
    report = check_slope_formula(g, f)
    assert not report.ok
    assert report.defects == (("c", F(-1)),)


# --- principal functions on random trees ------------------------------------


def random_ray_tree(rng, nv):
    vertices = tuple(range(nv))
    edges = []
    for v in range(1, nv):
        u = rng.randrange(v)
        edges.append((u, v, F(rng.randrange(1, 5), rng.choice((1, 2, 3)))))
    nrays = rng.randrange(2, 5)
    rays = tuple((rng.randrange(nv), f"r{k}") for k in range(nrays))
    return MetricGraph(vertices, tuple(edges), rays)


def tree_dists(graph, src):
    adj = {}
    for a, b, ln in graph.edges:
        adj.setdefault(a, []).append((b, ln))
        adj.setdefault(b, []).append((a, ln))
    dist = {src: F(0)}
    stack = [src]
    while stack:
        v = stack.pop()
        for w, ln in adj.get(v, ()):
            if w not in dist:
                dist[w] = dist[v] + ln
                stack.append(w)
    return dist


def principal_function(rng, graph):
    """Integer combination of distances to the ray ends, weights sum zero."""
    ms = [rng.randrange(-3, 4) for _ in graph.rays[:-1]]
    ms.append(-sum(ms))
    values = {u: F(0) for u in graph.vertices}
    for (base, _), m in zip(graph.rays, ms):
        if m == 0:
            continue
        dist = tree_dists(graph, base)
        for u in graph.vertices:
            values[u] += m * dist[u]
    slopes = {tag: -2 * m for (_, tag), m in zip(graph.rays, ms)}
    return PLFunction.on(graph, values, slopes)


def test_principal_functions_balance():
    rng = random.Random(103)
    for _ in range(60):
        g = random_ray_tree(rng, rng.randrange(2, 8))
        f = principal_function(rng, g)
        assert check_slope_formula(g, f)


def test_perturbed_vertex_fails_with_predicted_defect():
    rng = random.Random(104)
    hits = 0
    while hits < 40:
        g = random_ray_tree(rng, rng.randrange(2, 8))
        f = principal_function(rng, g)
        u = rng.choice(g.vertices)
        incident = [e for e in g.edges if u in e[:2]]
        if not incident:
            continue
        hits += 1
        # eps a common multiple of the incident lengths keeps slopes integral
        lcm = F(1)
        for _, _, ln in incident:
            lcm = F(
                math.lcm(lcm.numerator, ln.numerator),
                math.gcd(lcm.denominator, ln.denominator),
            )
        eps = lcm * rng.choice((1, -1, 2))
        idx = g.vertices.index(u)
        vals = list(f.values)
        vals[idx] += eps
        bad = PLFunction(g, tuple(vals), f.ray_slopes)
        report = check_slope_formula(g, bad)
        assert not report.ok
        want = -sum(eps / ln for _, _, ln in incident)
        assert dict(report.defects)[u] == want
