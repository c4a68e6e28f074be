"""Standard semistable blocks and metric-graph skeleta.

A standard block couples r + 1 double-point coordinates whose valuations
sum to vpi with s further nonnegative ones; its skeleton is stored in the
projected coordinates v_1..v_{r+s}, a polyhedron Sigma with v >= 0 and
v_1 + ... + v_r <= vpi (v_0 is recomputed on demand). Evaluation at a
skeleton point is the bounded multiplicative norm: in valuation terms the
minimum over terms of coeff_val plus the exponent-weighted sum of the
first r + s coordinates; variables beyond r + s are units there.

Metric graphs carry piecewise-affine functions with integer slopes; the
slope formula says outgoing slopes at each vertex sum to zero.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .arith import TropNum, as_fraction
from .errors import (
    DimensionMismatch,
    NegativeExponentAtBoundary,
    NonIntegralSlope,
    OutsideDomain,
)
from .polyhedra import GammaPolyhedron


@dataclass(frozen=True)
class StandardBlock:
    """Block data (d, r, s, vpi) with 0 <= r, r + s <= d and vpi > 0."""

    d: int
    r: int
    s: int
    vpi: Fraction

    def __post_init__(self):
        object.__setattr__(self, "vpi", as_fraction(self.vpi))
        if not (0 <= self.r <= self.d):
            raise ValueError("need 0 <= r <= d")
        if self.s < 0 or self.r + self.s > self.d:
            raise ValueError("need s >= 0 and r + s <= d")
        if self.vpi <= 0:
            raise ValueError("vpi must be positive")


@dataclass(frozen=True)
class BlockPoint:
    """Projected skeleton coordinates v_1..v_{r+s}, all nonnegative."""

    v: tuple

    def __post_init__(self):
        vv = tuple(as_fraction(x) for x in self.v)
        if any(x < 0 for x in vv):
            raise OutsideDomain("skeleton coordinates must be nonnegative")
        object.__setattr__(self, "v", vv)

    def v0(self, block):
        """The dropped coordinate vpi - (v_1 + ... + v_r)."""
        return block.vpi - sum(self.v[: block.r], Fraction(0))


def block_polytope(block):
    """Sigma as a polyhedron in R^(r+s)."""
    m = block.r + block.s
    cons = []
    for t in range(m):
        e = [0] * m
        e[t] = 1
        cons.append((tuple(e), Fraction(0)))
    if block.r:
        row = tuple(-1 if t < block.r else 0 for t in range(m))
        cons.append((row, block.vpi))
    return GammaPolyhedron(m, tuple(cons))


def block_sigma_eval(block, point, f):
    """Valuation of f at the skeleton point: min over terms of
    coeff_val plus sum of exponent times coordinate over t <= r+s."""
    m = block.r + block.s
    if len(point.v) != m:
        raise DimensionMismatch("point length != r + s")
    if f.num_vars != block.d:
        raise DimensionMismatch("polynomial is not in the block variables")
    for exps, _ in f.terms:
        if any(e < 0 for e in exps):
            raise NegativeExponentAtBoundary(
                "block evaluation needs nonnegative exponents"
            )
    if point.v0(block) < 0:
        raise OutsideDomain("coordinates exceed the simplex bound")
    rs = list(point.v) + [Fraction(0)] * (block.d - m)
    return f.gauss_eval(rs)


@dataclass(frozen=True)
class MetricGraph:
    """Finite graph with positive rational edge lengths and tagged rays."""

    vertices: tuple
    edges: tuple  # ((a, b, length), ...)
    rays: tuple  # ((base, tag), ...)

    def __post_init__(self):
        verts = tuple(self.vertices)
        if len(set(verts)) != len(verts):
            raise ValueError("duplicate vertex")
        vset = set(verts)
        edges = []
        for a, b, ln in self.edges:
            ln = as_fraction(ln)
            if a not in vset or b not in vset:
                raise ValueError(f"edge endpoint not a vertex: ({a},{b})")
            if a == b:
                raise ValueError("self-loop edge")
            if ln <= 0:
                raise ValueError("edge length must be positive")
            edges.append((a, b, ln))
        rays = []
        tags = set()
        for base, tag in self.rays:
            if base not in vset:
                raise ValueError(f"ray base not a vertex: {base}")
            if tag in tags:
                raise ValueError(f"duplicate ray tag: {tag}")
            tags.add(tag)
            rays.append((base, tag))
        object.__setattr__(self, "vertices", verts)
        object.__setattr__(self, "edges", tuple(edges))
        object.__setattr__(self, "rays", tuple(rays))

    def degrees(self, u):
        if u not in set(self.vertices):
            raise ValueError(f"not a vertex: {u}")
        deg_b = sum(1 for a, b, _ in self.edges if u in (a, b))
        deg_u = sum(1 for base, _ in self.rays if base == u)
        return deg_b, deg_u


def degrees(graph, u):
    """(bounded-edge degree, ray degree) of a vertex."""
    return graph.degrees(u)


@dataclass(frozen=True)
class PLFunction:
    """Vertex values plus ray slopes; affine with integer slope per edge."""

    graph: MetricGraph
    values: tuple  # Fractions aligned with graph.vertices
    ray_slopes: tuple  # ints aligned with graph.rays

    def __post_init__(self):
        vals = tuple(as_fraction(x) for x in self.values)
        if len(vals) != len(self.graph.vertices):
            raise DimensionMismatch("one value per vertex required")
        slopes = tuple(int(s) for s in self.ray_slopes)
        if len(slopes) != len(self.graph.rays):
            raise DimensionMismatch("one slope per ray required")
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "ray_slopes", slopes)
        idx = {u: i for i, u in enumerate(self.graph.vertices)}
        for a, b, ln in self.graph.edges:
            rise = vals[idx[b]] - vals[idx[a]]
            if (rise / ln).denominator != 1:
                raise NonIntegralSlope(
                    f"edge ({a},{b}) slope {rise}/{ln} is not an integer"
                )

    @classmethod
    def on(cls, graph, values, ray_slopes=None):
        """Build from mappings keyed by vertex and ray tag."""
        ray_slopes = ray_slopes or {}
        return cls(
            graph,
            tuple(values[u] for u in graph.vertices),
            tuple(ray_slopes.get(tag, 0) for _, tag in graph.rays),
        )

    def value(self, u):
        return self.values[self.graph.vertices.index(u)]

    def ray_slope(self, tag):
        for (_, t), s in zip(self.graph.rays, self.ray_slopes):
            if t == tag:
                return s
        raise ValueError(f"no ray tagged {tag}")


def edge_slope(F, u, edge):
    """Outgoing slope of F at u along a bounded edge (a, b, length)."""
    a, b, ln = edge
    if u == a:
        w = b
    elif u == b:
        w = a
    else:
        raise ValueError("edge is not incident to the vertex")
    return (F.value(w) - F.value(u)) / as_fraction(ln)


@dataclass(frozen=True)
class SlopeReport:
    ok: bool
    vertex_sums: tuple  # ((vertex, sum), ...) for every vertex
    defects: tuple  # the nonzero entries

    def __bool__(self):
        return self.ok


def check_slope_formula(graph, F):
    """Outgoing slopes at every vertex must sum to zero."""
    if F.graph != graph:
        raise DimensionMismatch("function is defined on a different graph")
    sums = {u: Fraction(0) for u in graph.vertices}
    idx = {u: i for i, u in enumerate(graph.vertices)}
    for a, b, ln in graph.edges:
        rise = F.values[idx[b]] - F.values[idx[a]]
        sums[a] += rise / ln
        sums[b] -= rise / ln
    for (base, _), s in zip(graph.rays, F.ray_slopes):
        sums[base] += s
    vertex_sums = tuple((u, sums[u]) for u in graph.vertices)
    defects = tuple((u, s) for u, s in vertex_sums if s != 0)
    return SlopeReport(not defects, vertex_sums, defects)
