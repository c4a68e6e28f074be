"""Tropical plane curves from coefficient valuations via Newton duality.

Min-plus convention throughout: the curve of f = sum c_alpha x^alpha is
the corner locus of X -> min over the support of (val(c_alpha) + alpha.X),
the set where the minimum is attained at least twice. Vertices are dual to
the 2-cells of the regular subdivision induced by the lower hull of the
lifted support, bounded edges to interior subdivision edges, rays to
boundary edges. A ray dual to a boundary edge points along minus the
outward normal of the Newton polygon there, so x + y + 1 has rays (1,0),
(0,1) and (-1,-1). Edge weights are lattice lengths of the dual Newton
edges.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from .arith import LaurentPoly, PuiseuxCoeff, as_fraction
from .errors import DimensionMismatch, MonomialCurve
from .lattice import gcd_vector, primitive_vector


def _cross(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _hull(points):
    """Convex hull in counterclockwise order, collinear points dropped."""
    pts = sorted(set(points))
    if len(pts) <= 2:
        return pts
    lower = []
    for p in pts:
        while len(lower) >= 2 and _cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper = []
    for p in reversed(pts):
        while len(upper) >= 2 and _cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return lower[:-1] + upper[:-1]


def _rational_direction(p, q):
    d = (q[0] - p[0], q[1] - p[1])
    den = d[0].denominator * d[1].denominator
    return primitive_vector((int(d[0] * den), int(d[1] * den)))


@dataclass(frozen=True)
class BoundedEdge:
    """Curve edge between two vertices, dual to an interior Newton edge."""

    src: int
    dst: int
    weight: int

    def __post_init__(self):
        if self.weight < 1:
            raise ValueError("edge weight must be positive")


@dataclass(frozen=True)
class Ray:
    """Unbounded curve edge from a vertex in a primitive direction."""

    src: int
    direction: tuple
    weight: int

    def __post_init__(self):
        d = tuple(int(x) for x in self.direction)
        if gcd_vector(d) != 1:
            raise ValueError("ray direction must be a primitive vector")
        object.__setattr__(self, "direction", d)
        if self.weight < 1:
            raise ValueError("ray weight must be positive")


@dataclass(frozen=True)
class TropPlaneCurve:
    """Corner locus as a weighted 1-complex: vertices, segments, rays."""

    vertices: tuple
    edges: tuple

    def __post_init__(self):
        verts = tuple(
            (as_fraction(a), as_fraction(b)) for a, b in self.vertices
        )
        object.__setattr__(self, "vertices", verts)
        for e in self.edges:
            if isinstance(e, BoundedEdge):
                ok = 0 <= e.src < len(verts) and 0 <= e.dst < len(verts)
                ok = ok and e.src != e.dst
            elif isinstance(e, Ray):
                ok = 0 <= e.src < len(verts)
            else:
                raise TypeError(f"not a curve edge: {e!r}")
            if not ok:
                raise ValueError("edge endpoint out of range")

    @property
    def segments(self):
        return tuple(e for e in self.edges if isinstance(e, BoundedEdge))

    @property
    def rays(self):
        return tuple(e for e in self.edges if isinstance(e, Ray))

    def contains(self, point):
        """Exact membership of a rational point in the 1-complex."""
        x = (as_fraction(point[0]), as_fraction(point[1]))
        for v in self.vertices:
            if v == x:
                return True
        for e in self.edges:
            p = self.vertices[e.src]
            d = (x[0] - p[0], x[1] - p[1])
            if isinstance(e, BoundedEdge):
                q = self.vertices[e.dst]
                s = (q[0] - p[0], q[1] - p[1])
                if d[0] * s[1] - d[1] * s[0] != 0:
                    continue
                dot = d[0] * s[0] + d[1] * s[1]
                if 0 <= dot <= s[0] * s[0] + s[1] * s[1]:
                    return True
            else:
                dx, dy = e.direction
                if d[0] * dy - d[1] * dx == 0 and d[0] * dx + d[1] * dy >= 0:
                    return True
        return False


@dataclass(frozen=True)
class NewtonSubdivision:
    """Support with lifts and the cells of the induced regular subdivision.

    Cells are tuples of support indices; every lifted point of a cell lies
    on that cell's lower supporting plane.
    """

    support_points: tuple
    lifts: tuple
    cells: tuple


def _support(f):
    if f.num_vars != 2:
        raise DimensionMismatch("plane curves need exactly two variables")
    if f.is_zero:
        raise MonomialCurve("zero polynomial has no curve")
    if len(f.terms) == 1:
        raise MonomialCurve("monomial input gives an empty curve")
    rows = sorted(
        ((int(e[0]), int(e[1])), c.val().value) for e, c in f.terms
    )
    pts = tuple(p for p, _ in rows)
    lifts = tuple(v for _, v in rows)
    return pts, lifts


def _lower_facets(pts, lifts):
    """Lower-hull facets as (s, t, tight) with lift >= s.alpha + t, equality
    exactly on the tight cell."""
    m = len(pts)
    facets = {}
    for i, j, k in combinations(range(m), 3):
        a, b, c = pts[i], pts[j], pts[k]
        d1 = (b[0] - a[0], b[1] - a[1])
        d2 = (c[0] - a[0], c[1] - a[1])
        det = d1[0] * d2[1] - d1[1] * d2[0]
        if det == 0:
            continue
        r1 = lifts[j] - lifts[i]
        r2 = lifts[k] - lifts[i]
        s1 = Fraction(r1 * d2[1] - r2 * d1[1], det)
        s2 = Fraction(d1[0] * r2 - d2[0] * r1, det)
        if (s1, s2) in facets:
            continue
        t = lifts[i] - s1 * a[0] - s2 * a[1]
        tight = []
        lower = True
        for q in range(m):
            rest = lifts[q] - s1 * pts[q][0] - s2 * pts[q][1]
            if rest < t:
                lower = False
                break
            if rest == t:
                tight.append(q)
        if lower:
            facets[(s1, s2)] = (s1, s2, t, tuple(tight))
    return sorted(facets.values())


def _collinear_positions(pts):
    base = pts[0]
    e = None
    for p in pts[1:]:
        d = (p[0] - base[0], p[1] - base[1])
        if d != (0, 0):
            e = primitive_vector(d)
            break
    ks = []
    for p in pts:
        d = (p[0] - base[0], p[1] - base[1])
        if d[0] * e[1] - d[1] * e[0] != 0:
            return None, None
        ks.append(d[0] // e[0] if e[0] else d[1] // e[1])
    return e, ks


def newton_subdivision(f):
    pts, lifts = _support(f)
    e, ks = _collinear_positions(pts)
    if e is not None:
        cells = []
        hull = _lower_envelope(ks, lifts)
        for (ka, va), (kb, vb) in zip(hull, hull[1:]):
            slope = Fraction(vb - va, kb - ka)
            cell = tuple(
                q for q in range(len(pts))
                if ka <= ks[q] <= kb and lifts[q] - va == slope * (ks[q] - ka)
            )
            cells.append(cell)
        return NewtonSubdivision(pts, lifts, tuple(sorted(cells)))
    facets = _lower_facets(pts, lifts)
    return NewtonSubdivision(pts, lifts, tuple(t for _, _, _, t in facets))


def _lower_envelope(ks, lifts):
    rows = sorted(zip(ks, lifts))
    hull = []
    for p in rows:
        while len(hull) >= 2 and _cross(hull[-2], hull[-1], p) <= 0:
            hull.pop()
        hull.append(p)
    return hull


def _lattice_length(a, b):
    return gcd_vector((b[0] - a[0], b[1] - a[1]))


def tropicalize_curve(f):
    """Dual curve of the regular subdivision of the Newton polygon of f."""
    pts, lifts = _support(f)
    e, ks = _collinear_positions(pts)
    if e is not None:
        return _collinear_curve(e, ks, lifts)
    facets = _lower_facets(pts, lifts)
    vertices = tuple((-s1, -s2) for s1, s2, _, _ in facets)
    edge_cells = {}
    for ci, (_, _, _, tight) in enumerate(facets):
        hull = _hull([pts[q] for q in tight])
        for a, b in zip(hull, hull[1:] + hull[:1]):
            key = (a, b) if a < b else (b, a)
            edge_cells.setdefault(key, []).append(ci)
    edges = []
    for (a, b), cells in sorted(edge_cells.items()):
        w = _lattice_length(a, b)
        if len(cells) == 2:
            edges.append(BoundedEdge(cells[0], cells[1], w))
            continue
        ci = cells[0]
        d = primitive_vector((b[1] - a[1], a[0] - b[0]))
        for q in facets[ci][3]:
            side = _cross(a, b, pts[q])
            if side != 0:
                if (pts[q][0] - a[0]) * d[0] + (pts[q][1] - a[1]) * d[1] < 0:
                    d = (-d[0], -d[1])
                break
        edges.append(Ray(ci, d, w))
    return TropPlaneCurve(vertices, tuple(edges))


def _collinear_curve(e, ks, lifts):
    # support on one line: the curve is a family of parallel lines, one per
    # lower-envelope edge, each stored as two opposite rays from the foot
    # of the perpendicular from the origin
    hull = _lower_envelope(ks, lifts)
    norm = Fraction(e[0] * e[0] + e[1] * e[1])
    d = primitive_vector((-e[1], e[0]))
    vertices = []
    edges = []
    for idx, ((ka, va), (kb, vb)) in enumerate(zip(hull, hull[1:])):
        c = Fraction(va - vb, kb - ka)
        vertices.append((c * e[0] / norm, c * e[1] / norm))
        w = kb - ka
        edges.append(Ray(idx, d, w))
        edges.append(Ray(idx, (-d[0], -d[1]), w))
    return TropPlaneCurve(tuple(vertices), tuple(edges))


@dataclass(frozen=True)
class BalancingReport:
    ok: bool
    defects: tuple  # ((vertex index, (dx, dy)), ...)

    def __bool__(self):
        return self.ok


def check_balancing(curve):
    """Weighted primitive directions must cancel at every vertex."""
    sums = {i: [Fraction(0), Fraction(0)] for i in range(len(curve.vertices))}
    for e in curve.edges:
        if isinstance(e, BoundedEdge):
            d = _rational_direction(curve.vertices[e.src],
                                    curve.vertices[e.dst])
            sums[e.src][0] += e.weight * d[0]
            sums[e.src][1] += e.weight * d[1]
            sums[e.dst][0] -= e.weight * d[0]
            sums[e.dst][1] -= e.weight * d[1]
        else:
            sums[e.src][0] += e.weight * e.direction[0]
            sums[e.src][1] += e.weight * e.direction[1]
    defects = tuple(
        (i, (dx, dy)) for i, (dx, dy) in sorted(sums.items())
        if dx != 0 or dy != 0
    )
    return BalancingReport(not defects, defects)


def is_connected(curve):
    """Connectivity of the 1-complex; rays never join components."""
    k = len(curve.vertices)
    if k <= 1:
        return True
    parent = list(range(k))

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for e in curve.segments:
        parent[find(e.src)] = find(e.dst)
    return len({find(v) for v in range(k)}) == 1


def weierstrass_case(va, vb):
    """Fibers of the plane cubic family split by the sign of 3va - 2vb."""
    return "A" if 3 * as_fraction(va) >= 2 * as_fraction(vb) else "B"


def weierstrass_curve_poly(va, vb):
    """y^2 - x^3 - a x - b with val(a) = va, val(b) = vb."""
    return LaurentPoly.from_terms(2, [
        ((0, 2), PuiseuxCoeff.one()),
        ((3, 0), -PuiseuxCoeff.one()),
        ((1, 0), -PuiseuxCoeff.t_power(va)),
        ((0, 0), -PuiseuxCoeff.t_power(vb)),
    ])
