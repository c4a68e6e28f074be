"""JSON schemas for every domain object, with strict validation.

Rationals travel as reduced "p/q" strings with positive denominator (plain
JSON integers are accepted on input). Valuations use "inf" for the valuation
of zero; log-values use "-inf". Parsers raise SchemaError on any shape
problem so the CLI can map those to exit code 2, keeping domain errors
(exit 1) separate.
"""

import json
from fractions import Fraction

from .arith import LaurentPoly, PuiseuxCoeff, TropNum
from .curves import BoundedEdge, Ray, TropPlaneCurve
from .errors import SchemaError
from .grassmann import NEG_INF, PlueckerPoint
from .polyhedra import GammaAffineMap, GammaPolyhedron
from .skeleton import MetricGraph, PLFunction, StandardBlock
from .trees import PhyloTree, iter_pairs


def _need(cond, msg):
    if not cond:
        raise SchemaError(msg)


def _obj(doc, required, optional=()):
    _need(isinstance(doc, dict), f"expected an object with keys {required}")
    allowed = set(required) | set(optional)
    for k in doc:
        _need(k in allowed, f"unexpected key {k!r}")
    for k in required:
        _need(k in doc, f"missing key {k!r}")
    return doc


def _int(v, what):
    _need(isinstance(v, int) and not isinstance(v, bool), f"{what} must be an integer")
    return v


def parse_rational(v, what="value"):
    if isinstance(v, int) and not isinstance(v, bool):
        return Fraction(v)
    _need(isinstance(v, str), f"{what} must be an integer or a 'p/q' string")
    parts = v.split("/")
    _need(len(parts) == 2, f"{what} must look like 'p/q', got {v!r}")
    try:
        p, q = int(parts[0]), int(parts[1])
    except ValueError:
        raise SchemaError(f"{what} must have integer parts, got {v!r}")
    _need(q != 0, f"{what} has zero denominator")
    return Fraction(p, q)


def fmt_rational(x) -> str:
    f = Fraction(x)
    return f"{f.numerator}/{f.denominator}"


def fmt_val(v: TropNum) -> str:
    """Valuation display: 'inf' marks the valuation of zero."""
    return "inf" if v.is_inf else fmt_rational(v.value)


def fmt_log(v) -> str:
    """Log display: NEG_INF marks log of zero."""
    return "-inf" if v is NEG_INF else fmt_rational(v)


# --- Laurent polynomials ----------------------------------------------------


def parse_coeff(doc):
    _need(isinstance(doc, list) and doc, "coefficient must be a nonempty list")
    terms = []
    for item in doc:
        _obj(item, ("gamma", "r"))
        terms.append((parse_rational(item["gamma"], "gamma"),
                      parse_rational(item["r"], "r")))
    c = PuiseuxCoeff.from_terms(terms)
    _need(not c.is_zero, "coefficient terms cancel to zero")
    return c


def emit_coeff(c: PuiseuxCoeff):
    return [{"gamma": fmt_rational(g), "r": fmt_rational(r)} for g, r in c.terms]


def parse_poly(doc, num_vars=None):
    _need(isinstance(doc, list), "polynomial must be a list of terms")
    terms = []
    for item in doc:
        _obj(item, ("exponents", "coeff"))
        exps = item["exponents"]
        _need(isinstance(exps, list), "exponents must be a list")
        exps = tuple(_int(e, "exponent") for e in exps)
        if num_vars is None:
            num_vars = len(exps)
        _need(len(exps) == num_vars, "inconsistent exponent vector length")
        terms.append((exps, parse_coeff(item["coeff"])))
    _need(num_vars is not None, "cannot infer variable count from an empty polynomial")
    return LaurentPoly.from_terms(num_vars, terms)


def emit_poly(f: LaurentPoly):
    return [
        {"exponents": list(exps), "coeff": emit_coeff(c)} for exps, c in f.terms
    ]


# --- Pluecker points ----------------------------------------------------------


def parse_pluecker(doc):
    _obj(doc, ("n", "x"))
    n = _int(doc["n"], "n")
    _need(2 <= n <= 9, "n must be between 2 and 9 (two-digit keys are ambiguous)")
    x = doc["x"]
    _need(isinstance(x, dict), "x must map 'kl' keys to rationals")
    want = {f"{k}{l}" for k, l in iter_pairs(n)}
    _need(set(x) == want, f"x must carry exactly the keys {sorted(want)}")
    mapping = {
        (int(key[0]), int(key[1])): parse_rational(val, f"x[{key}]")
        for key, val in x.items()
    }
    return PlueckerPoint.from_map(n, mapping)


def emit_pluecker(x: PlueckerPoint):
    return {
        "n": x.n,
        "x": {f"{k}{l}": fmt_rational(v) for (k, l), v in x.items()},
    }


# --- trees -------------------------------------------------------------------


def parse_tree(doc):
    _obj(doc, ("n", "edges", "leaves"))
    n = _int(doc["n"], "n")
    _need(isinstance(doc["edges"], list), "edges must be a list")
    edges = []
    for item in doc["edges"]:
        _obj(item, ("a", "b", "w"))
        edges.append((_int(item["a"], "a"), _int(item["b"], "b"),
                      parse_rational(item["w"], "w")))
    leaves = doc["leaves"]
    _need(isinstance(leaves, dict), "leaves must map labels to node ids")
    _need(set(leaves) == {str(k) for k in range(1, n + 1)},
          "leaves must carry exactly the labels 1..n")
    return PhyloTree(n, tuple(edges),
                     tuple(_int(leaves[str(k)], "leaf") for k in range(1, n + 1)))


def emit_tree(tree: PhyloTree):
    return {
        "n": tree.n,
        "edges": [{"a": a, "b": b, "w": fmt_rational(w)} for a, b, w in tree.edges],
        "leaves": {str(k + 1): v for k, v in enumerate(tree.leaves)},
    }


# --- plane curves --------------------------------------------------------------


def parse_curve(doc):
    # "case" is the optional Weierstrass label emitted by trop-curve
    _obj(doc, ("vertices", "edges"), optional=("case",))
    if "case" in doc:
        _need(doc["case"] in ("A", "B"), "case must be 'A' or 'B'")
    _need(isinstance(doc["vertices"], list), "vertices must be a list")
    verts = []
    for v in doc["vertices"]:
        _need(isinstance(v, list) and len(v) == 2, "vertex must be a 2-vector")
        verts.append((parse_rational(v[0], "vertex"), parse_rational(v[1], "vertex")))
    edges = []
    _need(isinstance(doc["edges"], list), "edges must be a list")
    for item in doc["edges"]:
        _need(isinstance(item, dict) and "kind" in item, "edge needs a kind")
        if item["kind"] == "segment":
            _obj(item, ("kind", "src", "dst", "weight"))
            edges.append(BoundedEdge(_int(item["src"], "src"),
                                     _int(item["dst"], "dst"),
                                     _int(item["weight"], "weight")))
        elif item["kind"] == "ray":
            _obj(item, ("kind", "src", "direction", "weight"))
            d = item["direction"]
            _need(isinstance(d, list) and len(d) == 2, "direction must be a 2-vector")
            edges.append(Ray(_int(item["src"], "src"),
                             (_int(d[0], "direction"), _int(d[1], "direction")),
                             _int(item["weight"], "weight")))
        else:
            raise SchemaError(f"unknown edge kind {item['kind']!r}")
    return TropPlaneCurve(tuple(verts), tuple(edges))


def emit_curve(curve: TropPlaneCurve):
    edges = []
    for e in curve.edges:
        if isinstance(e, BoundedEdge):
            edges.append({"kind": "segment", "src": e.src, "dst": e.dst,
                          "weight": e.weight})
        else:
            edges.append({"kind": "ray", "src": e.src,
                          "direction": list(e.direction), "weight": e.weight})
    return {
        "vertices": [[fmt_rational(a), fmt_rational(b)] for a, b in curve.vertices],
        "edges": edges,
    }


# --- polyhedra and affine maps ---------------------------------------------------


def parse_polyhedron(doc):
    _obj(doc, ("dim", "constraints"))
    dim = _int(doc["dim"], "dim")
    _need(isinstance(doc["constraints"], list), "constraints must be a list")
    cons = []
    for item in doc["constraints"]:
        _obj(item, ("u", "gamma"))
        u = item["u"]
        _need(isinstance(u, list) and len(u) == dim, "u must be a dim-vector")
        cons.append((tuple(_int(c, "u entry") for c in u),
                     parse_rational(item["gamma"], "gamma")))
    return GammaPolyhedron(dim, tuple(cons))


def emit_polyhedron(P: GammaPolyhedron):
    return {
        "dim": P.ambient_dim,
        "constraints": [
            {"u": [int(c) for c in u], "gamma": fmt_rational(g)}
            for u, g in P.constraints
        ],
    }


def parse_affine_map(doc):
    _obj(doc, ("A", "b"))
    A = doc["A"]
    _need(isinstance(A, list) and A, "A must be a nonempty matrix")
    rows = []
    width = None
    for row in A:
        _need(isinstance(row, list), "A rows must be lists")
        if width is None:
            width = len(row)
        _need(len(row) == width, "A rows must have equal length")
        rows.append(tuple(_int(c, "A entry") for c in row))
    b = doc["b"]
    _need(isinstance(b, list) and len(b) == len(rows), "b must match the rows of A")
    return GammaAffineMap(tuple(rows), tuple(parse_rational(x, "b entry") for x in b))


def emit_affine_map(F: GammaAffineMap):
    return {
        "A": [[int(c) for c in row] for row in F.linear],
        "b": [fmt_rational(x) for x in F.shift],
    }


# --- metric graphs and PL functions ------------------------------------------------


def parse_metric_graph(doc):
    _obj(doc, ("vertices", "edges", "rays"))
    vs = doc["vertices"]
    _need(isinstance(vs, list), "vertices must be a list")
    for v in vs:
        _need(isinstance(v, str), "vertex ids must be strings")
    edges = []
    _need(isinstance(doc["edges"], list), "edges must be a list")
    for item in doc["edges"]:
        _obj(item, ("a", "b", "len"))
        _need(isinstance(item["a"], str) and isinstance(item["b"], str),
              "edge endpoints must be vertex id strings")
        edges.append((item["a"], item["b"], parse_rational(item["len"], "len")))
    rays = []
    _need(isinstance(doc["rays"], list), "rays must be a list")
    for item in doc["rays"]:
        _obj(item, ("base", "id"))
        _need(isinstance(item["base"], str) and isinstance(item["id"], str),
              "ray base and id must be strings")
        rays.append((item["base"], item["id"]))
    return MetricGraph(tuple(vs), tuple(edges), tuple(rays))


def emit_metric_graph(g: MetricGraph):
    return {
        "vertices": list(g.vertices),
        "edges": [{"a": a, "b": b, "len": fmt_rational(ln)} for a, b, ln in g.edges],
        "rays": [{"base": base, "id": tag} for base, tag in g.rays],
    }


def parse_plfunction(doc, graph: MetricGraph):
    _obj(doc, ("values",), optional=("raySlopes",))
    values = doc["values"]
    _need(isinstance(values, dict), "values must map vertex ids to rationals")
    _need(set(values) == set(graph.vertices),
          "values must carry exactly the graph's vertex ids")
    slopes = doc.get("raySlopes", {})
    _need(isinstance(slopes, dict), "raySlopes must map ray ids to integers")
    tags = {tag for _, tag in graph.rays}
    for tag in slopes:
        _need(tag in tags, f"raySlopes names an unknown ray {tag!r}")
    return PLFunction.on(
        graph,
        {u: parse_rational(values[u], f"values[{u}]") for u in graph.vertices},
        {tag: _int(s, "ray slope") for tag, s in slopes.items()},
    )


def emit_plfunction(f: PLFunction):
    return {
        "values": {u: fmt_rational(v) for u, v in zip(f.graph.vertices, f.values)},
        "raySlopes": {tag: s for (_, tag), s in zip(f.graph.rays, f.ray_slopes)},
    }


# --- blocks ------------------------------------------------------------------------


def parse_block(doc):
    _obj(doc, ("d", "r", "s", "vpi"))
    try:
        return StandardBlock(
            _int(doc["d"], "d"), _int(doc["r"], "r"), _int(doc["s"], "s"),
            parse_rational(doc["vpi"], "vpi"),
        )
    except ValueError as exc:
        raise SchemaError(str(exc))


def dumps(doc) -> str:
    """Canonical serialization: sorted keys, no whitespace, one newline."""
    return json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n"
