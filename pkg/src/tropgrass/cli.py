"""Command-line entry point.

One subcommand per operation family, JSON in and JSON out on stdout by
default. Exit codes: 0 success, 1 domain error (structured JSON on stdout),
2 malformed input, 64 unknown subcommand. Identical inputs give byte
identical outputs; TROPGRASS_SEED pins the sampled verification commands.
"""

import argparse
import json
import os
import random
import sys
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction

from . import jsonio
from .arith import LaurentPoly, PuiseuxCoeff
from .curves import (
    check_balancing,
    is_connected,
    tropicalize_curve,
    weierstrass_case,
    weierstrass_curve_poly,
)
from .errors import SchemaError, TropgrassError
from .grassmann import (
    NEG_INF,
    PlueckerPoint,
    combinatorial_type,
    convert_convention,
    eval_pair_poly,
    expand_pluecker,
    build_cherry_order,
    membership,
    section_choices,
    section_well_defined,
    verify_section_identity,
)
from .jsonio import _int, _need, _obj, fmt_log, fmt_rational, fmt_val, parse_rational
from .polyhedra import unimodular_on
from .skeleton import BlockPoint, block_sigma_eval, check_slope_formula
from .trees import PhyloTree, iter_pairs, to_newick, tree_distance

USAGE = """usage: tropgrass SUBCOMMAND [INPUT] [options]

subcommands:
  trop-curve        Laurent polynomial (2 vars) -> tropical plane curve
  balance-check     curve -> balancing report per vertex
  pluecker-check    point -> membership and combinatorial tree type
  tree-from-pluecker  point -> tree (error when not a member)
  section-eval      point + pair polynomial -> section log-value
  section-verify    point / tree / random instance -> identity report
  block-eval        block + point + polynomial -> Gauss valuation
  slope-check       metric graph + PL function -> slope-sum report
  unimodular-check  affine map + polyhedron -> unimodularity verdict

options:
  INPUT             input file path ('-' or omitted reads stdin)
  --inline JSON     take the input document from the argument
  -o, --output PATH write the result to a file instead of stdout
  --format {json,svg}   svg is available for trop-curve only
  --convention {val,log}  display convention for values
  --batch           input is an array; map the subcommand over it
  --scale N         svg pixels per lattice unit (default 40)
seed: set TROPGRASS_SEED to pin the sampled verification subcommands
"""


def _env_seed():
    raw = os.environ.get("TROPGRASS_SEED", "0")
    try:
        return int(raw)
    except ValueError:
        raise SchemaError(f"TROPGRASS_SEED must be an integer, got {raw!r}") from None


def _error_doc(exc):
    return {"error": {"type": type(exc).__name__, "message": str(exc)}}


# --- sampled instances -------------------------------------------------------


def _random_tree(rng, n):
    """Random trivalent topology by repeated cherry joining."""
    def w():
        return Fraction(rng.randrange(0, 7), rng.choice((1, 2, 3)))

    active = list(range(1, n + 1))
    nxt = n + 1
    edges = []
    while len(active) > 3:
        rng.shuffle(active)
        a, b = active.pop(), active.pop()
        edges += [(a, nxt, w()), (b, nxt, w())]
        active.append(nxt)
        nxt += 1
    if len(active) == 3:
        edges += [(v, nxt, w()) for v in active]
    else:
        edges.append((active[0], active[1], w()))
    return PhyloTree(n, tuple(edges), tuple(range(1, n + 1)))


def _random_pair_poly(rng, n):
    m = sum(1 for _ in iter_pairs(n))
    while True:
        terms = []
        for _ in range(rng.randrange(1, 4)):
            exps = [0] * m
            for _ in range(rng.randrange(1, 4)):
                exps[rng.randrange(m)] += rng.choice((-2, -1, 1, 2))
            if rng.random() < 0.3:
                c = PuiseuxCoeff.t_power(Fraction(rng.randrange(-2, 3)))
            else:
                c = PuiseuxCoeff.rational(rng.randrange(-4, 5) or 1)
            terms.append((tuple(exps), c))
        f = LaurentPoly.from_terms(m, terms)
        if not f.is_zero:
            return f


# --- svg ----------------------------------------------------------------------


def curve_svg(curve, scale=40):
    """Path elements only; rays are drawn as dashed stubs of ~2 units."""
    pts = list(curve.vertices)
    strokes = []
    for e in curve.segments:
        strokes.append((curve.vertices[e.src], curve.vertices[e.dst], e.weight, False))
    for e in curve.rays:
        base = curve.vertices[e.src]
        dx, dy = e.direction
        step = Fraction(2, max(abs(dx), abs(dy)))
        tip = (base[0] + dx * step, base[1] + dy * step)
        pts.append(tip)
        strokes.append((base, tip, e.weight, True))
    if not pts:
        return '<svg xmlns="http://www.w3.org/2000/svg" width="10" height="10"/>\n'
    xs = [p[0] for p in pts]
    ys = [p[1] for p in pts]
    xmin, xmax = min(xs), max(xs)
    ymin, ymax = min(ys), max(ys)

    def X(x):
        return float((x - xmin + 1) * scale)

    def Y(y):
        return float((ymax - y + 1) * scale)

    width = float((xmax - xmin + 2) * scale)
    height = float((ymax - ymin + 2) * scale)
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width:g}" height="{height:g}">'
    ]
    for a, b, weight, dashed in strokes:
        dash = ' stroke-dasharray="4 3"' if dashed else ""
        out.append(
            f'<path d="M {X(a[0]):.2f} {Y(a[1]):.2f} L {X(b[0]):.2f} {Y(b[1]):.2f}"'
            f' stroke="black" stroke-width="{weight}" fill="none"{dash}/>'
        )
    for v in curve.vertices:
        out.append(f'<circle cx="{X(v[0]):.2f}" cy="{Y(v[1]):.2f}" r="3"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


# --- subcommands ----------------------------------------------------------------


def _cmd_trop_curve(doc, flags):
    case = None
    if isinstance(doc, dict):
        _obj(doc, ("weierstrass",))
        w = _obj(doc["weierstrass"], ("va", "vb"))
        va = parse_rational(w["va"], "va")
        vb = parse_rational(w["vb"], "vb")
        f = weierstrass_curve_poly(va, vb)
        case = weierstrass_case(va, vb)
    else:
        f = jsonio.parse_poly(doc, num_vars=2 if doc == [] else None)
    curve = tropicalize_curve(f)
    if flags.format == "svg":
        return curve_svg(curve, flags.scale)
    out = jsonio.emit_curve(curve)
    if case is not None:
        out["case"] = case
    return out


def _cmd_balance_check(doc, flags):
    curve = jsonio.parse_curve(doc)
    report = check_balancing(curve)
    return {
        "ok": report.ok,
        "connected": is_connected(curve),
        "defects": [
            {"vertex": i, "sum": [fmt_rational(a), fmt_rational(b)]}
            for i, (a, b) in report.defects
        ],
    }


def _cmd_pluecker_check(doc, flags):
    x = jsonio.parse_pluecker(doc)
    out = {"member": membership(x)}
    if out["member"]:
        tree = combinatorial_type(x)
        out["tree"] = jsonio.emit_tree(tree)
        out["newick"] = to_newick(tree)
    return out


def _cmd_tree_from_pluecker(doc, flags):
    tree = combinatorial_type(jsonio.parse_pluecker(doc))
    return {"tree": jsonio.emit_tree(tree), "newick": to_newick(tree)}


def _parse_base(doc, n):
    base = doc.get("base", [1, 2])
    _need(isinstance(base, list) and len(base) == 2, "base must be a pair")
    i, j = _int(base[0], "base"), _int(base[1], "base")
    _need(1 <= i <= n and 1 <= j <= n and i != j, "base must name two leaves")
    return i, j


def _cmd_section_eval(doc, flags):
    _obj(doc, ("x", "f"), optional=("base",))
    x = jsonio.parse_pluecker(doc["x"])
    m = sum(1 for _ in iter_pairs(x.n))
    f = jsonio.parse_poly(doc["f"], num_vars=m)
    i, j = _parse_base(doc, x.n)
    tree = combinatorial_type(x)
    expansion = expand_pluecker(build_cherry_order(tree, i, j))
    v = eval_pair_poly(x, expansion, f)
    conv = flags.convention or "log"
    value = fmt_log(v) if conv == "log" else fmt_val(convert_convention(v))
    return {"value": value, "convention": conv, "base": [i, j]}


def _cmd_section_verify(doc, flags):
    _obj(doc, (), optional=("x", "tree", "random", "base"))
    given = [k for k in ("x", "tree", "random") if k in doc]
    _need(len(given) == 1, "provide exactly one of x, tree, random")
    rng = random.Random(_env_seed())
    tree = None
    if given[0] == "x":
        x = jsonio.parse_pluecker(doc["x"])
    elif given[0] == "tree":
        tree = jsonio.parse_tree(doc["tree"])
        x = PlueckerPoint.from_distances(tree_distance(tree))
    else:
        r = _obj(doc["random"], ("n",))
        n = _int(r["n"], "n")
        _need(4 <= n <= 9, "random instances need 4 <= n <= 9")
        tree = _random_tree(rng, n)
        x = PlueckerPoint.from_distances(tree_distance(tree))
    base = _parse_base(doc, x.n)
    report = verify_section_identity(x, tree=tree, base=base)
    choices = section_choices(x)
    panel = [_random_pair_poly(rng, x.n) for _ in range(20)]
    out = {
        "ok": report.ok,
        "pairs_checked": report.pairs_checked,
        "base": list(report.base),
        "well_defined": section_well_defined(x, panel, choices),
        "choices": len(choices),
    }
    if not report.ok:
        pair, want, got = report.first_violation
        out["violation"] = {
            "pair": list(pair),
            "want": fmt_rational(want),
            "got": fmt_log(got),
        }
    return out


def _cmd_block_eval(doc, flags):
    _obj(doc, ("block", "point", "f"))
    block = jsonio.parse_block(doc["block"])
    pt = doc["point"]
    _need(isinstance(pt, list), "point must be a list of rationals")
    point = BlockPoint(tuple(parse_rational(v, "point entry") for v in pt))
    f = jsonio.parse_poly(doc["f"], num_vars=block.d)
    v = block_sigma_eval(block, point, f)
    conv = flags.convention or "val"
    value = fmt_val(v) if conv == "val" else fmt_log(convert_convention(v))
    return {"value": value, "convention": conv}


def _cmd_slope_check(doc, flags):
    _obj(doc, ("graph", "F"))
    graph = jsonio.parse_metric_graph(doc["graph"])
    F = jsonio.parse_plfunction(doc["F"], graph)
    report = check_slope_formula(graph, F)
    return {
        "ok": report.ok,
        "vertexSums": {u: fmt_rational(s) for u, s in report.vertex_sums},
        "defects": {u: fmt_rational(s) for u, s in report.defects},
    }


def _cmd_unimodular_check(doc, flags):
    _obj(doc, ("map", "polyhedron"))
    F = jsonio.parse_affine_map(doc["map"])
    P = jsonio.parse_polyhedron(doc["polyhedron"])
    return {"unimodular": unimodular_on(F, P)}


HANDLERS = {
    "trop-curve": _cmd_trop_curve,
    "balance-check": _cmd_balance_check,
    "pluecker-check": _cmd_pluecker_check,
    "tree-from-pluecker": _cmd_tree_from_pluecker,
    "section-eval": _cmd_section_eval,
    "section-verify": _cmd_section_verify,
    "block-eval": _cmd_block_eval,
    "slope-check": _cmd_slope_check,
    "unimodular-check": _cmd_unimodular_check,
}


def _write(flags, text):
    if flags.output:
        with open(flags.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None):
    argv = list(sys.argv[1:]) if argv is None else list(argv)
    if not argv or argv[0] in ("-h", "--help"):
        sys.stdout.write(USAGE)
        return 0
    name = argv[0]
    if name not in HANDLERS:
        sys.stderr.write(f"tropgrass: unknown subcommand {name!r}\n{USAGE}")
        return 64
    ap = argparse.ArgumentParser(prog=f"tropgrass {name}", add_help=True)
    ap.add_argument("input", nargs="?")
    ap.add_argument("--inline")
    ap.add_argument("-o", "--output")
    ap.add_argument("--format", choices=("json", "svg"), default="json")
    ap.add_argument("--convention", choices=("val", "log"))
    ap.add_argument("--batch", action="store_true")
    ap.add_argument("--scale", type=int, default=40)
    flags = ap.parse_args(argv[1:])
    if flags.inline is not None and flags.input is not None:
        sys.stderr.write("tropgrass: give INPUT or --inline, not both\n")
        return 64

    try:
        if flags.inline is not None:
            raw = flags.inline
        elif flags.input in (None, "-"):
            raw = sys.stdin.read()
        else:
            with open(flags.input) as fh:
                raw = fh.read()
        doc = json.loads(raw)
    except (OSError, json.JSONDecodeError) as exc:
        sys.stderr.write(f"tropgrass: {exc}\n")
        return 2

    handler = HANDLERS[name]
    try:
        if flags.batch:
            _need(isinstance(doc, list), "--batch expects a JSON array")
            _need(flags.format == "json", "--batch emits JSON only")

            def run_one(item):
                try:
                    return handler(item, flags)
                except SchemaError:
                    raise
                except TropgrassError as exc:
                    return _error_doc(exc)

            with ThreadPoolExecutor(max_workers=min(8, max(1, len(doc)))) as ex:
                results = list(ex.map(run_one, doc))
            _write(flags, jsonio.dumps(results))
            return 1 if any("error" in r for r in results) else 0
        result = handler(doc, flags)
    except SchemaError as exc:
        sys.stderr.write(f"tropgrass: {exc}\n")
        return 2
    except TropgrassError as exc:
        _write(flags, jsonio.dumps(_error_doc(exc)))
        return 1
    _write(flags, result if isinstance(result, str) else jsonio.dumps(result))
    return 0


if __name__ == "__main__":
    sys.exit(main())
