"""tropgrass: exact tropical geometry at desk scale.

Tropical Grassmannian TGr0(2,n) with its section of tropicalization,
phylogenetic tree metrics, tropical plane curves via Newton subdivisions,
integral Gamma-affine polyhedra with unimodularity, and skeleta of standard
semistable blocks. All arithmetic is exact rational.
"""

from .arith import LaurentPoly, PuiseuxCoeff, TropNum, coeff_val, gauss_eval
from .curves import (
    BalancingReport,
    BoundedEdge,
    NewtonSubdivision,
    Ray,
    TropPlaneCurve,
    check_balancing,
    is_connected,
    newton_subdivision,
    tropicalize_curve,
    weierstrass_case,
    weierstrass_curve_poly,
)
from .grassmann import (
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
    section_eval,
    section_well_defined,
    verify_cherry_property,
    verify_section_identity,
)
from .polyhedra import GammaAffineMap, GammaPolyhedron, unimodular_on
from .skeleton import (
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
from .trees import (
    DistVector,
    PhyloTree,
    four_point_check,
    quartet_split,
    reconstruct_tree,
    to_newick,
    tree_distance,
)

__version__ = "0.1.0"

__all__ = [
    "TropNum",
    "PuiseuxCoeff",
    "LaurentPoly",
    "coeff_val",
    "gauss_eval",
    "NEG_INF",
    "PlueckerPoint",
    "CherryOrder",
    "membership",
    "combinatorial_type",
    "build_cherry_order",
    "verify_cherry_property",
    "coordinate_set_I",
    "expand_pluecker",
    "section_eval",
    "eval_pair_poly",
    "verify_section_identity",
    "section_well_defined",
    "convert_convention",
    "DistVector",
    "PhyloTree",
    "tree_distance",
    "four_point_check",
    "quartet_split",
    "reconstruct_tree",
    "to_newick",
    "TropPlaneCurve",
    "BoundedEdge",
    "Ray",
    "NewtonSubdivision",
    "newton_subdivision",
    "tropicalize_curve",
    "check_balancing",
    "BalancingReport",
    "is_connected",
    "weierstrass_case",
    "weierstrass_curve_poly",
    "GammaPolyhedron",
    "GammaAffineMap",
    "unimodular_on",
    "StandardBlock",
    "BlockPoint",
    "block_polytope",
    "block_sigma_eval",
    "MetricGraph",
    "PLFunction",
    "degrees",
    "edge_slope",
    "SlopeReport",
    "check_slope_formula",
    "__version__",
]
