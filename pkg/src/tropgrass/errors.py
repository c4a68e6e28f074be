"""Exception hierarchy.

Every domain failure raises a TropgrassError subclass; the CLI maps these to
exit code 1 with a machine-readable ``code``. SchemaError is special-cased to
exit code 2 (malformed input rather than a domain fact).
"""


class TropgrassError(Exception):
    code = "error"


class SchemaError(TropgrassError):
    """Input does not match the expected JSON shape or value grammar."""

    code = "schema"


class DimensionMismatch(TropgrassError):
    code = "dimension-mismatch"


class NegativeExponentAtBoundary(TropgrassError):
    """x^-1 evaluated where the coordinate has valuation INF (or is required >= 0)."""

    code = "negative-exponent"


class NonConstantCoefficient(TropgrassError):
    code = "non-constant-coefficient"


class NotInvertible(TropgrassError):
    code = "not-invertible"


class EmptyPolyhedron(TropgrassError):
    code = "empty-polyhedron"


class UnboundedPolyhedron(TropgrassError):
    code = "unbounded-polyhedron"


class MonomialCurve(TropgrassError):
    """Tropicalizing a single monomial: the curve is empty, signaled explicitly."""

    code = "monomial-curve"


class InvalidTree(TropgrassError):
    code = "invalid-tree"


class FourPointViolation(TropgrassError):
    code = "four-point-violation"


class ReconstructionError(TropgrassError):
    """Distance vector passed the four-point check but no tree realizes it.

    Cannot occur for valid inputs; raised defensively instead of returning a
    wrong tree.
    """

    code = "reconstruction-error"


class MembershipError(TropgrassError):
    code = "not-a-member"


class BoundaryStratum(TropgrassError):
    """Infinite Pluecker coordinate: the point lies outside the dense torus orbit."""

    code = "boundary-stratum"


class InvalidCherryOrder(TropgrassError):
    code = "invalid-cherry-order"


class OutsideDomain(TropgrassError):
    code = "outside-domain"


class NonIntegralSlope(TropgrassError):
    code = "non-integral-slope"
