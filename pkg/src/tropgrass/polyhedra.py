"""Integral Gamma-affine polyhedra and maps.

A GammaPolyhedron is cut out by constraints <u, v> + gamma >= 0 with u an
integer vector and gamma rational; nonemptiness is checked at construction by
an exact two-phase simplex (Bland's rule, Fraction arithmetic, no floats).
Unimodularity of an integral affine map on a polyhedron is decided by Smith
normal form on the restriction of the linear part to the direction lattice.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Sequence

from .arith import as_fraction
from .errors import DimensionMismatch, EmptyPolyhedron, UnboundedPolyhedron
from .lattice import hermite_normal_form_rows, integer_kernel_basis, invariant_factors

OPTIMAL = "optimal"
UNBOUNDED = "unbounded"
INFEASIBLE = "infeasible"


def _pivot(tableau, basis, prow, pcol):
    piv = tableau[prow][pcol]
    tableau[prow] = [x / piv for x in tableau[prow]]
    for i, row in enumerate(tableau):
        if i != prow and row[pcol] != 0:
            f = row[pcol]
            tableau[i] = [a - f * b for a, b in zip(row, tableau[prow])]
    basis[prow] = pcol


def _run_simplex(tableau, basis, ncols):
    """Minimize the objective in the last tableau row over columns < ncols.
    Bland's rule: smallest eligible indices, so cycling is impossible."""
    m = len(tableau) - 1
    while True:
        obj = tableau[m]
        pcol = next((j for j in range(ncols) if obj[j] < 0), None)
        if pcol is None:
            return OPTIMAL
        prow = None
        best = None
        for i in range(m):
            if tableau[i][pcol] > 0:
                ratio = tableau[i][-1] / tableau[i][pcol]
                if best is None or ratio < best or (ratio == best and basis[i] < basis[prow]):
                    best, prow = ratio, i
        if prow is None:
            return UNBOUNDED
        _pivot(tableau, basis, prow, pcol)


def _set_objective(tableau, basis, costs, total_cols):
    """Install reduced costs for the given per-variable cost vector."""
    m = len(tableau) - 1
    obj = [Fraction(0)] * (total_cols + 1)
    for j in range(total_cols):
        obj[j] = costs[j]
    obj[-1] = Fraction(0)
    for i in range(m):
        cb = costs[basis[i]]
        if cb != 0:
            obj = [a - cb * b for a, b in zip(obj, tableau[i])]
    tableau[-1] = obj


def lp_maximize(A, b, c):
    """Maximize c.x subject to A x <= b over free rational x.

    Returns (status, value, x) where status is one of "optimal", "unbounded",
    "infeasible"; value and x are None unless optimal. All data rational.
    """
    m = len(A)
    n = len(c)
    A = [[as_fraction(x) for x in row] for row in A]
    b = [as_fraction(x) for x in b]
    c = [as_fraction(x) for x in c]
    nvars = 2 * n + m  # x+ , x- , slacks
    total = nvars + m  # plus artificials
    tableau = []
    for i in range(m):
        sign = 1 if b[i] >= 0 else -1
        row = [Fraction(0)] * (total + 1)
        for j in range(n):
            row[j] = sign * A[i][j]
            row[n + j] = -sign * A[i][j]
        row[2 * n + i] = Fraction(sign)
        row[nvars + i] = Fraction(1)
        row[-1] = sign * b[i]
        tableau.append(row)
    basis = [nvars + i for i in range(m)]
    tableau.append([Fraction(0)] * (total + 1))

    phase1 = [Fraction(0)] * total
    for i in range(m):
        phase1[nvars + i] = Fraction(1)
    _set_objective(tableau, basis, phase1, total)
    _run_simplex(tableau, basis, total)
    if -tableau[-1][-1] > 0:
        return INFEASIBLE, None, None

    # drive leftover artificials out of the basis, or drop redundant rows
    for i in range(m - 1, -1, -1):
        if basis[i] >= nvars:
            pcol = next((j for j in range(nvars) if tableau[i][j] != 0), None)
            if pcol is None:
                del tableau[i]
                del basis[i]
            else:
                _pivot(tableau, basis, i, pcol)

    phase2 = [Fraction(0)] * total
    for j in range(n):
        phase2[j] = -c[j]
        phase2[n + j] = c[j]
    _set_objective(tableau, basis, phase2, total)
    status = _run_simplex(tableau, basis, nvars)
    if status == UNBOUNDED:
        return UNBOUNDED, None, None
    value = tableau[-1][-1]
    assignment = {basis[i]: tableau[i][-1] for i in range(len(basis))}
    x = [
        assignment.get(j, Fraction(0)) - assignment.get(n + j, Fraction(0))
        for j in range(n)
    ]
    return OPTIMAL, value, x


@dataclass(frozen=True)
class GammaPolyhedron:
    """Feasible region of <u_i, v> + gamma_i >= 0, u_i integral, gamma_i in Q.

    Construction fails with EmptyPolyhedron when the region is empty; anything
    else (unbounded, lower-dimensional, a single point) is fine.
    """

    ambient_dim: int
    constraints: tuple  # ((u: tuple[int,...], gamma: Fraction), ...)

    def __post_init__(self):
        if self.ambient_dim < 0:
            raise ValueError("ambient_dim must be >= 0")
        norm = []
        for u, gamma in self.constraints:
            uu = tuple(int(x) for x in u)
            if len(uu) != self.ambient_dim:
                raise DimensionMismatch("constraint vector length != ambient_dim")
            norm.append((uu, as_fraction(gamma)))
        object.__setattr__(self, "constraints", tuple(norm))
        status, _, _ = self._lp([Fraction(0)] * self.ambient_dim)
        if status == INFEASIBLE:
            raise EmptyPolyhedron("polyhedron has no points")

    def _lp(self, objective):
        # <u, v> + gamma >= 0 rewritten as (-u).v <= gamma
        A = [[Fraction(-x) for x in u] for u, _ in self.constraints]
        b = [gamma for _, gamma in self.constraints]
        return lp_maximize(A, b, list(objective))

    def contains(self, v: Sequence) -> bool:
        vv = [as_fraction(x) for x in v]
        if len(vv) != self.ambient_dim:
            raise DimensionMismatch("point length != ambient_dim")
        return all(
            sum(ui * xi for ui, xi in zip(u, vv)) + gamma >= 0
            for u, gamma in self.constraints
        )

    def maximize(self, objective: Sequence):
        """(status, value, argmax) of a rational linear functional over P."""
        return self._lp([as_fraction(x) for x in objective])

    @cached_property
    def _implicit_equalities(self) -> tuple:
        """Indices of constraints satisfied with equality everywhere on P."""
        out = []
        for idx, (u, gamma) in enumerate(self.constraints):
            status, value, _ = self._lp([Fraction(x) for x in u])
            if status == OPTIMAL and value == -gamma:
                out.append(idx)
        return tuple(out)

    @cached_property
    def direction_lattice(self) -> tuple:
        """HNF basis of the saturated integer lattice parallel to aff(P).

        The affine hull is cut out by the implicit equality constraints, so
        the lattice is the integer kernel of their normal vectors (including
        recession directions when P is unbounded).
        """
        rows = [self.constraints[i][0] for i in self._implicit_equalities]
        if not rows:
            return hermite_normal_form_rows(
                [[1 if i == j else 0 for j in range(self.ambient_dim)] for i in range(self.ambient_dim)]
            )
        return integer_kernel_basis(rows)

    def lattice_points(self) -> tuple:
        """All integer points of a bounded P, sorted. Errors when unbounded."""
        ranges = []
        for t in range(self.ambient_dim):
            e = [Fraction(0)] * self.ambient_dim
            e[t] = Fraction(1)
            st_hi, hi, _ = self._lp(e)
            e[t] = Fraction(-1)
            st_lo, lo_neg, _ = self._lp(e)
            if st_hi != OPTIMAL or st_lo != OPTIMAL:
                raise UnboundedPolyhedron("lattice_points needs a bounded polyhedron")
            lo = -lo_neg
            ranges.append(range(math.ceil(lo), math.floor(hi) + 1))
        pts = [
            p for p in itertools.product(*ranges) if self.contains([Fraction(x) for x in p])
        ]
        return tuple(sorted(pts))


def polyhedron_from_inequalities(ambient_dim, rows) -> GammaPolyhedron:
    return GammaPolyhedron(ambient_dim, tuple((tuple(u), g) for u, g in rows))


@dataclass(frozen=True)
class GammaAffineMap:
    """v -> A v + b with A integral and b rational."""

    linear: tuple  # rows of ints
    shift: tuple  # Fractions

    def __post_init__(self):
        A = tuple(tuple(int(x) for x in row) for row in self.linear)
        b = tuple(as_fraction(x) for x in self.shift)
        if len(A) != len(b):
            raise DimensionMismatch("linear row count != shift length")
        widths = {len(r) for r in A}
        if len(widths) > 1:
            raise DimensionMismatch("ragged matrix")
        object.__setattr__(self, "linear", A)
        object.__setattr__(self, "shift", b)

    @property
    def out_dim(self) -> int:
        return len(self.linear)

    @property
    def in_dim(self) -> int:
        return len(self.linear[0]) if self.linear else 0

    def apply(self, v: Sequence) -> tuple:
        vv = [as_fraction(x) for x in v]
        if len(vv) != self.in_dim:
            raise DimensionMismatch("point length != in_dim")
        return tuple(
            sum(a * x for a, x in zip(row, vv)) + s
            for row, s in zip(self.linear, self.shift)
        )

    def compose(self, inner: "GammaAffineMap") -> "GammaAffineMap":
        """self after inner: v -> self(inner(v))."""
        if inner.out_dim != self.in_dim:
            raise DimensionMismatch("composition dimension mismatch")
        A = tuple(
            tuple(
                sum(self.linear[i][k] * inner.linear[k][j] for k in range(self.in_dim))
                for j in range(inner.in_dim)
            )
            for i in range(self.out_dim)
        )
        b = tuple(
            sum(self.linear[i][k] * inner.shift[k] for k in range(self.in_dim)) + self.shift[i]
            for i in range(self.out_dim)
        )
        return GammaAffineMap(A, b)

    @classmethod
    def identity(cls, n: int) -> "GammaAffineMap":
        return cls(
            tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n)),
            (Fraction(0),) * n,
        )


def unimodular_on(F: GammaAffineMap, P: GammaPolyhedron) -> bool:
    """True iff F restricted to P is injective and its linear part maps the
    direction lattice of P isomorphically onto the saturated direction lattice
    of F(P): every Smith invariant factor of the restricted linear part is 1.
    """
    if F.in_dim != P.ambient_dim:
        raise DimensionMismatch("map not defined on the polyhedron's space")
    basis = P.direction_lattice
    if not basis:
        return True  # P is a point
    cols = [
        [sum(F.linear[i][k] * vec[k] for k in range(P.ambient_dim)) for i in range(F.out_dim)]
        for vec in basis
    ]
    M = [[cols[j][i] for j in range(len(basis))] for i in range(F.out_dim)]
    facs = invariant_factors(M)
    return len(facs) == len(basis) and all(d == 1 for d in facs)
