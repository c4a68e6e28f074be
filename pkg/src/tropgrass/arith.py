"""Exact scalar and polynomial arithmetic.

Three layers, all immutable and exact:

* TropNum: a rational or INF, under tropical (min, +) arithmetic in the
  valuation convention v = -log|.|.
* PuiseuxCoeff: a finite sum of rational multiples of rational powers of the
  uniformizer t. This ring stands in for the coefficient field: it is closed
  under +, -, *, has an exact valuation (the least exponent), and makes
  cancellation detectable. No field inverses are ever needed beyond monomials.
* LaurentPoly: multivariate Laurent polynomials (integer exponents, possibly
  negative) over PuiseuxCoeff, with Gauss-norm evaluation.

No floating point anywhere.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Sequence, Union

from .errors import (
    DimensionMismatch,
    NegativeExponentAtBoundary,
    NonConstantCoefficient,
    NotInvertible,
)

RationalLike = Union[int, Fraction]


def as_fraction(x: RationalLike) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    raise TypeError(f"expected an exact rational, got {type(x).__name__}")


@dataclass(frozen=True)
class TropNum:
    """Element of Q union {INF} with a (+) = min(a, b) and a (*) b = a + b.

    INF is the valuation of zero: neutral for tropical addition, absorbing for
    tropical multiplication. The total order puts INF above every rational.
    """

    value: Optional[Fraction]

    def __post_init__(self):
        if self.value is not None:
            object.__setattr__(self, "value", as_fraction(self.value))

    INF: "TropNum" = None  # set right after the class body

    @classmethod
    def of(cls, x: Union["TropNum", RationalLike, None]) -> "TropNum":
        if isinstance(x, TropNum):
            return x
        if x is None:
            return cls.INF
        return cls(as_fraction(x))

    @property
    def is_inf(self) -> bool:
        return self.value is None

    def __add__(self, other: "TropNum") -> "TropNum":
        if not isinstance(other, TropNum):
            return NotImplemented
        return self if self <= other else other

    def __mul__(self, other: "TropNum") -> "TropNum":
        if not isinstance(other, TropNum):
            return NotImplemented
        if self.is_inf or other.is_inf:
            return TropNum.INF
        return TropNum(self.value + other.value)

    def __lt__(self, other: "TropNum") -> bool:
        if not isinstance(other, TropNum):
            return NotImplemented
        if self.is_inf:
            return False
        if other.is_inf:
            return True
        return self.value < other.value

    def __le__(self, other: "TropNum") -> bool:
        return self == other or self < other

    def __gt__(self, other: "TropNum") -> bool:
        return not self <= other

    def __ge__(self, other: "TropNum") -> bool:
        return not self < other

    def __repr__(self) -> str:
        return "TropNum(inf)" if self.is_inf else f"TropNum({self.value})"


TropNum.INF = TropNum(None)


@dataclass(frozen=True)
class PuiseuxCoeff:
    """Finite sum of r * t^gamma with r, gamma rational and r != 0.

    terms is kept sorted by exponent with no zero coefficients; the zero
    element is the empty tuple. Equality of tuples is therefore equality in
    the ring.
    """

    terms: tuple  # ((gamma: Fraction, r: Fraction), ...) sorted by gamma

    def __post_init__(self):
        for gamma, r in self.terms:
            if not isinstance(gamma, Fraction) or not isinstance(r, Fraction):
                raise TypeError("PuiseuxCoeff terms must hold Fractions")
            if r == 0:
                raise ValueError("zero coefficient stored in PuiseuxCoeff")
        gammas = [g for g, _ in self.terms]
        if gammas != sorted(gammas) or len(set(gammas)) != len(gammas):
            raise ValueError("PuiseuxCoeff terms must be sorted by distinct exponent")

    @classmethod
    def from_terms(cls, pairs: Iterable[tuple]) -> "PuiseuxCoeff":
        acc: dict = {}
        for gamma, r in pairs:
            g = as_fraction(gamma)
            acc[g] = acc.get(g, Fraction(0)) + as_fraction(r)
        return cls(tuple(sorted((g, r) for g, r in acc.items() if r != 0)))

    @classmethod
    def zero(cls) -> "PuiseuxCoeff":
        return cls(())

    @classmethod
    def rational(cls, r: RationalLike) -> "PuiseuxCoeff":
        return cls.from_terms([(Fraction(0), as_fraction(r))])

    @classmethod
    def t_power(cls, gamma: RationalLike, r: RationalLike = 1) -> "PuiseuxCoeff":
        return cls.from_terms([(as_fraction(gamma), as_fraction(r))])

    @classmethod
    def one(cls) -> "PuiseuxCoeff":
        return cls.rational(1)

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def val(self) -> TropNum:
        """Least exponent of a surviving term; INF for zero."""
        if not self.terms:
            return TropNum.INF
        return TropNum(self.terms[0][0])

    def _coerced(self, other) -> Optional["PuiseuxCoeff"]:
        if isinstance(other, PuiseuxCoeff):
            return other
        if isinstance(other, (int, Fraction)):
            return PuiseuxCoeff.from_terms([(Fraction(0), as_fraction(other))])
        return None

    def __add__(self, other) -> "PuiseuxCoeff":
        o = self._coerced(other)
        if o is None:
            return NotImplemented
        return PuiseuxCoeff.from_terms(list(self.terms) + list(o.terms))

    __radd__ = __add__

    def __neg__(self) -> "PuiseuxCoeff":
        return PuiseuxCoeff(tuple((g, -r) for g, r in self.terms))

    def __sub__(self, other) -> "PuiseuxCoeff":
        o = self._coerced(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other) -> "PuiseuxCoeff":
        o = self._coerced(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other) -> "PuiseuxCoeff":
        o = self._coerced(other)
        if o is None:
            return NotImplemented
        acc: dict = {}
        for g1, r1 in self.terms:
            for g2, r2 in o.terms:
                g = g1 + g2
                acc[g] = acc.get(g, Fraction(0)) + r1 * r2
        return PuiseuxCoeff(tuple(sorted((g, r) for g, r in acc.items() if r != 0)))

    __rmul__ = __mul__

    def inverse(self) -> "PuiseuxCoeff":
        """Inverse of a single-term element r*t^gamma. Multi-term sums have no
        inverse in this ring."""
        if len(self.terms) != 1:
            raise NotInvertible("only monomial coefficients are invertible")
        gamma, r = self.terms[0]
        return PuiseuxCoeff(((-gamma, 1 / r),))

    def as_rational(self) -> Fraction:
        """The value as a plain rational; error if any t-power is present."""
        if not self.terms:
            return Fraction(0)
        if len(self.terms) == 1 and self.terms[0][0] == 0:
            return self.terms[0][1]
        raise NonConstantCoefficient(f"not a constant: {self}")

    def __repr__(self) -> str:
        if not self.terms:
            return "PuiseuxCoeff(0)"
        body = " + ".join(f"{r}*t^{g}" if g else f"{r}" for g, r in self.terms)
        return f"PuiseuxCoeff({body})"


def _coerce_coeff(c) -> PuiseuxCoeff:
    if isinstance(c, PuiseuxCoeff):
        return c
    return PuiseuxCoeff.from_terms([(Fraction(0), as_fraction(c))])


@dataclass(frozen=True)
class LaurentPoly:
    """Laurent polynomial over PuiseuxCoeff in num_vars variables.

    terms maps exponent vectors (tuples of ints, negatives allowed) to nonzero
    coefficients, stored as a tuple sorted by exponent vector so equality is
    structural.
    """

    num_vars: int
    terms: tuple  # ((exps: tuple[int,...], coeff: PuiseuxCoeff), ...)

    def __post_init__(self):
        if self.num_vars < 0:
            raise ValueError("num_vars must be >= 0")
        prev = None
        for exps, coeff in self.terms:
            if len(exps) != self.num_vars:
                raise DimensionMismatch("exponent vector length != num_vars")
            if not all(isinstance(e, int) for e in exps):
                raise TypeError("exponents must be ints")
            if not isinstance(coeff, PuiseuxCoeff) or coeff.is_zero:
                raise ValueError("LaurentPoly stores nonzero PuiseuxCoeff only")
            if prev is not None and exps <= prev:
                raise ValueError("terms must be strictly sorted by exponent")
            prev = exps

    @classmethod
    def from_terms(cls, num_vars: int, pairs: Iterable[tuple]) -> "LaurentPoly":
        acc: dict = {}
        for exps, coeff in pairs:
            e = tuple(int(x) for x in exps)
            acc[e] = acc.get(e, PuiseuxCoeff.zero()) + _coerce_coeff(coeff)
        return cls(num_vars, tuple(sorted((e, c) for e, c in acc.items() if not c.is_zero)))

    @classmethod
    def zero(cls, num_vars: int) -> "LaurentPoly":
        return cls(num_vars, ())

    @classmethod
    def constant(cls, num_vars: int, c) -> "LaurentPoly":
        return cls.from_terms(num_vars, [((0,) * num_vars, c)])

    @classmethod
    def one(cls, num_vars: int) -> "LaurentPoly":
        return cls.constant(num_vars, 1)

    @classmethod
    def monomial(cls, num_vars: int, exps: Sequence[int], c=1) -> "LaurentPoly":
        return cls.from_terms(num_vars, [(tuple(exps), c)])

    @classmethod
    def variable(cls, num_vars: int, i: int) -> "LaurentPoly":
        exps = [0] * num_vars
        exps[i] = 1
        return cls.monomial(num_vars, exps)

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def _check_vars(self, other: "LaurentPoly"):
        if self.num_vars != other.num_vars:
            raise DimensionMismatch(
                f"variable count mismatch: {self.num_vars} vs {other.num_vars}"
            )

    def __add__(self, other) -> "LaurentPoly":
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        self._check_vars(other)
        return LaurentPoly.from_terms(self.num_vars, list(self.terms) + list(other.terms))

    def __neg__(self) -> "LaurentPoly":
        return LaurentPoly(self.num_vars, tuple((e, -c) for e, c in self.terms))

    def __sub__(self, other) -> "LaurentPoly":
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self + (-other)

    def __mul__(self, other) -> "LaurentPoly":
        if isinstance(other, (int, Fraction, PuiseuxCoeff)):
            c = _coerce_coeff(other)
            if c.is_zero:
                return LaurentPoly.zero(self.num_vars)
            return LaurentPoly.from_terms(
                self.num_vars, [(e, k * c) for e, k in self.terms]
            )
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        self._check_vars(other)
        acc: dict = {}
        for e1, c1 in self.terms:
            for e2, c2 in other.terms:
                e = tuple(a + b for a, b in zip(e1, e2))
                acc[e] = acc.get(e, PuiseuxCoeff.zero()) + c1 * c2
        return LaurentPoly(
            self.num_vars, tuple(sorted((e, c) for e, c in acc.items() if not c.is_zero))
        )

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "LaurentPoly":
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            if len(self.terms) != 1:
                raise NotInvertible("negative power of a non-monomial")
            exps, coeff = self.terms[0]
            inv = LaurentPoly.monomial(
                self.num_vars, tuple(-e for e in exps), coeff.inverse()
            )
            return inv ** (-k)
        result = LaurentPoly.one(self.num_vars)
        for _ in range(k):
            result = result * self
        return result

    def gauss_eval(self, r: Sequence) -> TropNum:
        """Valuation of f at the Gauss point with coordinate valuations r.

        min over terms of val(coeff) + sum_i exps_i * r_i. A coordinate with
        r_i = INF forces terms with a positive exponent there to INF, leaves
        zero exponents alone, and makes negative exponents an error (x^-1 at
        the boundary).
        """
        rs = [TropNum.of(x) for x in r]
        if len(rs) != self.num_vars:
            raise DimensionMismatch("evaluation point length != num_vars")
        best = TropNum.INF
        for exps, coeff in self.terms:
            total = coeff.val()
            for e, rv in zip(exps, rs):
                if e == 0:
                    continue
                if rv.is_inf:
                    if e < 0:
                        raise NegativeExponentAtBoundary(
                            "negative exponent against an INF coordinate"
                        )
                    total = TropNum.INF
                    break
                total = total * TropNum(rv.value * e)
            best = best + total
        return best

    def eval_rational(self, xs: Sequence[RationalLike]) -> Fraction:
        """Plain evaluation; every coefficient must be a constant rational."""
        vals = [as_fraction(x) for x in xs]
        if len(vals) != self.num_vars:
            raise DimensionMismatch("evaluation point length != num_vars")
        total = Fraction(0)
        for exps, coeff in self.terms:
            term = coeff.as_rational()
            for e, x in zip(exps, vals):
                term *= x**e
            total += term
        return total

    def substitute(self, polys: Sequence["LaurentPoly"]) -> "LaurentPoly":
        """Replace variable i by polys[i]; exponents must be nonnegative."""
        if len(polys) != self.num_vars:
            raise DimensionMismatch("substitution list length != num_vars")
        m = polys[0].num_vars if polys else 0
        for p in polys:
            if p.num_vars != m:
                raise DimensionMismatch("substitution polynomials disagree on num_vars")
        result = LaurentPoly.zero(m)
        for exps, coeff in self.terms:
            term = LaurentPoly.constant(m, coeff)
            for e, p in zip(exps, polys):
                if e < 0:
                    raise NegativeExponentAtBoundary(
                        "substitute requires nonnegative exponents"
                    )
                term = term * p**e
            result = result + term
        return result

    def map_coeffs(self, fn) -> "LaurentPoly":
        return LaurentPoly.from_terms(
            self.num_vars, [(e, fn(c)) for e, c in self.terms]
        )

    def __repr__(self) -> str:
        if not self.terms:
            return f"LaurentPoly({self.num_vars}, 0)"
        monos = []
        for exps, coeff in self.terms:
            vs = "*".join(f"x{i + 1}^{e}" for i, e in enumerate(exps) if e)
            monos.append(f"({coeff}){'*' + vs if vs else ''}")
        return f"LaurentPoly({self.num_vars}, {' + '.join(monos)})"


def coeff_val(c: PuiseuxCoeff) -> TropNum:
    return c.val()


def poly_add(f: LaurentPoly, g: LaurentPoly) -> LaurentPoly:
    return f + g


def poly_mul(f: LaurentPoly, g: LaurentPoly) -> LaurentPoly:
    return f * g


def gauss_eval(f: LaurentPoly, r: Sequence) -> TropNum:
    return f.gauss_eval(r)
