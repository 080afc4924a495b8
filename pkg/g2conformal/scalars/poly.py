from __future__ import annotations

from fractions import Fraction
from itertools import combinations_with_replacement
from types import MappingProxyType
from typing import Mapping, Sequence

from sympy.polys.orderings import grlex
from sympy.polys.rings import PolyElement, PolyRing

from g2conformal.constants import DIMENSION, VARIABLE_NAMES
from g2conformal.scalars.algscalar import FIELD, AlgScalar, from_field, to_field

Exponent = tuple[int, ...]

ZERO_EXPONENT: Exponent = (0,) * DIMENSION

RING = PolyRing(VARIABLE_NAMES, FIELD, grlex)


def grlex_key(exponent: Exponent) -> tuple[int, Exponent]:
    # total degree first, then lexicographic with x1 > x2 > ... > x5
    return (sum(exponent), exponent)


def unit_exponent(var: int) -> Exponent:
    """Exponent vector of the coordinate x_var, var in 1..5."""
    if not 1 <= var <= DIMENSION:
        raise ValueError(f"'{var}' is not a coordinate index in 1..{DIMENSION}")
    return tuple(1 if i == var - 1 else 0 for i in range(DIMENSION))


def monomials_up_to(degree: int) -> list[Exponent]:
    """All exponent vectors of total degree <= degree, in ascending grlex order."""
    exponents = []
    for total in range(degree + 1):
        layer = []
        for combo in combinations_with_replacement(range(DIMENSION), total):
            exponent = [0] * DIMENSION
            for var in combo:
                exponent[var] += 1
            layer.append(tuple(exponent))
        exponents.extend(sorted(layer))
    return exponents


def _render_monomial(exponent: Exponent) -> str:
    factors = []
    for name, power in zip(VARIABLE_NAMES, exponent):
        if power == 1:
            factors.append(name)
        elif power > 1:
            factors.append(f"{name}^{power}")
    return "*".join(factors)


class PolyQ:
    """
    Polynomial in x1..x5 over Q(sqrt2, sqrt3): a thin wrapper around an
    element of the sympy ring RING, exposing exponent vectors and AlgScalar
    coefficients.
    """

    __slots__ = ("_poly",)

    def __init__(self, terms: Mapping[Exponent, AlgScalar | int | Fraction] = None) -> None:
        poly = RING.zero
        if terms:
            for exponent, coeff in terms.items():
                if len(exponent) != DIMENSION:
                    raise ValueError(
                        f"Exponent {exponent} does not have {DIMENSION} entries"
                    )
                coeff = AlgScalar.coerce(coeff)
                if coeff:
                    poly[tuple(exponent)] = to_field(coeff)
        self._poly = poly

    @classmethod
    def wrap(cls, poly: PolyElement) -> PolyQ:
        if poly.ring is not RING:
            raise ValueError(f"'{poly}' is not an element of {RING}")
        wrapped = cls.__new__(cls)
        wrapped._poly = poly
        return wrapped

    @classmethod
    def constant(cls, value: AlgScalar | int | Fraction) -> PolyQ:
        return cls.wrap(RING.ground_new(to_field(value)))

    @classmethod
    def variable(cls, var: int) -> PolyQ:
        unit_exponent(var)
        return cls.wrap(RING.gens[var - 1])

    @classmethod
    def monomial(cls, exponent: Exponent, coeff: AlgScalar | int | Fraction = 1) -> PolyQ:
        return cls({tuple(exponent): coeff})

    @property
    def poly(self) -> PolyElement:
        return self._poly

    @property
    def terms(self) -> Mapping[Exponent, AlgScalar]:
        return MappingProxyType({exponent: from_field(coeff) for exponent, coeff in self._poly.items()})

    @property
    def is_zero(self) -> bool:
        return not self._poly

    @property
    def is_constant(self) -> bool:
        return self._poly.is_ground

    @property
    def is_monomial(self) -> bool:
        return len(self._poly) == 1

    def constant_value(self) -> AlgScalar:
        if not self.is_constant:
            raise ValueError(f"'{self.render()}' is not constant")
        return from_field(self._poly.get(ZERO_EXPONENT, FIELD.zero))

    @property
    def degree(self) -> int:
        if not self._poly:
            return -1
        return max(sum(exponent) for exponent in self._poly)

    def leading_term(self) -> tuple[Exponent, AlgScalar]:
        if not self._poly:
            raise ValueError("The zero polynomial has no leading term")
        exponent = self._poly.leading_expv()
        return exponent, from_field(self._poly[exponent])

    def sorted_terms(self) -> list[tuple[Exponent, AlgScalar]]:
        """Terms in descending grlex order."""
        return [(exponent, from_field(coeff)) for exponent, coeff in self._poly.terms(grlex)]

    def monomial_content(self) -> Exponent:
        """The largest monomial dividing every term."""
        if not self._poly:
            return ZERO_EXPONENT
        exponents = iter(self._poly)
        content = list(next(exponents))
        for exponent in exponents:
            content = [min(a, b) for a, b in zip(content, exponent)]
        return tuple(content)

    def shift(self, exponent: Exponent, sign: int = 1) -> PolyQ:
        """Multiply (sign=1) or exactly divide (sign=-1) by the monomial x^exponent."""
        shifted = RING.zero
        for term, coeff in self._poly.items():
            new = tuple(t + sign * e for t, e in zip(term, exponent))
            if min(new) < 0:
                raise ValueError(f"Monomial {exponent} does not divide '{self.render()}'")
            shifted[new] = coeff
        return PolyQ.wrap(shifted)

    def scale(self, factor: AlgScalar | int | Fraction) -> PolyQ:
        return PolyQ.wrap(self._poly.mul_ground(to_field(factor)))

    def __bool__(self) -> bool:
        return bool(self._poly)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction, AlgScalar)):
            return self == PolyQ.constant(other)
        if isinstance(other, PolyQ):
            return self._poly == other._poly
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self._poly)

    def __repr__(self) -> str:
        return f"PolyQ({self.render()!r})"

    def __str__(self) -> str:
        return self.render()

    def __neg__(self) -> PolyQ:
        return PolyQ.wrap(-self._poly)

    def __add__(self, other: PolyQ | AlgScalar | int | Fraction) -> PolyQ:
        if isinstance(other, (int, Fraction, AlgScalar)):
            other = PolyQ.constant(other)
        if not isinstance(other, PolyQ):
            return NotImplemented
        return PolyQ.wrap(self._poly + other._poly)

    def __radd__(self, other: AlgScalar | int | Fraction) -> PolyQ:
        return self + other

    def __sub__(self, other: PolyQ | AlgScalar | int | Fraction) -> PolyQ:
        if isinstance(other, (int, Fraction, AlgScalar, PolyQ)):
            return PolyQ.wrap(self._poly - PolyQ.coerce(other)._poly)
        return NotImplemented

    def __rsub__(self, other: AlgScalar | int | Fraction) -> PolyQ:
        return (-self) + other

    def __mul__(self, other: PolyQ | AlgScalar | int | Fraction) -> PolyQ:
        if isinstance(other, (int, Fraction, AlgScalar)):
            return self.scale(other)
        if not isinstance(other, PolyQ):
            return NotImplemented
        return PolyQ.wrap(self._poly * other._poly)

    def __rmul__(self, other: AlgScalar | int | Fraction) -> PolyQ:
        return self.scale(other)

    def __pow__(self, exponent: int) -> PolyQ:
        if exponent < 0:
            raise ValueError("Polynomials only take nonnegative powers")
        return PolyQ.wrap(self._poly**exponent)

    @classmethod
    def coerce(cls, x: object) -> PolyQ:
        if isinstance(x, PolyQ):
            return x
        if isinstance(x, (int, Fraction, AlgScalar)):
            return cls.constant(x)
        raise TypeError(f"Cannot interpret {type(x).__name__} as a PolyQ")

    def exact_divide(self, divisor: PolyQ) -> PolyQ | None:
        """
        Return the quotient self/divisor when the division is exact, otherwise
        None. A single divisor is a Groebner basis of the ideal it spans, so
        the remainder of multivariate division vanishes exactly when divisor
        divides self.
        """
        if divisor.is_zero:
            raise ZeroDivisionError("polynomial division by zero")
        if self.is_zero:
            return PolyQ()
        if self.degree < divisor.degree:
            return None
        quotient, remainder = self._poly.div(divisor._poly)
        if remainder:
            return None
        return PolyQ.wrap(quotient)

    def diff(self, var: int) -> PolyQ:
        """Formal partial derivative with respect to x_var, var in 1..5."""
        index = var - 1
        if not 0 <= index < DIMENSION:
            raise ValueError(f"'{var}' is not a coordinate index in 1..{DIMENSION}")
        return PolyQ.wrap(self._poly.diff(RING.gens[index]))

    def evaluate(self, point: Sequence[AlgScalar | int | Fraction]) -> AlgScalar:
        if len(point) != DIMENSION:
            raise ValueError(f"Evaluation point must have {DIMENSION} coordinates")
        values = [to_field(x) for x in point]
        total = FIELD.zero
        for exponent, coeff in self._poly.items():
            term = coeff
            for value, power in zip(values, exponent):
                if power:
                    term = term * value**power
            total = total + term
        return from_field(total)

    def render(self) -> str:
        if not self._poly:
            return "0"
        pieces = []
        for exponent, coeff in self.sorted_terms():
            monomial = _render_monomial(exponent)
            negative = coeff.term_count == 1 and coeff.sign() < 0
            magnitude = -coeff if negative else coeff
            if not monomial:
                body = magnitude.render()
                if magnitude.term_count > 1:
                    body = f"({body})"
            elif magnitude == 1:
                body = monomial
            elif magnitude.term_count > 1:
                body = f"({magnitude.render()})*{monomial}"
            else:
                body = f"{magnitude.render()}*{monomial}"
            if not pieces:
                pieces.append(f"-{body}" if negative else body)
            else:
                pieces.append(f"- {body}" if negative else f"+ {body}")
        return " ".join(pieces)

