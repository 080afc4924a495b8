from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from g2conformal.constants import DIMENSION
from g2conformal.exceptions import DivisionByZeroError
from g2conformal.scalars.algscalar import AlgScalar
from g2conformal.scalars.poly import PolyQ, grlex_key

Factors = tuple[tuple[PolyQ, int], ...]


def _factor_sort_key(item: tuple[PolyQ, int]) -> tuple:
    poly = item[0]
    return (poly.degree, [(grlex_key(e), c.coeffs) for e, c in poly.sorted_terms()])


def _split_denominator(poly: PolyQ) -> tuple[AlgScalar, dict[PolyQ, int]]:
    """
    Write poly = unit * prod(factor^exp) with every factor monic (leading
    coefficient 1 under grlex) and coordinate monomials split out as the
    single-variable factors x_i.
    """
    if poly.is_zero:
        raise DivisionByZeroError("denominator is identically zero")
    factors: dict[PolyQ, int] = {}
    content = poly.monomial_content()
    if any(content):
        poly = poly.shift(content, -1)
        for var, power in enumerate(content, start=1):
            if power:
                factors[PolyQ.variable(var)] = power
    _, lead = poly.leading_term()
    if not poly.is_constant:
        factors[poly.scale(lead.inverse())] = 1
    return lead, factors


def _merge(*factor_maps: Mapping[PolyQ, int]) -> dict[PolyQ, int]:
    merged: dict[PolyQ, int] = {}
    for factors in factor_maps:
        for factor, exponent in factors.items():
            merged[factor] = merged.get(factor, 0) + exponent
    return merged


def _product(factors: Mapping[PolyQ, int]) -> PolyQ:
    result = PolyQ.constant(1)
    for factor, exponent in factors.items():
        result = result * factor**exponent
    return result


class RatFn:
    """
    Quotient num/den of polynomials in x1..x5 over Q(sqrt2, sqrt3), with
    numerator and denominator factors held as sympy ring elements.

    The denominator is kept factored as a product of monic polynomials with
    multiplicities, and its leading coefficient is 1. Common factors are
    cancelled by exact division in the ring rather than by multivariate gcd;
    equality is decided by cross multiplication, so it does not depend on
    how far the cancellation got.
    """

    __slots__ = ("_num", "_factors")

    def __init__(self, num: PolyQ | AlgScalar | int | Fraction = 0, den: PolyQ | AlgScalar | int | Fraction = 1) -> None:
        num = PolyQ.coerce(num)
        den = PolyQ.coerce(den)
        unit, factors = _split_denominator(den)
        self._num, self._factors = self._cancel(num.scale(unit.inverse()), factors)

    @classmethod
    def _build(cls, num: PolyQ, factors: Mapping[PolyQ, int]) -> RatFn:
        fn = cls.__new__(cls)
        fn._num, fn._factors = cls._cancel(num, factors)
        return fn

    @classmethod
    def from_factors(cls, num: PolyQ, factors: Mapping[PolyQ, int]) -> RatFn:
        """num / prod(factor^exponent) for monic factors, as listed by den_factors."""
        return cls._build(num, {factor: exponent for factor, exponent in factors.items() if exponent})

    @classmethod
    def _raw(cls, num: PolyQ, factors: Factors) -> RatFn:
        fn = cls.__new__(cls)
        fn._num = num
        fn._factors = factors
        return fn

    @staticmethod
    def _cancel(num: PolyQ, factors: Mapping[PolyQ, int]) -> tuple[PolyQ, Factors]:
        if num.is_zero:
            return num, ()
        kept = []
        for factor, exponent in factors.items():
            while exponent > 0:
                quotient = num.exact_divide(factor)
                if quotient is None:
                    break
                num = quotient
                exponent -= 1
            if exponent > 0:
                kept.append((factor, exponent))
        kept.sort(key=_factor_sort_key)
        return num, tuple(kept)

    @classmethod
    def coerce(cls, x: object) -> RatFn:
        if isinstance(x, RatFn):
            return x
        if isinstance(x, PolyQ):
            return cls._raw(x, ())
        if isinstance(x, (int, Fraction, AlgScalar)):
            return cls._raw(PolyQ.constant(x), ())
        raise TypeError(f"Cannot interpret {type(x).__name__} as a RatFn")

    @classmethod
    def variable(cls, var: int) -> RatFn:
        return cls._raw(PolyQ.variable(var), ())

    @classmethod
    def zero(cls) -> RatFn:
        return cls._raw(PolyQ(), ())

    @classmethod
    def one(cls) -> RatFn:
        return cls._raw(PolyQ.constant(1), ())

    @property
    def num(self) -> PolyQ:
        return self._num

    @property
    def den(self) -> PolyQ:
        return _product(dict(self._factors))

    @property
    def den_factors(self) -> Factors:
        return self._factors

    @property
    def is_zero(self) -> bool:
        return self._num.is_zero

    @property
    def is_polynomial(self) -> bool:
        return not self._factors

    @property
    def is_constant(self) -> bool:
        return not self._factors and self._num.is_constant

    def constant_value(self) -> AlgScalar:
        if not self.is_constant:
            raise ValueError(f"'{self.render()}' is not constant")
        return self._num.constant_value()

    def __bool__(self) -> bool:
        return not self._num.is_zero

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction, AlgScalar, PolyQ)):
            other = RatFn.coerce(other)
        if not isinstance(other, RatFn):
            return NotImplemented
        if self._factors == other._factors:
            return self._num == other._num
        return (self - other).is_zero

    __hash__ = None

    def __repr__(self) -> str:
        return f"RatFn({self.render()!r})"

    def __str__(self) -> str:
        return self.render()

    def __neg__(self) -> RatFn:
        return RatFn._raw(-self._num, self._factors)

    def __add__(self, other: RatFn | PolyQ | AlgScalar | int | Fraction) -> RatFn:
        if isinstance(other, (int, Fraction, AlgScalar, PolyQ)):
            other = RatFn.coerce(other)
        if not isinstance(other, RatFn):
            return NotImplemented
        if other._num.is_zero:
            return self
        if self._num.is_zero:
            return other
        if self._factors == other._factors:
            return RatFn._build(self._num + other._num, dict(self._factors))
        mine = dict(self._factors)
        theirs = dict(other._factors)
        common = dict(mine)
        for factor, exponent in theirs.items():
            common[factor] = max(common.get(factor, 0), exponent)
        left = self._num * _product(
            {f: e - mine.get(f, 0) for f, e in common.items() if e > mine.get(f, 0)}
        )
        right = other._num * _product(
            {f: e - theirs.get(f, 0) for f, e in common.items() if e > theirs.get(f, 0)}
        )
        return RatFn._build(left + right, common)

    def __radd__(self, other: PolyQ | AlgScalar | int | Fraction) -> RatFn:
        return self + other

    def __sub__(self, other: RatFn | PolyQ | AlgScalar | int | Fraction) -> RatFn:
        if isinstance(other, (int, Fraction, AlgScalar, PolyQ, RatFn)):
            return self + (-RatFn.coerce(other))
        return NotImplemented

    def __rsub__(self, other: PolyQ | AlgScalar | int | Fraction) -> RatFn:
        return (-self) + other

    def __mul__(self, other: RatFn | PolyQ | AlgScalar | int | Fraction) -> RatFn:
        if isinstance(other, (int, Fraction, AlgScalar)):
            if not other:
                return RatFn.zero()
            return RatFn._raw(self._num.scale(other), self._factors)
        if isinstance(other, PolyQ):
            other = RatFn.coerce(other)
        if not isinstance(other, RatFn):
            return NotImplemented
        if self._num.is_zero or other._num.is_zero:
            return RatFn.zero()
        if other.is_constant:
            return RatFn._raw(self._num.scale(other._num.constant_value()), self._factors)
        if self.is_constant:
            return RatFn._raw(other._num.scale(self._num.constant_value()), other._factors)
        num = self._num * other._num
        if not self._factors and not other._factors:
            return RatFn._raw(num, ())
        return RatFn._build(num, _merge(dict(self._factors), dict(other._factors)))

    def __rmul__(self, other: PolyQ | AlgScalar | int | Fraction) -> RatFn:
        return self * other

    def inverse(self) -> RatFn:
        if self._num.is_zero:
            raise DivisionByZeroError("division by an identically zero rational function")
        unit, factors = _split_denominator(self._num)
        num = _product(dict(self._factors)).scale(unit.inverse())
        return RatFn._build(num, factors)

    def __truediv__(self, other: RatFn | PolyQ | AlgScalar | int | Fraction) -> RatFn:
        if isinstance(other, (int, Fraction, AlgScalar)):
            if not other:
                raise DivisionByZeroError("division by zero")
            return RatFn._raw(self._num.scale(AlgScalar.coerce(other).inverse()), self._factors)
        if isinstance(other, PolyQ):
            other = RatFn.coerce(other)
        if not isinstance(other, RatFn):
            return NotImplemented
        if other.is_constant:
            return self / other.constant_value()
        return self * other.inverse()

    def __rtruediv__(self, other: PolyQ | AlgScalar | int | Fraction) -> RatFn:
        return RatFn.coerce(other) * self.inverse()

    def __pow__(self, exponent: int) -> RatFn:
        if exponent < 0:
            return self.inverse() ** (-exponent)
        return RatFn._raw(
            self._num**exponent, tuple((f, e * exponent) for f, e in self._factors)
        )

    def diff(self, var: int) -> RatFn:
        """
        Partial derivative with respect to x_var. For n / prod(f_i^e_i) the
        result is (n' * F - n * sum(e_i f_i' F / f_i)) / (prod(f_i^e_i) * F)
        where F runs over the factors with nonzero derivative.
        """
        num_diff = self._num.diff(var)
        if not self._factors:
            return RatFn._raw(num_diff, ())
        active = [(f, e, f.diff(var)) for f, e in self._factors if not f.diff(var).is_zero]
        if not active:
            return RatFn._raw(num_diff, self._factors)
        spread = PolyQ.constant(1)
        for factor, _, _ in active:
            spread = spread * factor
        numerator = num_diff * spread
        for index, (factor, exponent, derivative) in enumerate(active):
            others = PolyQ.constant(1)
            for other_index, (other_factor, _, _) in enumerate(active):
                if other_index != index:
                    others = others * other_factor
            numerator = numerator - (self._num * derivative * others).scale(exponent)
        factors = dict(self._factors)
        for factor, _, _ in active:
            factors[factor] += 1
        return RatFn._build(numerator, factors)

    def evaluate(self, point: Sequence[AlgScalar | int | Fraction]) -> AlgScalar:
        denominator = AlgScalar(1)
        for factor, exponent in self._factors:
            denominator = denominator * factor.evaluate(point) ** exponent
        if not denominator:
            raise DivisionByZeroError(f"denominator of '{self.render()}' vanishes at {tuple(point)}")
        return self._num.evaluate(point) / denominator

    def render(self) -> str:
        if not self._factors:
            return self._num.render()
        pieces = []
        for factor, exponent in self._factors:
            body = factor.render()
            if not factor.is_monomial:
                body = f"({body})"
            pieces.append(body if exponent == 1 else f"{body}^{exponent}")
        numerator = self._num.render()
        if not self._num.is_monomial:
            numerator = f"({numerator})"
        denominator = "*".join(pieces)
        if len(pieces) > 1:
            denominator = f"({denominator})"
        return f"{numerator}/{denominator}"


def ratfn_sum(values: Iterable[RatFn]) -> RatFn:
    total = RatFn.zero()
    for value in values:
        total = total + value
    return total


COORDINATES = tuple(RatFn.variable(var) for var in range(1, DIMENSION + 1))
