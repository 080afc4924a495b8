from __future__ import annotations

from fractions import Fraction
from functools import lru_cache, total_ordering
from typing import Union

from sympy import QQ, Rational as SympyRational, S, expand, sqrt
from sympy.polys.polyclasses import ANP

from g2conformal.exceptions import DivisionByZeroError

Rational = Union[int, Fraction]

# Q(sqrt2, sqrt3) as a sympy number field; polynomials and matrices over the
# chart are built on this domain.
FIELD = QQ.algebraic_field(sqrt(2), sqrt(3))


def _sign2(u: Fraction, v: Fraction) -> int:
    """Sign of u + v*sqrt2 in the real embedding."""
    if v == 0:
        return (u > 0) - (u < 0)
    if u == 0:
        return (v > 0) - (v < 0)
    su = 1 if u > 0 else -1
    sv = 1 if v > 0 else -1
    if su == sv:
        return su
    return su if u * u > 2 * v * v else sv


@total_ordering
class AlgScalar:
    """
    Exact element a + b*sqrt2 + c*sqrt3 + d*sqrt6 of the field Q(sqrt2, sqrt3).

    Instances are immutable. Integers and Fractions are accepted wherever an
    AlgScalar is, and coerce to the rational part.
    """

    __slots__ = ("_coeffs", "_rational")

    def __init__(
        self, a: Rational = 0, b: Rational = 0, c: Rational = 0, d: Rational = 0
    ) -> None:
        self._coeffs = (Fraction(a), Fraction(b), Fraction(c), Fraction(d))
        self._rational = not (b or c or d)

    @property
    def a(self) -> Fraction:
        return self._coeffs[0]

    @property
    def b(self) -> Fraction:
        return self._coeffs[1]

    @property
    def c(self) -> Fraction:
        return self._coeffs[2]

    @property
    def d(self) -> Fraction:
        return self._coeffs[3]

    @property
    def coeffs(self) -> tuple[Fraction, Fraction, Fraction, Fraction]:
        return self._coeffs

    @property
    def is_rational(self) -> bool:
        return self._rational

    @classmethod
    def from_int(cls, x: int) -> AlgScalar:
        return cls(x)

    @classmethod
    def coerce(cls, x: object) -> AlgScalar:
        if isinstance(x, AlgScalar):
            return x
        if isinstance(x, (int, Fraction)):
            return cls(x)
        raise TypeError(f"Cannot interpret {type(x).__name__} as an AlgScalar")

    @classmethod
    def sqrt2(cls) -> AlgScalar:
        return cls(0, 1)

    @classmethod
    def sqrt3(cls) -> AlgScalar:
        return cls(0, 0, 1)

    @classmethod
    def sqrt6(cls) -> AlgScalar:
        return cls(0, 0, 0, 1)

    def as_fraction(self) -> Fraction:
        if not self._rational:
            raise ValueError(f"{self.render()} is not rational")
        return self._coeffs[0]

    def __repr__(self) -> str:
        a, b, c, d = self._coeffs
        return f"AlgScalar({a}, {b}, {c}, {d})"

    def __str__(self) -> str:
        return self.render()

    def render(self) -> str:
        """Text accepted by the expression parser, e.g. '1/2 - 1/3*sqrt3'."""
        parts = []
        for coeff, name in zip(self._coeffs, ("", "sqrt2", "sqrt3", "sqrt6")):
            if coeff == 0:
                continue
            if not name:
                body = str(abs(coeff))
            elif abs(coeff) == 1:
                body = name
            else:
                body = f"{abs(coeff)}*{name}"
            if not parts:
                parts.append(body if coeff > 0 else f"-{body}")
            else:
                parts.append(f"+ {body}" if coeff > 0 else f"- {body}")
        return " ".join(parts) if parts else "0"

    @property
    def term_count(self) -> int:
        return sum(1 for coeff in self._coeffs if coeff)

    def __bool__(self) -> bool:
        return any(self._coeffs)

    def __hash__(self) -> int:
        if self._rational:
            return hash(self._coeffs[0])
        return hash(self._coeffs)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction)):
            return self._rational and self._coeffs[0] == other
        if isinstance(other, AlgScalar):
            return self._coeffs == other._coeffs
        return NotImplemented

    def __lt__(self, other: Rational | AlgScalar) -> bool:
        if not isinstance(other, (int, Fraction, AlgScalar)):
            return NotImplemented
        return (self - other).sign() < 0

    def sign(self) -> int:
        """Exact sign in the real embedding where every square root is positive."""
        if self._rational:
            a = self._coeffs[0]
            return (a > 0) - (a < 0)
        a, b, c, d = self._coeffs
        # self = p + q*sqrt3 with p = a + b*sqrt2, q = c + d*sqrt2
        sp = _sign2(a, b)
        sq = _sign2(c, d)
        if sq == 0:
            return sp
        if sp == 0 or sp == sq:
            return sq
        # opposite signs: compare p^2 against 3q^2
        r = a * a + 2 * b * b - 3 * c * c - 6 * d * d
        s = 2 * a * b - 6 * c * d
        return sp if _sign2(r, s) > 0 else sq

    def conjugates(self) -> tuple[AlgScalar, AlgScalar, AlgScalar, AlgScalar]:
        """Images under the four automorphisms sqrt2 -> +-sqrt2, sqrt3 -> +-sqrt3."""
        a, b, c, d = self._coeffs
        return (
            self,
            AlgScalar(a, -b, c, -d),
            AlgScalar(a, b, -c, -d),
            AlgScalar(a, -b, -c, d),
        )

    def norm(self) -> Fraction:
        """Product of the conjugates; zero only for zero."""
        product = AlgScalar(1)
        for conjugate in self.conjugates():
            product = product * conjugate
        return product.as_fraction()

    def __neg__(self) -> AlgScalar:
        a, b, c, d = self._coeffs
        return AlgScalar(-a, -b, -c, -d)

    def __add__(self, other: Rational | AlgScalar) -> AlgScalar:
        if isinstance(other, (int, Fraction)):
            a, b, c, d = self._coeffs
            return AlgScalar(a + other, b, c, d)
        if isinstance(other, AlgScalar):
            a1, b1, c1, d1 = self._coeffs
            a2, b2, c2, d2 = other._coeffs
            return AlgScalar(a1 + a2, b1 + b2, c1 + c2, d1 + d2)
        return NotImplemented

    def __radd__(self, other: Rational) -> AlgScalar:
        return self + other

    def __sub__(self, other: Rational | AlgScalar) -> AlgScalar:
        if isinstance(other, (int, Fraction, AlgScalar)):
            return self + (-AlgScalar.coerce(other))
        return NotImplemented

    def __rsub__(self, other: Rational) -> AlgScalar:
        return (-self) + other

    def __mul__(self, other: Rational | AlgScalar) -> AlgScalar:
        if isinstance(other, (int, Fraction)):
            a, b, c, d = self._coeffs
            return AlgScalar(a * other, b * other, c * other, d * other)
        if not isinstance(other, AlgScalar):
            return NotImplemented
        if other._rational:
            return self * other._coeffs[0]
        if self._rational:
            return other * self._coeffs[0]
        a1, b1, c1, d1 = self._coeffs
        a2, b2, c2, d2 = other._coeffs
        # sqrt2*sqrt3 = sqrt6, sqrt2*sqrt6 = 2*sqrt3, sqrt3*sqrt6 = 3*sqrt2
        return AlgScalar(
            a1 * a2 + 2 * b1 * b2 + 3 * c1 * c2 + 6 * d1 * d2,
            a1 * b2 + b1 * a2 + 3 * (c1 * d2 + d1 * c2),
            a1 * c2 + c1 * a2 + 2 * (b1 * d2 + d1 * b2),
            a1 * d2 + d1 * a2 + b1 * c2 + c1 * b2,
        )

    def __rmul__(self, other: Rational) -> AlgScalar:
        return self * other

    def inverse(self) -> AlgScalar:
        if not self:
            raise DivisionByZeroError("division by zero in Q(sqrt2, sqrt3)")
        a, b, c, d = self._coeffs
        if self._rational:
            return AlgScalar(1 / a)
        # 1/(p + q*sqrt3) = (p - q*sqrt3) / (p^2 - 3q^2), and p^2 - 3q^2 lies in Q(sqrt2)
        r = a * a + 2 * b * b - 3 * c * c - 6 * d * d
        s = 2 * a * b - 6 * c * d
        norm = r * r - 2 * s * s
        return AlgScalar(a, b, -c, -d) * AlgScalar(r / norm, -s / norm)

    def __truediv__(self, other: Rational | AlgScalar) -> AlgScalar:
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise DivisionByZeroError("division by zero in Q(sqrt2, sqrt3)")
            return self * (Fraction(1) / other)
        if isinstance(other, AlgScalar):
            return self * other.inverse()
        return NotImplemented

    def __rtruediv__(self, other: Rational) -> AlgScalar:
        return AlgScalar.coerce(other) * self.inverse()

    def __pow__(self, exponent: int) -> AlgScalar:
        if exponent < 0:
            return self.inverse() ** (-exponent)
        result = AlgScalar(1)
        base = self
        while exponent > 0:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result


ZERO = AlgScalar(0)
ONE = AlgScalar(1)
SQRT2 = AlgScalar.sqrt2()
SQRT3 = AlgScalar.sqrt3()
SQRT6 = AlgScalar.sqrt6()


def _fraction(value: object) -> Fraction:
    value = SympyRational(value)
    return Fraction(int(value.p), int(value.q))


def _from_expr(expr: object) -> AlgScalar:
    coefficients = expand(expr).as_coefficients_dict()
    return AlgScalar(*(_fraction(coefficients.get(root, 0)) for root in (S.One, sqrt(2), sqrt(3), sqrt(6))))


# Images of 1, sqrt2, sqrt3, sqrt6 in FIELD, and of the powers of its primitive element as AlgScalars.
_ROOTS = (FIELD.one, FIELD.from_sympy(sqrt(2)), FIELD.from_sympy(sqrt(3)), FIELD.from_sympy(sqrt(6)))
_PRIMITIVE_POWERS = tuple(
    _from_expr(FIELD.to_sympy(FIELD.new([1] + [0] * power))) for power in range(FIELD.mod.degree())
)


@lru_cache(maxsize=4096)
def _field_element(coeffs: tuple[Fraction, Fraction, Fraction, Fraction]) -> ANP:
    total = FIELD.zero
    for coeff, root in zip(coeffs, _ROOTS):
        if coeff:
            total = total + root * QQ(coeff.numerator, coeff.denominator)
    return total


@lru_cache(maxsize=4096)
def _scalar(rep: tuple) -> AlgScalar:
    total = ZERO
    for power, value in enumerate(reversed(rep)):
        if value:
            total = total + _PRIMITIVE_POWERS[power] * Fraction(int(value.numerator), int(value.denominator))
    return total


def to_field(value: AlgScalar | Rational) -> ANP:
    """The element of FIELD equal to value."""
    return _field_element(AlgScalar.coerce(value).coeffs)


def from_field(element: ANP) -> AlgScalar:
    return _scalar(element.to_tuple())
