from fractions import Fraction
from unittest import TestCase

from hypothesis import given, settings
from hypothesis import strategies as st
from sympy import QQ, sqrt
from sympy.polys.rings import ring

from g2conformal.exceptions import DivisionByZeroError, ExpressionSyntaxError
from g2conformal.scalars.algscalar import FIELD, AlgScalar, from_field, to_field
from g2conformal.scalars.parser import parse_expr
from g2conformal.scalars.poly import RING, PolyQ, monomials_up_to
from g2conformal.scalars.ratfn import COORDINATES, RatFn

x1, x2, x3, x4, x5 = COORDINATES

SQRT2, SQRT3, SQRT6 = AlgScalar.sqrt2(), AlgScalar.sqrt3(), AlgScalar.sqrt6()

small_fractions = st.fractions(min_value=-5, max_value=5, max_denominator=7)
alg_scalars = st.builds(AlgScalar, small_fractions, small_fractions, small_fractions, small_fractions)

RENDER_EXPECTATIONS = {
    "1/2 - 1/3*sqrt3": AlgScalar(Fraction(1, 2), 0, Fraction(-1, 3)),
    "-sqrt6": -SQRT6,
    "0": AlgScalar(0),
    "3 + sqrt2 + 2*sqrt6": AlgScalar(3, 1, 0, 2),
}

PARSE_EXPECTATIONS = {
    "x1 + x2^2": x2**2 + x1,
    "2*x1*x3 - x4/3": x1 * x3 * 2 - x4 / 3,
    "(x1 + 1)^2": x1 * x1 + x1 * 2 + 1,
    "-x5": -x5,
    "sqrt2*sqrt3": RatFn.coerce(SQRT6),
    "1/(x1 - x2) + 1/(x1 + x2)": (x1 * 2) / (x1 * x1 - x2 * x2),
}


class TestAlgScalar(TestCase):
    def test_products_of_square_roots(self):
        self.assertEqual(SQRT2 * SQRT3, SQRT6)
        self.assertEqual(SQRT6 * SQRT6, 6)
        self.assertEqual(SQRT2 * SQRT6, SQRT3 * 2)
        self.assertEqual((SQRT2 + 1).inverse(), SQRT2 - 1)

    def test_render(self):
        for text, value in RENDER_EXPECTATIONS.items():
            self.assertEqual(value.render(), text)

    def test_sign_uses_the_real_embedding(self):
        self.assertEqual((SQRT2 - Fraction(7, 5)).sign(), 1)
        self.assertEqual((SQRT2 - Fraction(71, 50)).sign(), -1)
        self.assertEqual((SQRT2 + SQRT3 - Fraction(314, 100)).sign(), 1)
        self.assertEqual((SQRT6 - SQRT2 * SQRT3).sign(), 0)
        self.assertTrue(SQRT3 < 2)

    def test_division_by_zero(self):
        with self.assertRaises(DivisionByZeroError):
            AlgScalar(1) / AlgScalar(0)
        with self.assertRaises(ZeroDivisionError):
            AlgScalar(0).inverse()

    def test_coerce_rejects_floats(self):
        with self.assertRaises(TypeError):
            AlgScalar.coerce(1.5)

    @given(alg_scalars)
    @settings(max_examples=60, deadline=None)
    def test_inverse(self, value):
        if not value:
            return
        self.assertEqual(value * value.inverse(), 1)
        self.assertTrue(value.norm() != 0)

    @given(alg_scalars, alg_scalars, alg_scalars)
    @settings(max_examples=40, deadline=None)
    def test_field_axioms(self, a, b, c):
        self.assertEqual((a + b) * c, a * c + b * c)
        self.assertEqual((a * b) * c, a * (b * c))
        self.assertEqual(a - a, 0)

    @given(alg_scalars)
    @settings(max_examples=40, deadline=None)
    def test_render_is_parsed_back(self, value):
        self.assertEqual(parse_expr(value.render()), RatFn.coerce(value))


    def test_number_field_images(self):
        self.assertEqual(from_field(FIELD.from_sympy(sqrt(6))), SQRT6)
        self.assertEqual(from_field(FIELD.from_sympy(sqrt(2) - sqrt(3) / 2)), SQRT2 - SQRT3 / 2)
        self.assertEqual(to_field(Fraction(3, 4)), FIELD.convert(QQ(3, 4)))

    @given(alg_scalars, alg_scalars)
    @settings(max_examples=30, deadline=None)
    def test_number_field_arithmetic_agrees(self, a, b):
        self.assertEqual(to_field(a * b), to_field(a) * to_field(b))
        self.assertEqual(from_field(to_field(a) + to_field(b)), a + b)


class TestPolyQ(TestCase):
    def test_ring_element(self):
        x1_, x2_ = RING.gens[:2]
        self.assertEqual((x1 * x2 * SQRT3).num.poly, x1_ * x2_ * to_field(SQRT3))
        self.assertEqual(PolyQ.wrap(x1_ - x2_), (x1 - x2).num)
        _, y = ring("y", QQ)
        with self.assertRaises(ValueError):
            PolyQ.wrap(y)

    def test_monomials_up_to(self):
        self.assertEqual(len(monomials_up_to(0)), 1)
        self.assertEqual(len(monomials_up_to(1)), 6)
        self.assertEqual(len(monomials_up_to(2)), 21)
        self.assertEqual(len(monomials_up_to(4)), 126)

    def test_render_in_descending_grlex_order(self):
        self.assertEqual((x1 + x2**2).num.render(), "x2^2 + x1")
        self.assertEqual((x1 * x2 + x1**2).num.render(), "x1^2 + x1*x2")
        self.assertEqual((x3 * SQRT3 / 3 - 1).num.render(), "1/3*sqrt3*x3 - 1")

    def test_exact_divide(self):
        p = (x1 - x2).num
        q = (x1 * x1 - x2 * x2).num
        self.assertEqual(q.exact_divide(p), (x1 + x2).num)
        self.assertIsNone((x1 + 1).num.exact_divide(p))

    def test_diff(self):
        poly = (x1**3 * x2 + x5).num
        self.assertEqual(poly.diff(1), (x1**2 * x2 * 3).num)
        self.assertEqual(poly.diff(5), PolyQ.constant(1))
        with self.assertRaises(ValueError):
            poly.diff(6)


class TestRatFn(TestCase):
    def test_cancellation(self):
        value = (x1 * x1 - x2 * x2) / (x1 - x2)
        self.assertTrue(value.is_polynomial)
        self.assertEqual(value, x1 + x2)

    def test_quotient_rule(self):
        value = x1 / (x1 + x2)
        self.assertEqual(value.diff(1), x2 / (x1 + x2) ** 2)
        self.assertEqual(value.diff(3), 0)

    def test_evaluate(self):
        value = (x1 + x2 * SQRT2) / (x3 + 1)
        self.assertEqual(value.evaluate((1, 1, 1, 0, 0)), (SQRT2 + 1) / 2)
        with self.assertRaises(DivisionByZeroError):
            value.evaluate((0, 0, -1, 0, 0))

    def test_constant_value(self):
        self.assertEqual(RatFn.coerce(Fraction(2, 3)).constant_value(), Fraction(2, 3))
        with self.assertRaises(ValueError):
            x1.constant_value()

    def test_division_by_zero(self):
        with self.assertRaises(DivisionByZeroError):
            x1 / RatFn.zero()


class TestParser(TestCase):
    def test_expressions(self):
        for text, expected in PARSE_EXPECTATIONS.items():
            self.assertEqual(parse_expr(text), expected, text)

    def test_render_round_trip(self):
        value = parse_expr("x1^2*x3 - 1/3*sqrt6*x4 + 7")
        self.assertEqual(parse_expr(value.render()), value)

    def test_ode_aliases(self):
        self.assertEqual(parse_expr("q^2 + p*z", ode_aliases=True), x4**2 + x3 * x5)
        with self.assertRaises(ExpressionSyntaxError):
            parse_expr("q^2")

    def test_error_positions(self):
        cases = {"x1 +": 4, "x1 $ 2": 3, "(x1": 3, "x1^x2": 3, "": 0, "x6": 0}
        for text, position in cases.items():
            with self.assertRaises(ExpressionSyntaxError) as raised:
                parse_expr(text)
            self.assertEqual(raised.exception.position, position, text)

    def test_division_by_zero(self):
        with self.assertRaises(DivisionByZeroError):
            parse_expr("x1/(x2 - x2)")
