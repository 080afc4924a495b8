from unittest import TestCase

from g2conformal.characterize import lie_bracket, recover_distribution
from g2conformal.constants import DEFAULT_SAMPLE_POINTS
from g2conformal.exceptions import ArityError, CalibrationError, NotKillingError
from g2conformal.flat_model import ASSET_DIR
from g2conformal.geometry.metric import MetricField
from g2conformal.geometry.tensor import TensorField
from g2conformal.geometry.tensorio import load_form
from g2conformal.geometry.tractor import form_from_components
from g2conformal.killing import (
    SolutionSpaceBasis,
    as_scale,
    bracket_coefficients,
    calibrate_constant,
    convention_check,
    decompose_killing,
    einstein_kernel,
    einstein_part,
    is_almost_einstein,
    is_conformal_killing,
    killing_from_scale,
    solve_polynomial_solutions,
    span_rank,
    symmetry_residual,
    vector_field_of,
)
from g2conformal.scalars.ratfn import COORDINATES, RatFn

from .helpers import perturbed_metric

x1, x2, x3, x4, x5 = COORDINATES

# (kind, degree) -> dimension of the polynomial solutions on the flat metric
FLAT_SOLUTION_DIMENSIONS = {
    ("aEs", 1): 6,
    ("aEs", 2): 7,
    ("cKf", 1): 16,
    ("cKf", 2): 21,
}


class FlatSolutionsMixin:
    @classmethod
    def setUpClass(cls):
        cls.flat = MetricField.flat()
        cls.phi0 = load_form(ASSET_DIR / "phi0.txt")
        cls.scales = solve_polynomial_solutions("aEs", cls.flat, 2)
        cls.killing = solve_polynomial_solutions("cKf", cls.flat, 2)


class TestPolynomialSolutions(FlatSolutionsMixin, TestCase):
    def test_dimensions(self):
        self.assertEqual(self.scales.dimension, FLAT_SOLUTION_DIMENSIONS[("aEs", 2)])
        self.assertEqual(len(self.killing), FLAT_SOLUTION_DIMENSIONS[("cKf", 2)])
        for (kind, degree), dimension in FLAT_SOLUTION_DIMENSIONS.items():
            if degree == 1:
                self.assertEqual(solve_polynomial_solutions(kind, self.flat, degree).dimension, dimension)

    def test_solutions_solve(self):
        for sigma in self.scales:
            self.assertTrue(is_almost_einstein(sigma, self.flat))
        for xi in self.killing:
            self.assertTrue(is_conformal_killing(xi, self.flat))
        self.assertTrue(is_almost_einstein(x1 * x4 + x2 * x5 - x3 * x3 / 2, self.flat))
        self.assertFalse(is_almost_einstein(x1 * x1, self.flat))

    def test_rejected_inputs(self):
        with self.assertRaises(ValueError):
            solve_polynomial_solutions("Killing", self.flat, 2)
        with self.assertRaises(ValueError):
            solve_polynomial_solutions("aEs", perturbed_metric(1), 2)
        with self.assertRaises(ArityError):
            as_scale(TensorField.zeros("d"))
        with self.assertRaises(ArityError):
            is_conformal_killing(TensorField.zeros("u"), self.flat)

    def test_basis_needs_every_field(self):
        with self.assertRaises(ValueError):
            SolutionSpaceBasis(kind="aEs", basis=[])
        with self.assertRaises(ValueError):
            SolutionSpaceBasis(kind="Killing", basis=[], degree=1)


class TestCalibration(FlatSolutionsMixin, TestCase):
    def test_constant(self):
        self.assertEqual(calibrate_constant(self.phi0, self.flat, self.scales.basis), 1)

    def test_constant_scales_quadratically(self):
        self.assertEqual(calibrate_constant(self.phi0.scale(2), self.flat, self.scales.basis), 4)

    def test_scales_map_to_killing_fields(self):
        for sigma in self.scales:
            xi = killing_from_scale(sigma, self.phi0, self.flat)
            self.assertTrue(is_conformal_killing(xi, self.flat))
            self.assertEqual(einstein_part(xi, self.phi0, self.flat)[()], as_scale(sigma)[()])

    def test_no_scales(self):
        with self.assertRaises(CalibrationError):
            calibrate_constant(self.phi0, self.flat, [])

    def test_readings(self):
        checks = convention_check(self.phi0, self.flat, self.scales.basis)
        self.assertTrue(checks["corrected"].passed)
        self.assertEqual(checks["corrected"].constant, 1)
        self.assertFalse(checks["printed"].passed)


class TestDecomposition(FlatSolutionsMixin, TestCase):
    def setUp(self):
        self.frame = recover_distribution(self.phi0, self.flat, DEFAULT_SAMPLE_POINTS)

    def test_translation(self):
        # d/dx1 lowered by the flat metric
        xi = form_from_components(1, {(3,): RatFn.one()}, 2)
        result = decompose_killing(xi, self.phi0, self.flat, 1)
        self.assertEqual(result.symmetry + killing_from_scale(result.scale, self.phi0, self.flat), xi)
        self.assertTrue(einstein_part(result.symmetry, self.phi0, self.flat).is_zero)
        self.assertTrue(is_almost_einstein(result.scale, self.flat))
        symmetry = vector_field_of(result.symmetry, self.flat)
        self.assertTrue(symmetry_residual(symmetry, self.frame, DEFAULT_SAMPLE_POINTS).passed)

    def test_every_killing_field(self):
        for index, xi in enumerate(self.killing.basis):
            result = decompose_killing(xi, self.phi0, self.flat, 1)
            self.assertTrue(is_conformal_killing(result.symmetry, self.flat), f"field {index}")
            self.assertTrue(einstein_part(result.symmetry, self.phi0, self.flat).is_zero, f"field {index}")
            report = symmetry_residual(vector_field_of(result.symmetry, self.flat), self.frame, DEFAULT_SAMPLE_POINTS)
            self.assertTrue(all(report.inside), f"field {index}")
            self.assertTrue(report.exact, f"field {index}")

    def test_split(self):
        symmetries = einstein_kernel(self.killing.basis, self.phi0, self.flat)
        images = [killing_from_scale(sigma, self.phi0, self.flat) for sigma in self.scales]
        self.assertEqual(len(symmetries), 14)
        self.assertEqual(span_rank(images), 7)
        self.assertEqual(span_rank(symmetries + images), 21)
        for xi in symmetries:
            field = vector_field_of(xi, self.flat)
            report = symmetry_residual(field, self.frame, DEFAULT_SAMPLE_POINTS)
            self.assertTrue(report.passed)
            self.assertTrue(report.exact)
            self.assertTrue(all(entry is not None for entry in report.coefficients))

    def test_image_of_a_scale_is_not_a_symmetry(self):
        xi = killing_from_scale(TensorField.scalar(1, 1), self.phi0, self.flat)
        field = vector_field_of(xi, self.flat)
        report = symmetry_residual(field, self.frame, DEFAULT_SAMPLE_POINTS)
        self.assertFalse(report.passed)
        self.assertFalse(report.exact)
        self.assertIn(None, report.coefficients)

    def test_bracket_coefficients(self):
        first, second = self.frame.distribution
        self.assertEqual(bracket_coefficients([RatFn.zero()] * 5, self.frame.distribution), [0, 0])
        self.assertEqual(bracket_coefficients([value * x1 for value in second], self.frame.distribution), [0, x1])
        # [D, D] leaves D for a generic distribution
        self.assertIsNone(bracket_coefficients(lie_bracket(first, second), self.frame.distribution))

    def test_rejected_inputs(self):
        with self.assertRaises(NotKillingError):
            decompose_killing(form_from_components(1, {(0,): x1}, 2), self.phi0, self.flat, 1)
        with self.assertRaises(CalibrationError):
            decompose_killing(self.killing.basis[0], self.phi0, self.flat, None)
