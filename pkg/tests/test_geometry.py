from unittest import TestCase

from g2conformal.constants import WEYL_DIVERGENCE_FACTOR
from g2conformal.exceptions import ArityError, DegenerateMetricError
from g2conformal.geometry.curvature import curvature_pipeline
from g2conformal.geometry.metric import MetricField, conformal_rescale, cov_deriv, transform_standard_slots
from g2conformal.geometry.tensor import TensorField, constant_ratio, kronecker
from g2conformal.geometry.tractor import form_from_components
from g2conformal.scalars.ratfn import COORDINATES, RatFn

from .helpers import perturbed_metric, random_form

x1, x2, x3, x4, x5 = COORDINATES

RANDOM_METRIC_SEEDS = (1, 2, 3)


def dx(var: int) -> TensorField:
    return form_from_components(1, {(var - 1,): RatFn.one()})


class TestTensorField(TestCase):
    def test_wedge_normalization(self):
        form = dx(1).wedge(dx(2))
        self.assertEqual(form[0, 1], 1)
        self.assertEqual(form[1, 0], -1)
        self.assertTrue(form.is_antisymmetric())
        self.assertTrue(dx(1).wedge(dx(1)).is_zero)

    def test_wedge_is_associative(self):
        first = random_form(4, 1).wedge(random_form(5, 1)).wedge(random_form(6, 2))
        second = random_form(4, 1).wedge(random_form(5, 1).wedge(random_form(6, 2)))
        self.assertEqual(first, second)

    def test_contract(self):
        self.assertEqual(kronecker().contract(0, 1)[()], 5)
        with self.assertRaises(ArityError):
            TensorField.zeros("dd").contract(0, 1)

    def test_incompatible_operands(self):
        with self.assertRaises(TypeError):
            TensorField.zeros("d", 1) + TensorField.zeros("d", 2)
        with self.assertRaises(TypeError):
            TensorField.zeros("d") - TensorField.zeros("u")
        with self.assertRaises(ArityError):
            TensorField(variance="d", comps=[0, 0])

    def test_partial(self):
        field = TensorField.scalar(x1 * x1 * x5)
        derivative = field.partial()
        self.assertEqual(derivative[0], x1 * x5 * 2)
        self.assertEqual(derivative[4], x1 * x1)
        self.assertEqual(derivative[2], 0)

    def test_constant_ratio(self):
        form = random_form(7, 2, polynomial_degree=2)
        self.assertEqual(constant_ratio(form.scale(3), form), 3)
        self.assertIsNone(constant_ratio(form.scale(x1), form))
        self.assertIsNone(constant_ratio(form, TensorField.zeros("dd")))


class TestMetricField(TestCase):
    def test_flat(self):
        flat = MetricField.flat()
        self.assertTrue(flat.is_constant)
        self.assertEqual(flat.det, -1)
        self.assertTrue(flat.curvature.is_flat)
        self.assertTrue(flat.christoffel.is_zero)

    def test_degenerate_metrics(self):
        with self.assertRaises(DegenerateMetricError):
            MetricField.from_upper_entries({(0, 0): 1})
        with self.assertRaises(DegenerateMetricError):
            MetricField.from_upper_entries({(0, 0): 1, (1, 1): 1, (2, 2): 1, (3, 3): -1, (4, 4): -1})
        with self.assertRaises(ArityError):
            MetricField(g=TensorField.zeros("d"))

    def test_metric_compatibility(self):
        for seed in RANDOM_METRIC_SEEDS:
            metric = perturbed_metric(seed)
            self.assertTrue(metric.derivative(metric.g).is_zero, f"seed {seed}")

    def test_flat_derivative_is_partial(self):
        form = random_form(5, 1, 1)
        self.assertEqual(cov_deriv(form, MetricField.flat()), form.partial())

    def test_curvature_pipeline(self):
        metric = perturbed_metric(1)
        self.assertIs(curvature_pipeline(metric), metric.curvature)
        self.assertTrue(curvature_pipeline(MetricField.flat()).is_flat)

    def test_raise_then_lower(self):
        metric = perturbed_metric(1)
        form = random_form(2, 1)
        self.assertEqual(metric.lower(metric.raise_index(form, 0), 0), form)

    def test_covariant_derivatives_commute_on_scalars(self):
        metric = perturbed_metric(2)
        f = TensorField.scalar(x1 * x2 + x3**3)
        hessian = metric.derivative(metric.derivative(f))
        self.assertTrue(hessian.is_symmetric())


class TestCurvature(TestCase):
    def test_identities_on_random_metrics(self):
        for seed in RANDOM_METRIC_SEEDS:
            print(f"\n--[[ Curvature identities for seed {seed} ]]--")
            curvature = perturbed_metric(seed).curvature
            first, second = curvature.skew_residuals()
            self.assertTrue(first.is_zero and second.is_zero)
            self.assertTrue(curvature.bianchi_residual().is_zero)
            self.assertTrue(all(trace.is_zero for trace in curvature.weyl_traces()))
            self.assertTrue(curvature.ricci.is_symmetric())
            divergence, cotton = curvature.weyl_divergence(), curvature.cotton
            for left, right in zip(divergence.comps, cotton.comps):
                self.assertEqual(left, right * WEYL_DIVERGENCE_FACTOR)

    def test_random_metrics_are_curved(self):
        curvature = perturbed_metric(1).curvature
        self.assertFalse(curvature.is_flat)

    def test_conformally_flat_metric(self):
        rescaled, upsilon = conformal_rescale(MetricField.flat(), x1 + 1)
        curvature = rescaled.curvature
        self.assertFalse(curvature.is_flat)
        self.assertTrue(curvature.weyl.is_zero)
        self.assertEqual(upsilon[0], 1 / (x1 + 1))

    def test_weyl_scales_with_the_metric(self):
        metric = perturbed_metric(3)
        omega = x4 + 1
        rescaled, _ = conformal_rescale(metric, omega)
        self.assertEqual(rescaled.curvature.weyl, metric.curvature.weyl.scale(omega * omega))

    def test_unit_factor_fixes_standard_slots(self):
        metric = perturbed_metric(5)
        rescaled, upsilon = conformal_rescale(metric, 1)
        self.assertTrue(upsilon.is_zero)
        self.assertEqual(rescaled.g, metric.g)
        rho, phi, sigma = random_form(1, 0, -1), random_form(2, 1, 1), random_form(3, 0, 1)
        moved = transform_standard_slots(rho, phi, sigma, upsilon, metric)
        self.assertEqual(moved, (rho, phi, sigma))
        self.assertIs(moved[2], sigma)

    def test_standard_slots_under_rescaling(self):
        metric = MetricField.flat()
        _, upsilon = conformal_rescale(metric, x3 + 2)
        sigma = TensorField.scalar(x1, 1)
        rho, phi, same = transform_standard_slots(
            TensorField.scalar(0, -1), TensorField.zeros("d", 1), sigma, upsilon, metric
        )
        self.assertIs(same, sigma)
        self.assertEqual(phi[2], x1 / (x3 + 2))
        self.assertEqual(phi[0], 0)
        # Ups^b Ups_b = -1/(x3 + 2)^2 for the flat metric
        self.assertEqual(rho[()], x1 / ((x3 + 2) * (x3 + 2) * 2))
