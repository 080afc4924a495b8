from unittest import TestCase

from g2conformal.exceptions import ArityError
from g2conformal.flat_model import phi_slot_section
from g2conformal.geometry.metric import MetricField, conformal_rescale, transform_standard_slots
from g2conformal.geometry.tensor import TensorField
from g2conformal.geometry.tractor import (
    TractorMetric,
    TractorSection,
    bgg_theta0,
    flat_parallel_solve,
    form_components,
    form_from_components,
    normality_residuals,
    parallel_space_dimension,
    reproduces_parallel,
    section_from_vector,
    section_to_vector,
    slot_keys,
    split_L0,
    tau_minus,
    tau_plus,
    tractor_connection,
    tractor_curvature,
    wedge_identities,
)
from g2conformal.scalars.algscalar import SQRT6
from g2conformal.scalars.ratfn import COORDINATES, RatFn

from .helpers import perturbed_metric, random_form

x1, x2, x3, x4, x5 = COORDINATES
ORIGIN = (0, 0, 0, 0, 0)

# Lambda^(k+1) of a 7-dimensional space
SECTION_SIZES = {0: 7, 1: 21, 2: 35}


def random_section(seed: int, k: int) -> TractorSection:
    return TractorSection(
        k=k,
        rho=random_form(seed, k, k - 1),
        phi=random_form(seed + 1, k + 1, k + 1),
        mu=random_form(seed + 2, k - 1, k - 1) if k else None,
        sigma=random_form(seed + 3, k, k + 1),
    )


class TestTractorSection(TestCase):
    def test_slot_keys(self):
        for k, size in SECTION_SIZES.items():
            self.assertEqual(len(slot_keys(k)), size)
        self.assertNotIn("mu", {name for name, _ in slot_keys(0)})

    def test_validation(self):
        with self.assertRaises(ArityError):
            TractorSection.zero(3)
        with self.assertRaises(ArityError):
            TractorSection(
                k=0,
                rho=TensorField.scalar(0, -1),
                phi=TensorField.zeros("d", 1),
                mu=TensorField.zeros("d"),
                sigma=TensorField.scalar(0, 1),
            )
        with self.assertRaises(ArityError):
            TractorSection(
                k=1,
                rho=TensorField.zeros("d"),
                phi=TensorField.zeros("dd", 2),
                sigma=TensorField.zeros("d", 2),
            )
        with self.assertRaises(ArityError):
            TractorSection(k=0, rho=TensorField.zeros("d"), phi=TensorField.zeros("d"), sigma=TensorField.scalar(0))

    def test_arithmetic(self):
        section = random_section(11, 1)
        self.assertTrue((section - section).is_zero)
        self.assertEqual(section + section, section.scale(2))
        self.assertTrue(section.is_antisymmetric())
        self.assertTrue(TractorSection.zero(2).is_zero)

    def test_vector_coordinates(self):
        vector = list(range(1, SECTION_SIZES[2] + 1))
        section = section_from_vector(2, vector)
        self.assertEqual(section_to_vector(section), vector)
        self.assertEqual(form_components(section.mu), {(a,): 21 + a for a in range(5)})
        with self.assertRaises(ArityError):
            section_from_vector(0, [1, 2, 3])


class TestTractorConnection(TestCase):
    def setUp(self):
        self.flat = MetricField.flat()

    def test_flat_curvature_vanishes(self):
        for k in (0, 1, 2):
            self.assertTrue(tractor_curvature(random_section(20 + k, k), self.flat).is_zero)

    def test_curved_curvature_has_no_sigma_part(self):
        curvature = tractor_curvature(random_section(25, 0), perturbed_metric(1))
        self.assertTrue(curvature.sigma.is_zero)

    def test_curvature_needs_plain_section(self):
        derivative = tractor_connection(TractorSection.zero(0), self.flat)
        with self.assertRaises(ArityError):
            tractor_curvature(derivative, self.flat)

    def test_tractor_metric(self):
        tractor_metric = TractorMetric(self.flat)
        self.assertEqual(tractor_metric.pair(tau_plus(), tau_minus())[()], 1)
        self.assertTrue(tractor_metric.pair(tau_plus(), tau_plus()).is_zero)
        self.assertEqual(tractor_metric.matrix()[0][6], 1)
        self.assertEqual(tractor_metric.matrix()[3][3], -1)

    def test_tractor_metric_is_parallel(self):
        tractor_metric = TractorMetric(self.flat)
        first, second = random_section(30, 0), random_section(40, 0)
        derivative = tractor_metric.pair(tractor_connection(first, self.flat), second) + tractor_metric.pair(
            first, tractor_connection(second, self.flat)
        )
        self.assertEqual(derivative, tractor_metric.pair(first, second).partial())


class TestFlatParallelSections(TestCase):
    def setUp(self):
        self.flat = MetricField.flat()

    def test_standard_tractor(self):
        section = flat_parallel_solve(0, [1, 0, 0, 0, 0, 0, 0])
        self.assertEqual(section.rho[()], 1)
        self.assertEqual(section.sigma[()], x3 * x3 / 2 - x1 * x4 - x2 * x5)
        self.assertTrue(tractor_connection(section, self.flat).is_zero)

    def test_parallel_threeform(self):
        initial = phi_slot_section()
        section = flat_parallel_solve(2, initial)
        self.assertEqual(section.evaluate(ORIGIN), initial.evaluate(ORIGIN))
        self.assertTrue(reproduces_parallel(section, self.flat))
        self.assertTrue(bgg_theta0(2, section.sigma, self.flat).is_zero)

    def test_normality_residuals(self):
        section = flat_parallel_solve(2, phi_slot_section())
        self.assertTrue(all(residual.is_zero for residual in normality_residuals(section, self.flat)))
        with self.assertRaises(ArityError):
            normality_residuals(TractorSection.zero(1), self.flat)

    def test_parallel_space_dimension(self):
        self.assertEqual(parallel_space_dimension(0, 2), 7)
        self.assertEqual(parallel_space_dimension(0, 4), 7)
        self.assertLess(parallel_space_dimension(0, 1), 7)
        self.assertEqual(parallel_space_dimension(2, 2), 35)

    def test_wedge_identities(self):
        section = flat_parallel_solve(2, phi_slot_section())
        top_sigma_sigma_mu, top_sigma_mu_rho = wedge_identities(section).top_coefficients()
        self.assertFalse(top_sigma_sigma_mu)
        self.assertEqual(top_sigma_mu_rho.evaluate(ORIGIN), SQRT6 / 18)
        with self.assertRaises(ArityError):
            wedge_identities(TractorSection.zero(1))


class TestSplitting(TestCase):
    def setUp(self):
        self.flat = MetricField.flat()

    def test_scale_splitting(self):
        sigma = TensorField.scalar(x1 * x1 + x3)
        section = split_L0(0, sigma, self.flat)
        self.assertEqual(section.phi[0], x1 * 2)
        self.assertEqual(section.phi[2], 1)
        self.assertEqual(section.sigma.weight, 1)

    def test_einstein_scale_has_no_theta0(self):
        sigma = flat_parallel_solve(0, [1, 0, 0, 0, 0, 0, 0]).sigma
        self.assertTrue(bgg_theta0(0, sigma, self.flat).is_zero)
        self.assertFalse(bgg_theta0(0, TensorField.scalar(x1 * x1), self.flat).is_zero)

    def test_killing_form_splitting(self):
        # dx1^dx2 is parallel on the flat metric
        sigma = form_from_components(2, {(0, 1): RatFn.one()})
        section = split_L0(2, sigma, self.flat)
        self.assertTrue(section.phi.is_zero)
        self.assertTrue(section.mu.is_zero)
        self.assertTrue(bgg_theta0(2, sigma, self.flat).is_zero)

    def test_einstein_scales_survive_rescaling(self):
        omega = x1 * x1 / 10 + 1
        rescaled, _ = conformal_rescale(self.flat, omega)
        for index in range(7):
            initial = [0] * 7
            initial[index] = 1
            sigma = flat_parallel_solve(0, initial).sigma
            self.assertTrue(bgg_theta0(0, sigma.scale(omega), rescaled).is_zero, f"scale {index}")
        self.assertFalse(bgg_theta0(0, TensorField.scalar(x1 * x1 * omega, 1), rescaled).is_zero)

    def test_rescaled_splitting(self):
        omega = x3 + 2
        rescaled, upsilon = conformal_rescale(self.flat, omega)
        sigma = TensorField.scalar(x1 * x1 + x3, 1)
        section = split_L0(0, sigma, self.flat)
        _, phi, _ = transform_standard_slots(section.rho, section.phi, section.sigma, upsilon, self.flat)
        moved = split_L0(0, sigma.scale(omega), rescaled)
        self.assertEqual(moved.sigma, sigma.scale(omega))
        self.assertEqual(moved.phi, phi.scale(omega))

    def test_slot_change_preserves_tractor_metric(self):
        metric = perturbed_metric(4)
        _, upsilon = conformal_rescale(metric, x2 * x5 + 1)
        section = random_section(30, 0)
        rho, phi, sigma = transform_standard_slots(section.rho, section.phi, section.sigma, upsilon, metric)
        moved = TractorSection(k=0, rho=rho, phi=phi, sigma=sigma)
        pairing = TractorMetric(metric)
        self.assertEqual(pairing.pair(moved, moved), pairing.pair(section, section))

    def test_wrong_degree(self):
        with self.assertRaises(ArityError):
            split_L0(2, TensorField.zeros("d"), self.flat)
        with self.assertRaises(ArityError):
            bgg_theta0(1, TensorField.zeros("dd"), self.flat)
