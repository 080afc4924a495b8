from unittest import TestCase

from g2conformal.algebra.kostant import (
    KostantComplex,
    ce_differential,
    kostant_codiff,
    laplacian_kernel,
    normality_containment_check,
)
from g2conformal.algebra.lie_g2 import (
    H,
    PHI,
    ThreeForm7,
    bilinear_from_threeform,
    double_insertion_multiple,
    g2_basis,
    g2_graded,
    grading_decompose,
    in_g2,
    iphi_forward,
    iphi_reverse,
    iphi_split,
    phi_annihilator,
    preserves_metric,
    so34_basis,
    so34_graded,
    span_rank,
    split_equivariance_holds,
    three_form_phi,
)
from g2conformal.scalars.algscalar import AlgScalar

SQRT6 = AlgScalar.sqrt6()

GRADED_DIMENSION_EXPECTATIONS = {
    "g2": (2, 1, 2, 4, 2, 1, 2),
    "so34": (5, 11, 5),
}


class TestG2(TestCase):
    def test_threeform_is_fixed(self):
        self.assertEqual(three_form_phi(), PHI)
        self.assertNotEqual(three_form_phi(), PHI.scale(2))

    def test_basis(self):
        basis = g2_basis()
        self.assertEqual(len(basis), 14)
        self.assertEqual(span_rank(basis), 14)
        self.assertTrue(all(preserves_metric(element) for element in basis))
        self.assertTrue(all(PHI.annihilated_by(element) for element in basis))

    def test_annihilator_of_phi_is_g2(self):
        annihilator = phi_annihilator()
        self.assertEqual(len(annihilator), 14)
        self.assertTrue(all(in_g2(element) for element in annihilator))
        self.assertEqual(span_rank(so34_basis()), 21)

    def test_closed_under_bracket(self):
        basis = g2_basis()
        for left in basis:
            for right in basis:
                self.assertTrue(in_g2(left.bracket(right)))

    def test_gradings(self):
        self.assertEqual(g2_graded().dimensions, GRADED_DIMENSION_EXPECTATIONS["g2"])
        self.assertEqual(so34_graded().dimensions, GRADED_DIMENSION_EXPECTATIONS["so34"])
        self.assertTrue(g2_graded().bracket_respects_grading())
        self.assertTrue(so34_graded().bracket_respects_grading())

    def test_grading_decompose(self):
        element = sum(g2_basis()[1:], g2_basis()[0])
        parts = grading_decompose(element)
        total = parts[-3]
        for degree in range(-2, 4):
            total = total + parts[degree]
        self.assertEqual(total, element)
        with self.assertRaises(ValueError):
            grading_decompose(iphi_reverse([1, 0, 0, 0, 0, 0, 0]))

    def test_corrupted_threeform_is_not_invariant(self):
        corrupted = PHI + ThreeForm7({(0, 1, 2): 1})
        self.assertFalse(all(corrupted.annihilated_by(element) for element in g2_basis()))


class TestThreeFormPairing(TestCase):
    def test_pairing_of_phi(self):
        pairing = bilinear_from_threeform(PHI)
        self.assertFalse(pairing.degenerate)
        self.assertEqual(pairing.form, H.scale(AlgScalar(1) / SQRT6))
        self.assertEqual(pairing.determinant, SQRT6 / 1296)

    def test_scaling_law(self):
        pairing = bilinear_from_threeform(PHI)
        scaled = bilinear_from_threeform(PHI.scale(2))
        self.assertEqual(scaled.pairing, [[value * 8 for value in row] for row in pairing.pairing])
        self.assertEqual(scaled.determinant, pairing.determinant * 2**21)

    def test_degenerate_form(self):
        pairing = bilinear_from_threeform(ThreeForm7({(0, 1, 2): 1}))
        self.assertTrue(pairing.degenerate)
        self.assertIsNone(pairing.form)


class TestAdjointSplitting(TestCase):
    def test_double_insertion(self):
        self.assertEqual(double_insertion_multiple(), 1)
        vector = [AlgScalar(i) for i in range(1, 8)]
        self.assertEqual(iphi_forward(iphi_reverse(vector)), vector)

    def test_split(self):
        for element in so34_basis():
            g2_part, vector = iphi_split(element)
            self.assertTrue(in_g2(g2_part))
            self.assertEqual(g2_part + iphi_reverse(vector), element)

    def test_equivariance(self):
        generators = g2_basis()[:4]
        for generator in generators:
            for element in so34_basis()[::3]:
                self.assertTrue(split_equivariance_holds(generator, element))


class TestKostant(TestCase):
    @classmethod
    def setUpClass(cls):
        cls.complex = KostantComplex.for_space("g2")

    def test_differential_squares_to_zero(self):
        for degree in (0, 1, 2):
            for key in self.complex.keys(degree):
                chain = self.complex.basis_cochain(degree, key)
                self.assertTrue(ce_differential(ce_differential(chain)).is_zero)

    def test_codifferential_squares_to_zero(self):
        for degree in (2, 3):
            for key in self.complex.keys(degree):
                chain = self.complex.basis_cochain(degree, key)
                self.assertTrue(kostant_codiff(kostant_codiff(chain)).is_zero)
        with self.assertRaises(ValueError):
            kostant_codiff(self.complex.basis_cochain(0, self.complex.keys(0)[0]))

    def test_hodge_decomposition(self):
        for degree in range(4):
            self.assertTrue(self.complex.hodge_dimensions(degree).balanced, f"degree {degree}")
        self.assertEqual(self.complex.hodge_dimensions(2).harmonic, 5)
        self.assertEqual(len(laplacian_kernel(2)), 5)

    def test_adjointness(self):
        for degree in (0, 1):
            scale = self.complex.adjointness_scale(degree)
            self.assertIsNotNone(scale)
            self.assertTrue(scale)

    def test_normality_containment(self):
        report = normality_containment_check()
        self.assertTrue(report.contained)
        self.assertEqual(report.harmonic_rank, 0)
        self.assertTrue(report.passed)

    def test_level_zero_action(self):
        level_zero = self.complex.level_zero()
        self.assertEqual(len(level_zero), 4)
        self.assertTrue(self.complex.harmonic_is_submodule(2))
        chains = laplacian_kernel(2)
        self.assertTrue(
            any(not self.complex.act(g, chain).is_zero for g in level_zero for chain in chains)
        )
        with self.assertRaises(ValueError):
            self.complex.act(self.complex.negative[0], chains[0])

    def test_unknown_space(self):
        with self.assertRaises(ValueError):
            KostantComplex.for_space("e8")
