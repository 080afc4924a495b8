from fractions import Fraction
from unittest import TestCase

from g2conformal.constants import DEFAULT_SAMPLE_POINTS
from g2conformal.exceptions import InputFormatError
from g2conformal.flat_model import ASSET_DIR, nonnormal_form, phi_slot_section
from g2conformal.geometry.metric import MetricField
from g2conformal.geometry.tensor import TensorField
from g2conformal.geometry.tensorio import (
    load_document,
    load_form,
    load_metric,
    load_samples,
    load_tractor,
    parse_document,
    parse_samples,
    render_form,
    render_metric,
    render_samples,
    render_tensor,
    render_tractor,
)
from g2conformal.scalars.parser import parse_expr
from g2conformal.scalars.ratfn import COORDINATES

from .helpers import perturbed_metric, random_form

x1, x2, x3, x4, x5 = COORDINATES

FLAT_TEXT = """
# the flat metric
metric
  1 4 = 1
  2 5 = 1   # trailing comment
  3 3 = -1
end
"""

# (document, line reported in the error)
MALFORMED_DOCUMENTS = {
    "metric\n  1 1 = 1\nend\n": 1,
    "metric\n  4 1 = 1\nend\n": 2,
    "metric extra\nend\n": 1,
    "forms s 1\nend\n": 1,
    "form s 1\n  1 = x1\n": 1,
    "form s 1\n  1 = x1 +\nend\n": 2,
    "form s 1\n  6 = 1\nend\n": 2,
    "form s 1\n  1 2 = 1\nend\n": 2,
    "form s 2\n  2 1 = x1\nend\n": 2,
    "form s two\nend\n": 1,
    "form s 1 weight x\nend\n": 1,
    "tensor T dq\nend\n": 1,
    "tractor 3\nend\n": 1,
    "tractor 0\n  form mu 0\n  end\nend\n": 2,
    "tractor 1\n  form sigma 2\n  end\nend\n": 2,
    "\n\ntractor 0\n  tensor T d\n  end\nend\n": 4,
}


class TestParseDocument(TestCase):
    def test_metric(self):
        document = parse_document(FLAT_TEXT)
        self.assertEqual(document.metric.g, MetricField.flat().g)
        self.assertEqual(document.tensors, {})

    def test_metric_roundtrip(self):
        metric = perturbed_metric(5)
        self.assertEqual(parse_document(render_metric(metric)).metric.g, metric.g)

    def test_form(self):
        document = parse_document("form s 2 weight 3\n  1 2 = x3\n  2 5 = x1^2 - 1/2\nend\n")
        form = document.tensor()
        self.assertEqual(form.weight, 3)
        self.assertEqual(form[1, 0], -x3)
        self.assertEqual(form[4, 1], parse_expr("1/2 - x1^2"))
        self.assertTrue(form.is_antisymmetric())

    def test_render_form(self):
        form = random_form(9, 3, 2, polynomial_degree=2)
        self.assertEqual(parse_document(render_form("w", form)).tensor("w"), form)
        self.assertEqual(render_form("phi", nonnormal_form()), "form phi 2 weight 3\n  2 3 = x1\nend\n")

    def test_tensor(self):
        tensor = TensorField.from_entries("ud", {(0, 1): x2, (1, 0): x5 * x5}, -1)
        parsed = parse_document(render_tensor("T", tensor)).tensor("T")
        self.assertEqual(parsed, tensor)
        scalar = parse_document("tensor J - weight -2\n  = x1\nend\n").tensor()
        self.assertEqual(scalar, TensorField.scalar(x1, -2))

    def test_tractor(self):
        section = phi_slot_section()
        self.assertEqual(parse_document(render_tractor(section)).tractor(), section)

    def test_missing_tractor_slots_are_zero(self):
        section = parse_document("tractor 0\n  form rho 0 weight -1\n     = 1\n  end\nend\n").tractor()
        self.assertEqual(section.rho[()], 1)
        self.assertTrue(section.phi.is_zero)
        self.assertEqual(section.sigma.weight, 1)

    def test_tensor_lookup(self):
        document = parse_document("form a 1\nend\nform b 1\n  1 = 1\nend\n")
        self.assertTrue(document.tensor("a").is_zero)
        with self.assertRaisesRegex(InputFormatError, "exactly one tensor"):
            document.tensor()
        with self.assertRaisesRegex(InputFormatError, "no tensor named 'c'"):
            document.tensor("c")
        with self.assertRaisesRegex(InputFormatError, "exactly one tractor"):
            document.tractor()

    def test_errors_name_their_line(self):
        for text, line in MALFORMED_DOCUMENTS.items():
            with self.subTest(text=text):
                with self.assertRaisesRegex(InputFormatError, f"^input.txt:{line}: "):
                    parse_document(text, "input.txt")


class TestSamples(TestCase):
    def test_parse(self):
        points = parse_samples("0 0 0 0 0\n1/2, -1, 3, 0, 2/3\n")
        self.assertEqual(points[1], (Fraction(1, 2), -1, 3, 0, Fraction(2, 3)))
        self.assertEqual(parse_samples(render_samples(points)), points)

    def test_errors(self):
        with self.assertRaisesRegex(InputFormatError, "^s:2: .*got 4"):
            parse_samples("0 0 0 0 0\n1 2 3 4\n", "s")
        with self.assertRaisesRegex(InputFormatError, "rationals"):
            parse_samples("1/0 0 0 0 0\n")
        with self.assertRaisesRegex(InputFormatError, "no sample points"):
            parse_samples("# nothing\n")


class TestShippedAssets(TestCase):
    def test_flat_metric(self):
        self.assertEqual(load_metric(ASSET_DIR / "flat_metric.txt").g, MetricField.flat().g)

    def test_phi0_is_decomposable(self):
        phi0 = load_form(ASSET_DIR / "phi0.txt")
        self.assertEqual(phi0.weight, 3)
        self.assertTrue(phi0.wedge(phi0).is_zero)

    def test_parallel_threeform(self):
        section = load_tractor(ASSET_DIR / "parallel_threeform.txt")
        self.assertEqual(section.k, 2)
        self.assertEqual(section.sigma, load_form(ASSET_DIR / "phi0.txt"))

    def test_samples(self):
        self.assertEqual(load_samples(ASSET_DIR / "samples.txt"), [tuple(p) for p in DEFAULT_SAMPLE_POINTS])

    def test_missing_files(self):
        with self.assertRaises(InputFormatError):
            load_document(ASSET_DIR / "missing.txt")
        with self.assertRaises(InputFormatError):
            load_samples(ASSET_DIR / "missing.txt")
        with self.assertRaisesRegex(InputFormatError, "no metric block"):
            load_metric(ASSET_DIR / "phi0.txt")
