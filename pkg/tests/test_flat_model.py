from pathlib import Path
from tempfile import TemporaryDirectory
from unittest import TestCase

from g2conformal.constants import GOLDEN_KEYS, WEYL_DIVERGENCE_FACTOR
from g2conformal.exceptions import AssetCheckError, InputFormatError
from g2conformal.flat_model import (
    ASSET_DIR,
    ASSET_SOURCES,
    FlatModelBundle,
    build_flat_model,
    check_assets,
    curved_metric,
    load_golden,
    measure_golden,
    parse_pairs,
    write_assets,
)
from g2conformal.geometry.tensorio import load_form

ASSET_NAMES = (
    "flat_metric.txt",
    "phi0.txt",
    "parallel_threeform.txt",
    "nonnormal_form.txt",
    "samples.txt",
    "golden.txt",
    "manifest.txt",
)


class TestFlatModel(TestCase):
    @classmethod
    def setUpClass(cls):
        cls.bundle = build_flat_model()

    def test_bundle(self):
        self.assertEqual(self.bundle.phi0, self.bundle.parallel.sigma)
        self.assertTrue(self.bundle.report.verdict)
        self.assertTrue(self.bundle.frame.has_rational_frame)
        self.assertEqual(self.bundle.scales.dimension, 7)
        self.assertEqual(self.bundle.killing.dimension, 21)
        self.assertEqual(self.bundle.constant, 1)
        self.assertEqual(self.bundle.manifest, ASSET_SOURCES)

    def test_bundle_needs_every_part(self):
        with self.assertRaises(ValueError):
            FlatModelBundle(metric=self.bundle.metric, parallel=self.bundle.parallel)

    def test_golden_constants(self):
        measured = measure_golden(self.bundle)
        self.assertEqual(tuple(measured), GOLDEN_KEYS)
        self.assertEqual(measured, load_golden())
        self.assertEqual(measured["threeform_pairing_determinant"], "1/1296*sqrt6")
        self.assertEqual(measured["theorem_a_trace_part"], "1/18*sqrt6")

    def test_weyl_divergence_factor(self):
        self.assertEqual(curved_metric().curvature.weyl_divergence_factor(), WEYL_DIVERGENCE_FACTOR)

    def test_shipped_assets(self):
        self.assertEqual(check_assets(ASSET_DIR, self.bundle), list(ASSET_NAMES))
        self.assertEqual(load_form(ASSET_DIR / "phi0.txt"), self.bundle.phi0)

    def test_written_assets(self):
        with TemporaryDirectory() as directory:
            written = write_assets(directory, self.bundle)
            self.assertEqual([path.name for path in written], list(ASSET_NAMES))
            self.assertEqual(check_assets(directory, self.bundle), list(ASSET_NAMES))

            golden = Path(directory) / "golden.txt"
            golden.write_text(golden.read_text().replace("theorem_a_rho_factor = 30", "theorem_a_rho_factor = 31"))
            with self.assertRaisesRegex(AssetCheckError, "theorem_a_rho_factor"):
                check_assets(directory, self.bundle)

    def test_reformatted_assets_still_match(self):
        with TemporaryDirectory() as directory:
            write_assets(directory, self.bundle)
            phi0 = Path(directory) / "phi0.txt"
            phi0.write_text("# recomputed\n" + phi0.read_text().replace("  ", "    "))
            self.assertIn("phi0.txt", check_assets(directory, self.bundle))

    def test_broken_assets(self):
        with TemporaryDirectory() as directory:
            write_assets(directory, self.bundle)
            (Path(directory) / "nonnormal_form.txt").write_text("form phi 2 weight 3\n  2 3 = x2\nend\n")
            with self.assertRaisesRegex(AssetCheckError, "nonnormal_form.txt"):
                check_assets(directory, self.bundle)
            (Path(directory) / "flat_metric.txt").unlink()
            with self.assertRaisesRegex(AssetCheckError, "missing asset"):
                check_assets(directory, self.bundle)


class TestParsePairs(TestCase):
    def test_pairs(self):
        self.assertEqual(parse_pairs("# header\na = 1\nb = 1/2*sqrt3  # note\n"), {"a": "1", "b": "1/2*sqrt3"})

    def test_malformed(self):
        with self.assertRaisesRegex(InputFormatError, "^golden:2: "):
            parse_pairs("a = 1\nb\n", "golden")
