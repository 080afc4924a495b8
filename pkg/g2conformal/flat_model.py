"""
The flat model: the parallel tractor 3-form through Phi on the flat metric
of signature (2, 3), its projecting 2-form phi0, the recovered
distribution, the flat solution spaces and the measured constants, plus
the shipped asset files built from them.
"""
from __future__ import annotations

import logging
from pathlib import Path
from typing import Sequence

from g2conformal.algebra.kostant import KostantComplex
from g2conformal.algebra.lie_g2 import PHI, bilinear_from_threeform, double_insertion_multiple
from g2conformal.characterize import (
    CharacterizationReport,
    DistributionFrame,
    check_theorem_A,
    growth_vector,
    is_generic_growth,
    recover_distribution,
)
from g2conformal.constants import DEFAULT_SAMPLE_POINTS, DIMENSION, GOLDEN_KEYS
from g2conformal.exceptions import AssetCheckError, InputFormatError
from g2conformal.geometry.metric import MetricField
from g2conformal.geometry.tensor import TensorField
from g2conformal.geometry.tensorio import (
    load_document,
    parse_document,
    parse_samples,
    render_form,
    render_metric,
    render_samples,
    render_tractor,
)
from g2conformal.geometry.tractor import (
    TractorSection,
    flat_metric,
    flat_parallel_solve,
    form_from_components,
    reproduces_parallel,
)
from g2conformal.killing import SolutionSpaceBasis, calibrate_constant, solve_polynomial_solutions
from g2conformal.scalars.algscalar import AlgScalar
from g2conformal.scalars.ratfn import COORDINATES
from g2conformal.utility import enforce_required_kwargs

logger = logging.getLogger(__name__)

ASSET_DIR = Path(__file__).resolve().parent / "assets"

# Metric used to measure the Weyl divergence factor: a quadratic
# perturbation of the flat metric with nonvanishing Cotton tensor.
CURVED_METRIC_ENTRIES = {
    (0, 3): "1",
    (1, 4): "1",
    (2, 2): "-1",
    (0, 0): "x2^2 + x3^2",
    (1, 1): "x1*x3",
}

ASSET_SOURCES = {
    "flat_metric.txt": "MetricField.flat",
    "phi0.txt": "flat_parallel_solve(2, phi_slot_section()).sigma",
    "parallel_threeform.txt": "flat_parallel_solve(2, phi_slot_section())",
    "nonnormal_form.txt": "nonnormal_form",
    "samples.txt": "DEFAULT_SAMPLE_POINTS",
    "golden.txt": "measure_golden",
}


def phi_slot_section() -> TractorSection:
    """
    Value of Phi at the origin split into slots, with e1 on the tau_+ line,
    e7 on tau_- and e2..e6 tangent:
    sigma_ab = Phi(e7, ., .), rho_ab = Phi(e1, ., .), mu_a = -Phi(e1, e7, .),
    phi_abc = Phi restricted to the tangent directions.
    """
    first, last = 0, 6
    tangent = range(1, 6)
    sigma = {
        (a - 1, b - 1): PHI[last, a, b] for a in tangent for b in tangent if a < b and PHI[last, a, b]
    }
    rho = {(a - 1, b - 1): PHI[first, a, b] for a in tangent for b in tangent if a < b and PHI[first, a, b]}
    mu = {(a - 1,): -PHI[first, last, a] for a in tangent if PHI[first, last, a]}
    phi = {
        (a - 1, b - 1, c - 1): PHI[a, b, c]
        for a in tangent
        for b in tangent
        for c in tangent
        if a < b < c and PHI[a, b, c]
    }
    return TractorSection(
        k=2,
        rho=form_from_components(2, rho, 1),
        phi=form_from_components(3, phi, 3),
        mu=form_from_components(1, mu, 1),
        sigma=form_from_components(2, sigma, 3),
    )


def nonnormal_form() -> TensorField:
    """x1 dx2^dx3, decomposable but not normal on the flat metric."""
    return form_from_components(2, {(1, 2): COORDINATES[0]}, 3)


class FlatModelBundle:
    def __init__(
        self,
        *,
        metric: MetricField = None,
        parallel: TractorSection = None,
        report: CharacterizationReport = None,
        frame: DistributionFrame = None,
        scales: SolutionSpaceBasis = None,
        killing: SolutionSpaceBasis = None,
        constant: AlgScalar = None,
        points: Sequence = None,
    ) -> None:
        required_kwargs = ["metric", "parallel", "report", "frame", "scales", "killing", "constant", "points"]
        enforce_required_kwargs(locals(), required_kwargs)

        self.metric = metric
        self.parallel = parallel
        self.report = report
        self.frame = frame
        self.scales = scales
        self.killing = killing
        self.constant = constant
        self.points = [tuple(point) for point in points]
        self.manifest = dict(ASSET_SOURCES)

    @property
    def phi0(self) -> TensorField:
        return self.parallel.sigma


def build_flat_model(points: Sequence = DEFAULT_SAMPLE_POINTS) -> FlatModelBundle:
    metric = flat_metric()
    parallel = flat_parallel_solve(2, phi_slot_section())
    if not reproduces_parallel(parallel, metric):
        raise AssetCheckError("split_L0 of phi0 does not reproduce the parallel 3-form")
    phi0 = parallel.sigma

    report = check_theorem_A(phi0, metric, points)
    if not report.verdict:
        raise AssetCheckError("phi0 fails the characterization")

    frame = recover_distribution(phi0, metric, points)
    if not frame.has_rational_frame:
        raise AssetCheckError("no rational frame of the distribution of phi0")
    growth = growth_vector(frame.distribution, points)
    if not all(is_generic_growth(vector) for vector in growth):
        raise AssetCheckError(f"growth vectors {growth} are not all (2, 3, 5)")

    scales = solve_polynomial_solutions("aEs", metric, 2)
    killing = solve_polynomial_solutions("cKf", metric, 2)
    constant = calibrate_constant(phi0, metric, scales.basis)
    logger.debug(
        "flat model: %d scales, %d conformal Killing fields, c = %s",
        scales.dimension,
        killing.dimension,
        constant.render(),
    )
    return FlatModelBundle(
        metric=metric,
        parallel=parallel,
        report=report,
        frame=frame,
        scales=scales,
        killing=killing,
        constant=constant,
        points=points,
    )


def curved_metric() -> MetricField:
    return MetricField.from_expressions(CURVED_METRIC_ENTRIES)


def _render_value(value: object) -> str:
    if value is None:
        return "none"
    return value.render() if hasattr(value, "render") else str(value)


def measure_golden(bundle: FlatModelBundle | None = None) -> dict[str, str]:
    """Every frozen constant, recomputed."""
    bundle = build_flat_model() if bundle is None else bundle
    origin = (0,) * DIMENSION
    trace_part = bundle.report.trace_part.evaluate(origin) if bundle.report.trace_part is not None else None
    values = {
        "double_insertion_multiple": double_insertion_multiple(),
        "threeform_pairing_determinant": bilinear_from_threeform(PHI).determinant,
        "weyl_divergence_factor": curved_metric().curvature.weyl_divergence_factor(),
        "kostant_harmonic_dimension": KostantComplex.for_space("g2").hodge_dimensions(2).harmonic,
        "theorem_a_mu_factor": bundle.report.mu_factor,
        "theorem_a_rho_factor": bundle.report.rho_factor,
        "theorem_a_trace_part": trace_part,
        "killing_calibration_constant": bundle.constant,
    }
    return {key: _render_value(values[key]) for key in GOLDEN_KEYS}


def _render_pairs(pairs: dict[str, str]) -> str:
    return "".join(f"{key} = {value}\n" for key, value in pairs.items())


def render_assets(bundle: FlatModelBundle | None = None) -> dict[str, str]:
    bundle = build_flat_model() if bundle is None else bundle
    return {
        "flat_metric.txt": render_metric(bundle.metric),
        "phi0.txt": render_form("phi", bundle.phi0),
        "parallel_threeform.txt": render_tractor(bundle.parallel),
        "nonnormal_form.txt": render_form("phi", nonnormal_form()),
        "samples.txt": render_samples(bundle.points),
        "golden.txt": _render_pairs(measure_golden(bundle)),
        "manifest.txt": _render_pairs(bundle.manifest),
    }


def write_assets(directory: str | Path = ASSET_DIR, bundle: FlatModelBundle | None = None) -> list[Path]:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    written = []
    for name, text in render_assets(bundle).items():
        path = directory / name
        path.write_text(text)
        written.append(path)
    logger.info("wrote %d asset files to %s", len(written), directory)
    return written


def parse_pairs(text: str, source: str = "<string>") -> dict[str, str]:
    pairs = {}
    for number, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InputFormatError(f"{source}:{number}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        pairs[key] = value
    return pairs


def load_golden(directory: str | Path = ASSET_DIR) -> dict[str, str]:
    path = Path(directory) / "golden.txt"
    return parse_pairs(path.read_text(), str(path))


def check_assets(directory: str | Path = ASSET_DIR, bundle: FlatModelBundle | None = None) -> list[str]:
    """
    Compare the shipped assets with freshly computed ones: tensors by
    value, key/value files entry by entry. Returns the checked names and
    raises AssetCheckError on the first mismatch.
    """
    directory = Path(directory)
    fresh = render_assets(bundle)
    checked = []
    for name, text in fresh.items():
        path = directory / name
        if not path.exists():
            raise AssetCheckError(f"missing asset {path}")
        if name in ("golden.txt", "manifest.txt"):
            shipped = parse_pairs(path.read_text(), str(path))
            expected = parse_pairs(text)
            if shipped != expected:
                differing = sorted(key for key in set(shipped) | set(expected) if shipped.get(key) != expected.get(key))
                raise AssetCheckError(f"{name}: entries {differing} differ")
        elif name == "samples.txt":
            if parse_samples(path.read_text(), str(path)) != parse_samples(text):
                raise AssetCheckError(f"{name}: sample points differ")
        else:
            shipped = load_document(path)
            expected = parse_document(text, name)
            same = (
                (shipped.metric is None) == (expected.metric is None)
                and (shipped.metric is None or shipped.metric.g == expected.metric.g)
                and shipped.tensors == expected.tensors
                and shipped.tractors == expected.tractors
            )
            if not same:
                raise AssetCheckError(f"{name}: contents differ from the recomputed asset")
        checked.append(name)
    return checked
