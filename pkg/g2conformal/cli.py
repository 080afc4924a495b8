"""
Command-line front end. Every command builds a SuiteReport, prints it in
the requested format and exits with 0 when all checks passed, 1 when a
check failed and 2 when the input could not be read.
"""
from __future__ import annotations

import argparse
import logging
import sys
from typing import Callable, Sequence

from dotenv import load_dotenv
from pydantic import ValidationError

from g2conformal.algebra.kostant import KostantComplex, normality_containment_check
from g2conformal.algebra.lie_g2 import (
    H,
    PHI,
    ThreeForm7,
    bilinear_from_threeform,
    double_insertion_multiple,
    g2_basis,
    g2_graded,
    in_g2,
    phi_annihilator,
    preserves_metric,
    so34_basis,
    so34_graded,
    span_rank,
    split_equivariance_holds,
)
from g2conformal.characterize import (
    check_theorem_A,
    distribution_from_ode,
    growth_vector,
    is_generic_growth,
    recover_distribution,
    symbol_algebra_check,
)
from g2conformal.constants import (
    DEFAULT_SAMPLE_POINTS,
    EXIT_CHECK_FAILURE,
    EXIT_INPUT_ERROR,
    EXIT_PASS,
    OUTPUT_FORMATS,
    WEYL_DIVERGENCE_FACTOR,
)
from g2conformal.defaults import RunConfig, SuiteReport, environment_defaults
from g2conformal.exceptions import (
    AssetCheckError,
    CalibrationError,
    DegenerateMetricError,
    DivisionByZeroError,
    ExpressionSyntaxError,
    InputFormatError,
    RankDeviationError,
)
from g2conformal.flat_model import ASSET_DIR, check_assets, write_assets
from g2conformal.geometry.curvature import Curvature
from g2conformal.geometry.metric import MetricField
from g2conformal.geometry.tensorio import load_form, load_metric, load_samples
from g2conformal.killing import (
    calibrate_constant,
    convention_check,
    decompose_killing,
    einstein_kernel,
    is_almost_einstein,
    is_conformal_killing,
    killing_from_scale,
    solve_polynomial_solutions,
    span_rank as field_span_rank,
    symmetry_residual,
    vector_field_of,
)
from g2conformal.scalars.algscalar import AlgScalar

logger = logging.getLogger(__name__)

G2_GRADED_DIMENSIONS = (2, 1, 2, 4, 2, 1, 2)
CONFORMAL_GRADED_DIMENSIONS = (5, 11, 5)

INPUT_ERRORS = (
    InputFormatError,
    ExpressionSyntaxError,
    DegenerateMetricError,
    ValidationError,
)


# --- verify-algebra --------------------------------------------------------


def _lie_g2_suite(threeform: ThreeForm7) -> SuiteReport:
    report = SuiteReport(title="lie_g2")
    basis = g2_basis()
    dimension = span_rank(basis)
    report.add_check("g2_dimension", dimension == 14, f"dim g2 = {dimension}")
    report.add_check("g2_preserves_h", all(preserves_metric(element) for element in basis))
    report.add_check("g2_annihilates_phi", all(threeform.annihilated_by(element) for element in basis))
    annihilator = phi_annihilator()
    report.add_check(
        "annihilator_is_g2",
        len(annihilator) == 14 and all(in_g2(element) for element in annihilator),
        f"dim ann(Phi) = {len(annihilator)}",
    )
    graded = g2_graded()
    report.add_check("g2_grading", graded.dimensions == G2_GRADED_DIMENSIONS, f"dims {graded.dimensions}")
    report.add_check("g2_bracket_graded", graded.bracket_respects_grading())
    conformal = so34_graded()
    report.add_check(
        "so34_grading",
        conformal.dimensions == CONFORMAL_GRADED_DIMENSIONS,
        f"dims {conformal.dimensions}",
    )

    pairing = bilinear_from_threeform(threeform)
    inverse_sqrt6 = AlgScalar(1) / AlgScalar.sqrt6()
    report.add_check(
        "pairing_is_h_over_sqrt6",
        pairing.form is not None and pairing.form == H.scale(inverse_sqrt6),
        "degenerate pairing" if pairing.degenerate else "",
    )
    try:
        multiple = double_insertion_multiple()
    except RuntimeError as error:
        report.add_check("double_insertion", False, str(error))
        multiple = None
    else:
        report.add_check("double_insertion", True)
    generators = basis
    elements = so34_basis()
    report.add_check(
        "split_equivariance",
        all(split_equivariance_holds(generator, element) for generator in generators for element in elements),
    )

    report.add_value("dim_g2", dimension)
    report.add_value("g2_graded_dimensions", " ".join(str(d) for d in graded.dimensions))
    report.add_value("pairing_determinant", pairing.determinant)
    report.add_value("double_insertion_multiple", "none" if multiple is None else multiple)
    return report


def _kostant_suite() -> SuiteReport:
    report = SuiteReport(title="kostant")
    complex_ = KostantComplex.for_space("g2")
    for degree in (0, 1):
        squares = (
            complex_.differential(complex_.differential(complex_.basis_cochain(degree, key)))
            for key in complex_.keys(degree)
        )
        report.add_check(f"d_squared_zero.{degree}", all(square.is_zero for square in squares))
    for degree in (3, 2):
        squares = (
            complex_.codifferential(complex_.codifferential(complex_.basis_cochain(degree, key)))
            for key in complex_.keys(degree)
        )
        report.add_check(f"codiff_squared_zero.{degree}", all(square.is_zero for square in squares))
    for degree in range(3):
        dimensions = complex_.hodge_dimensions(degree)
        report.add_check(f"hodge_balanced.{degree}", dimensions.balanced)
        report.add_value(f"harmonic_dimension.{degree}", dimensions.harmonic)
    harmonic = complex_.hodge_dimensions(2).harmonic
    report.add_check("harmonic_dimension_2", harmonic == 5, f"dim ker Laplacian = {harmonic}")
    report.add_check("harmonic_g0_invariant", complex_.harmonic_is_submodule(2))
    for degree in (0, 1):
        scale = complex_.adjointness_scale(degree)
        report.add_check(f"adjointness.{degree}", scale is not None and bool(scale))
        report.add_value(f"adjointness_scale.{degree}", "none" if scale is None else scale)
    containment = normality_containment_check()
    report.add_check(
        "normality_containment",
        containment.passed,
        f"harmonic rank {containment.harmonic_rank} of {containment.harmonic_dimension}",
    )
    return report


def cmd_verify_algebra(config: RunConfig, *, threeform: ThreeForm7 = PHI) -> SuiteReport:
    report = SuiteReport(title="verify-algebra")
    report.extend(_lie_g2_suite(threeform), "lie_g2.")
    if not config.skip_homology:
        report.extend(_kostant_suite(), "kostant.")
    return report


# --- check-metric ----------------------------------------------------------


def _nonzero_count(tensor) -> int:
    return len(tensor.nonzero_items())


def cmd_check_metric(config: RunConfig) -> SuiteReport:
    metric = load_metric(_required(config.metric_path, "metric"))
    report = SuiteReport(title="check-metric")
    for index, point in enumerate(config.samples):
        try:
            value = metric.det.evaluate(point)
        except DivisionByZeroError:
            value = None
        report.add_check(f"nondegenerate.{index}", bool(value), "" if value else "det g vanishes or is undefined")

    curvature: Curvature = metric.curvature
    first, second = curvature.skew_residuals()
    report.add_check("riemann_skew", first.is_zero and second.is_zero)
    report.add_check("bianchi", curvature.bianchi_residual().is_zero)
    report.add_check("weyl_trace_free", all(trace.is_zero for trace in curvature.weyl_traces()))
    factor = WEYL_DIVERGENCE_FACTOR
    report.add_check(
        "weyl_divergence",
        all(
            left == right * factor for left, right in zip(curvature.weyl_divergence().comps, curvature.cotton.comps)
        ),
        f"D^p C_pabc = {factor} A_abc",
    )

    report.add_value("flat", "yes" if curvature.is_flat else "no")
    report.add_value("J", curvature.J)
    report.add_value("schouten_nonzero", _nonzero_count(curvature.schouten))
    report.add_value("weyl_nonzero", _nonzero_count(curvature.weyl))
    report.add_value("cotton_nonzero", _nonzero_count(curvature.cotton))
    for position, value in curvature.schouten.nonzero_items():
        if position[0] > position[1]:
            continue
        report.add_value(f"P.{''.join(str(i + 1) for i in position)}", value)
    return report


# --- characterize ----------------------------------------------------------


def _required(path, what: str):
    if path is None:
        raise InputFormatError(f"a {what} file is required")
    return path


def _growth_values(report: SuiteReport, frame, points) -> bool:
    vectors = growth_vector(frame, points)
    for index, vector in enumerate(vectors):
        report.add_value(f"growth.{index}", " ".join(str(n) for n in vector))
    return all(is_generic_growth(vector) for vector in vectors)


def cmd_characterize(config: RunConfig) -> SuiteReport:
    metric = load_metric(_required(config.metric_path, "metric"))
    phi = load_form(_required(config.form_path, "2-form"))
    characterization = check_theorem_A(phi, metric, config.samples)
    report = characterization.to_suite("characterize")
    if not characterization.verdict:
        return report
    try:
        frame = recover_distribution(phi, metric, config.samples)
    except RankDeviationError as error:
        report.add_check("distribution", False, str(error))
        return report
    report.add_check("distribution", frame.has_rational_frame, "" if frame.has_rational_frame else "no rational frame")
    if frame.has_rational_frame:
        report.add_check("growth_2_3_5", _growth_values(report, frame.distribution, config.samples))
    return report


# --- decompose -------------------------------------------------------------


def _flat_inputs(config: RunConfig) -> tuple[MetricField, object]:
    metric_path = config.metric_path or ASSET_DIR / "flat_metric.txt"
    form_path = config.form_path or ASSET_DIR / "phi0.txt"
    return load_metric(metric_path), load_form(form_path)


def _render_form_values(report: SuiteReport, prefix: str, tensor) -> None:
    for position, value in tensor.nonzero_items():
        report.add_value(f"{prefix}.{''.join(str(i + 1) for i in position)}", value)


def cmd_decompose(config: RunConfig) -> SuiteReport:
    if config.field_path is None and not config.flat_basis:
        raise InputFormatError("decompose needs a field file or --flat-basis")
    metric, phi = _flat_inputs(config)
    if not metric.is_constant:
        raise InputFormatError("decompose solves for scales and fields on constant-coefficient metrics only")
    report = SuiteReport(title="decompose")
    characterization = check_theorem_A(phi, metric, config.samples)
    report.add_check("theorem_a", characterization.verdict)
    if not characterization.verdict:
        return report

    scales = solve_polynomial_solutions("aEs", metric, config.degree)
    report.add_value("dim_scales", scales.dimension)
    try:
        constant = calibrate_constant(phi, metric, scales.basis)
    except CalibrationError as error:
        report.add_check("calibration", False, str(error))
        return report
    report.add_check("calibration", True)
    report.add_value("c", constant)
    for reading, result in convention_check(phi, metric, scales.basis).items():
        report.add_value(f"reading.{reading}", "consistent" if result.passed else "inconsistent")

    frame = recover_distribution(phi, metric, config.samples)
    if not frame.has_rational_frame:
        report.add_check("distribution", False, "no rational frame")
        return report

    if config.flat_basis:
        killing = solve_polynomial_solutions("cKf", metric, config.degree)
        symmetries = einstein_kernel(killing.basis, phi, metric)
        images = [killing_from_scale(sigma, phi, metric) for sigma in scales]
        report.add_value("dim_killing", killing.dimension)
        report.add_value("dim_symmetries", len(symmetries))
        report.add_value("dim_scale_image", field_span_rank(images))
        report.add_check(
            "split",
            field_span_rank(list(symmetries) + images) == killing.dimension
            and len(symmetries) + field_span_rank(images) == killing.dimension,
            f"{killing.dimension} = {len(symmetries)} + {field_span_rank(images)}",
        )
        report.add_check(
            "symmetries_preserve_distribution",
            all(symmetry_residual(vector_field_of(xi, metric), frame, config.samples).passed for xi in symmetries),
        )

    if config.field_path is not None:
        xi = load_form(config.field_path)
        killing_field = is_conformal_killing(xi, metric)
        report.add_check("field.conformal_killing", killing_field, "" if killing_field else "not a conformal Killing field")
        if killing_field:
            result = decompose_killing(xi, phi, metric, constant)
            residual = symmetry_residual(vector_field_of(result.symmetry, metric), frame, config.samples)
            report.add_check("field.symmetry", residual.passed)
            report.add_value("field.symmetry_identically", "yes" if residual.exact else "no")
            report.add_check("field.scale", is_almost_einstein(result.scale, metric))
            _render_form_values(report, "field.symmetry", result.symmetry)
            report.add_value("field.scale", result.scale[()])
    return report


# --- distribution ----------------------------------------------------------


def cmd_distribution(config: RunConfig) -> SuiteReport:
    if not config.ode:
        raise InputFormatError("distribution needs --ode F")
    report = SuiteReport(title="distribution")
    try:
        frame = distribution_from_ode(config.ode, config.samples)
        report.add_value("F", frame.distribution[1][4])
        report.add_check("growth_2_3_5", _growth_values(report, frame.distribution, config.samples))
        for index, point in enumerate(config.samples):
            symbol = symbol_algebra_check(frame.distribution, point)
            report.add_check(f"symbol_algebra.{index}", symbol.passed, f"ranks {symbol.first_rank}, {symbol.second_rank}")
    except DivisionByZeroError as error:
        raise InputFormatError(f"F is undefined at a sample point: {error}") from error
    return report


# --- assets ----------------------------------------------------------------


def cmd_assets(config: RunConfig, *, write: bool = False) -> SuiteReport:
    report = SuiteReport(title="assets")
    if write:
        for path in write_assets(ASSET_DIR):
            report.add_value(f"wrote.{path.name}", path)
        return report
    try:
        checked = check_assets(ASSET_DIR)
    except AssetCheckError as error:
        report.add_check("assets", False, str(error))
    else:
        report.add_check("assets", True, ", ".join(checked))
    return report


COMMANDS: dict[str, Callable[..., SuiteReport]] = {
    "verify-algebra": cmd_verify_algebra,
    "check-metric": cmd_check_metric,
    "characterize": cmd_characterize,
    "decompose": cmd_decompose,
    "distribution": cmd_distribution,
    "assets": cmd_assets,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--samples", help="file of sample points, one per line")
    common.add_argument("--degree", type=int, help="degree bound of polynomial ansatz solves")
    common.add_argument("--format", dest="output_format", choices=OUTPUT_FORMATS)
    common.add_argument("--log-level", dest="log_level")

    parser = argparse.ArgumentParser(
        prog="g2conformal", description="Exact checks of conformal structures carrying a generic 2-plane distribution."
    )
    commands = parser.add_subparsers(dest="command", required=True)

    verify = commands.add_parser("verify-algebra", parents=[common], help="g2 and Kostant homology checks")
    verify.add_argument("--skip-homology", action="store_true")

    check = commands.add_parser("check-metric", parents=[common], help="curvature identities of a metric")
    check.add_argument("metric")

    characterize = commands.add_parser("characterize", parents=[common], help="test a conformal Killing 2-form")
    characterize.add_argument("metric")
    characterize.add_argument("form")

    decompose = commands.add_parser("decompose", parents=[common], help="split conformal Killing fields")
    decompose.add_argument("--metric", help="metric file (default: the shipped flat model)")
    decompose.add_argument("--form", help="2-form file (default: the shipped flat model)")
    decompose.add_argument("--field", help="file with one conformal Killing field as a 1-form")
    decompose.add_argument("--flat-basis", action="store_true")

    distribution = commands.add_parser("distribution", parents=[common], help="distribution of z' = F(x, y, p, q, z)")
    distribution.add_argument("--ode", required=True, help="the function F")

    assets = commands.add_parser("assets", parents=[common], help="check or regenerate the shipped flat model")
    assets.add_argument("--write", action="store_true")
    return parser


def build_config(arguments: argparse.Namespace, environ: dict[str, str] | None = None) -> RunConfig:
    """Flags override the environment, which overrides the built-in defaults."""
    values = environment_defaults(environ)
    environment_samples = values.pop("samples_path", None)
    samples_path = arguments.samples or environment_samples
    values["samples"] = load_samples(samples_path) if samples_path else list(DEFAULT_SAMPLE_POINTS)
    for name in ("degree", "output_format", "log_level"):
        if getattr(arguments, name, None) is not None:
            values[name] = getattr(arguments, name)
    return RunConfig(
        command=arguments.command,
        metric_path=getattr(arguments, "metric", None),
        form_path=getattr(arguments, "form", None),
        field_path=getattr(arguments, "field", None),
        skip_homology=getattr(arguments, "skip_homology", False),
        flat_basis=getattr(arguments, "flat_basis", False),
        ode=getattr(arguments, "ode", None),
        **values,
    )


def _configure_logging(level: str) -> None:
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(levelname)s %(name)s: %(message)s"))
    root = logging.getLogger("g2conformal")
    root.handlers[:] = [handler]
    root.setLevel(level)


def run(config: RunConfig, **options) -> SuiteReport:
    logger.info("running %s on %d sample points", config.command, len(config.samples))
    return COMMANDS[config.command](config, **options)


def main(argv: Sequence[str] | None = None) -> int:
    load_dotenv()
    arguments = build_parser().parse_args(argv)
    try:
        config = build_config(arguments)
        _configure_logging(config.log_level)
        options = {"write": arguments.write} if config.command == "assets" else {}
        report = run(config, **options)
    except INPUT_ERRORS as error:
        print(f"g2conformal: error: {error}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    sys.stdout.write(report.render(config.output_format))
    return EXIT_PASS if report.passed else EXIT_CHECK_FAILURE
