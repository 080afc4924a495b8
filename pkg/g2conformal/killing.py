"""
Conformal Killing fields and almost Einstein scales of a conformal
structure carrying a normal, generic 2-form phi, and the splitting of a
conformal Killing field into a symmetry of the distribution plus the image
of an almost Einstein scale.

Conformal Killing fields are held as 1-forms xi_a of weight 2 (the kernel
of the first BGG operator for k = 1); almost Einstein scales as scalar
fields of weight 1.
"""
from __future__ import annotations

import logging
from typing import Sequence

from g2conformal.characterize import DistributionFrame, Point, VectorField, lie_bracket, evaluate_field
from g2conformal.exceptions import ArityError, CalibrationError, NotKillingError
from g2conformal.geometry.metric import MetricField
from g2conformal.geometry.tensor import COVARIANT, TensorField
from g2conformal.geometry.tractor import bgg_theta0
from g2conformal.linalg import SpanSolver, dense_to_sparse, nullspace, rank
from g2conformal.scalars.algscalar import AlgScalar
from g2conformal.scalars.poly import PolyQ, monomials_up_to
from g2conformal.scalars.ratfn import RatFn
from g2conformal.utility import enforce_required_kwargs

logger = logging.getLogger(__name__)

KINDS = ("cKf", "aEs")

# Sign of the divergence term in both maps. "corrected" is the reading
# under which the maps land in the right kernels with the tractor
# connection used here; "printed" flips it.
READINGS = {"corrected": 1, "printed": -1}


def as_scale(value: TensorField | RatFn | AlgScalar | int) -> TensorField:
    if isinstance(value, TensorField):
        if value.rank:
            raise ArityError(f"A scale is a scalar field, got variance '{value.variance}'")
        return value.retag(1)
    return TensorField.scalar(value, 1)


def _as_killing_form(xi: TensorField) -> TensorField:
    if xi.variance != COVARIANT:
        raise ArityError(f"Conformal Killing fields are passed as 1-forms, got variance '{xi.variance}'")
    return xi.retag(2)


def _divergence(phi: TensorField, metric: MetricField) -> TensorField:
    # D^p phi_pa
    return metric.trace(metric.derivative(phi), 0, 1)


def einstein_part(xi: TensorField, phi: TensorField, metric: MetricField, *, reading: str = "corrected") -> TensorField:
    """phi_pq (D xi)^pq + 1/2 xi^p D^q phi_pq (the divergence sign flips for the printed reading)."""
    xi = _as_killing_form(xi)
    phi = phi.retag(3)
    raised = metric.raise_index(metric.raise_index(metric.derivative(xi), 0), 1)
    first = phi.tensor(raised).contract(0, 2).contract(0, 1)
    # xi^p D^q phi_qp = -xi^p D^q phi_pq
    second = metric.raise_index(xi, 0).tensor(_divergence(phi, metric)).contract(0, 1)
    return first - second.scale(RatFn.coerce(READINGS[reading]) / 2)


def killing_from_scale(sigma: TensorField | RatFn, phi: TensorField, metric: MetricField, *, reading: str = "corrected") -> TensorField:
    """phi_ap D^p sigma + 1/4 sigma D^p phi_pa (the divergence sign flips for the printed reading)."""
    sigma = as_scale(sigma)
    phi = phi.retag(3)
    first = metric.trace(phi.tensor(metric.derivative(sigma)), 1, 2)
    second = _divergence(phi, metric).tensor(sigma)
    return first + second.scale(RatFn.coerce(READINGS[reading]) / 4)


def is_conformal_killing(xi: TensorField, metric: MetricField) -> bool:
    return bgg_theta0(1, _as_killing_form(xi), metric).is_zero


def is_almost_einstein(sigma: TensorField | RatFn, metric: MetricField) -> bool:
    return bgg_theta0(0, as_scale(sigma), metric).is_zero


def vector_field_of(xi: TensorField, metric: MetricField) -> VectorField:
    """xi^a = g^ab xi_b as a list of components."""
    return list(metric.raise_index(_as_killing_form(xi), 0).comps)


class SolutionSpaceBasis:
    def __init__(self, *, kind: str = None, basis: list[TensorField] = None, degree: int = None) -> None:
        required_kwargs = ["kind", "basis", "degree"]
        enforce_required_kwargs(locals(), required_kwargs)

        if kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got '{kind}'")
        self.kind = kind
        self.basis = basis
        self.degree = degree

    @property
    def dimension(self) -> int:
        return len(self.basis)

    def __len__(self) -> int:
        return len(self.basis)

    def __iter__(self):
        return iter(self.basis)


def _coefficient_rows(images: Sequence[TensorField]) -> list[dict[int, AlgScalar]]:
    """Rows of the linear system sum_j c_j images[j] = 0, one per (component, monomial)."""
    rows: dict[tuple[int, tuple[int, ...]], dict[int, AlgScalar]] = {}
    for column, image in enumerate(images):
        for position, value in enumerate(image.comps):
            if not value:
                continue
            if not value.is_polynomial:
                raise ArityError("Polynomial ansatz produced a non-polynomial residual")
            for exponent, coefficient in value.num.terms.items():
                rows.setdefault((position, exponent), {})[column] = coefficient
    return list(rows.values())


def _combine(columns: Sequence[TensorField], vector: dict[int, AlgScalar]) -> TensorField:
    total = None
    for column, coefficient in sorted(vector.items()):
        term = columns[column].scale(coefficient)
        total = term if total is None else total + term
    return total


def _ansatz(kind: str, degree: int) -> list[TensorField]:
    monomials = monomials_up_to(degree)
    if kind == "aEs":
        return [TensorField.scalar(RatFn.coerce(PolyQ.monomial(exponent)), 1) for exponent in monomials]
    columns = []
    for a in range(5):
        for exponent in monomials:
            entries = {(a,): RatFn.coerce(PolyQ.monomial(exponent))}
            columns.append(TensorField.from_entries(COVARIANT, entries, 2))
    return columns


def solve_polynomial_solutions(kind: str, metric: MetricField, degree: int) -> SolutionSpaceBasis:
    """Kernel of the first BGG operator (k = 0 for aEs, k = 1 for cKf) over polynomials of degree <= 'degree'."""
    if kind not in KINDS:
        raise ValueError(f"kind must be one of {KINDS}, got '{kind}'")
    if not metric.is_constant:
        raise ValueError("The polynomial ansatz needs a constant-coefficient metric")
    columns = _ansatz(kind, degree)
    k = 0 if kind == "aEs" else 1
    images = [bgg_theta0(k, column, metric) for column in columns]
    kernel = nullspace(_coefficient_rows(images), len(columns))
    logger.debug("%s ansatz degree %d: %d unknowns, nullity %d", kind, degree, len(columns), len(kernel))
    return SolutionSpaceBasis(kind=kind, basis=[_combine(columns, vector) for vector in kernel], degree=degree)


def calibrate_constant(
    phi: TensorField, metric: MetricField, scales: Sequence[TensorField], *, reading: str = "corrected"
) -> AlgScalar:
    """
    The constant c with einstein_part(killing_from_scale(sigma)) = c sigma,
    checked on every given scale.
    """
    constant = None
    for sigma in scales:
        sigma = as_scale(sigma)
        image = einstein_part(killing_from_scale(sigma, phi, metric, reading=reading), phi, metric, reading=reading)
        ratio = image[()] / sigma[()]
        if not ratio.is_constant:
            raise CalibrationError(f"einstein_part o killing_from_scale is not a constant multiple on {sigma[()].render()}")
        ratio = ratio.constant_value()
        if constant is None:
            constant = ratio
        elif ratio != constant:
            raise CalibrationError(f"ratios {constant} and {ratio} differ between scales")
    if constant is None:
        raise CalibrationError("no scales to calibrate on")
    if not constant:
        raise CalibrationError("einstein_part o killing_from_scale vanishes")
    logger.info("calibration constant c = %s (%s reading)", constant.render(), reading)
    return constant


class DecompositionResult:
    def __init__(self, symmetry: TensorField, scale: TensorField) -> None:
        self.symmetry = symmetry
        self.scale = scale


def decompose_killing(
    xi: TensorField, phi: TensorField, metric: MetricField, constant: AlgScalar | None
) -> DecompositionResult:
    """xi = xi_sym + killing_from_scale(sigma) with sigma = einstein_part(xi) / c."""
    if constant is None or not constant:
        raise CalibrationError("decompose_killing needs a calibrated nonzero constant")
    xi = _as_killing_form(xi)
    if not is_conformal_killing(xi, metric):
        raise NotKillingError("The field is not a conformal Killing field")
    sigma = einstein_part(xi, phi, metric).scale(AlgScalar(1) / constant)
    symmetry = xi - killing_from_scale(sigma, phi, metric)
    return DecompositionResult(symmetry, sigma)


def einstein_kernel(
    fields: Sequence[TensorField], phi: TensorField, metric: MetricField
) -> list[TensorField]:
    """Basis of the combinations of 'fields' on which einstein_part vanishes."""
    fields = [_as_killing_form(xi) for xi in fields]
    images = [einstein_part(xi, phi, metric) for xi in fields]
    kernel = nullspace(_coefficient_rows(images), len(fields))
    return [_combine(fields, vector) for vector in kernel]


def span_rank(fields: Sequence[TensorField]) -> int:
    """Rank over constants of a list of polynomial tensors."""
    rows = []
    for field in fields:
        row = {}
        for position, value in enumerate(field.comps):
            for exponent, coefficient in value.num.terms.items():
                row[(position, exponent)] = coefficient
        rows.append(row)
    keys = {key: index for index, key in enumerate(sorted({key for row in rows for key in row}))}
    return rank({keys[key]: value for key, value in row.items()} for row in rows)


class SymmetryReport:
    """
    Per sample point, whether [xi, eta] lies in D for every frame field eta;
    and whether it does so identically, with the coefficient functions
    [xi, eta] = a eta_1 + b eta_2 (None where there are none) that witness it.
    """

    def __init__(
        self,
        points: Sequence[Point],
        inside: list[bool],
        exact: bool,
        coefficients: list[list[RatFn] | None],
    ) -> None:
        self.points = [tuple(point) for point in points]
        self.inside = inside
        self.exact = exact
        self.coefficients = coefficients

    @property
    def passed(self) -> bool:
        return all(self.inside) and self.exact


def bracket_coefficients(bracket: VectorField, frame: Sequence[VectorField]) -> list[RatFn] | None:
    """Functions a_i with bracket = sum_i a_i frame[i] identically, or None when there are none."""
    solver = SpanSolver([dense_to_sparse(eta) for eta in frame], len(bracket))
    coordinates = solver.coordinates(dense_to_sparse(bracket))
    if coordinates is None:
        return None
    return [RatFn.coerce(value) for value in coordinates]


def symmetry_residual(xi: VectorField, frame: DistributionFrame, points: Sequence[Point]) -> SymmetryReport:
    if frame.distribution is None:
        raise ArityError("A symmetry test needs a rational frame of the distribution")
    brackets = [lie_bracket(xi, eta) for eta in frame.distribution]
    inside = []
    for point in points:
        base = [dense_to_sparse(evaluate_field(eta, point)) for eta in frame.distribution]
        expected = rank(base)
        augmented = base + [dense_to_sparse(evaluate_field(bracket, point)) for bracket in brackets]
        inside.append(rank(augmented) == expected)
    coefficients = [bracket_coefficients(bracket, frame.distribution) for bracket in brackets]
    exact = all(entry is not None for entry in coefficients)
    logger.debug("symmetry test: pointwise %s, identically %s", all(inside), exact)
    return SymmetryReport(points, inside, exact, coefficients)


class ConventionCheck:
    """For one reading of the two maps: do scales go to Killing fields, and is the composite a multiple of the identity."""

    def __init__(self, reading: str, lands_in_killing: bool, constant: AlgScalar | None) -> None:
        self.reading = reading
        self.lands_in_killing = lands_in_killing
        self.constant = constant

    @property
    def passed(self) -> bool:
        return self.lands_in_killing and self.constant is not None


def convention_check(phi: TensorField, metric: MetricField, scales: Sequence[TensorField]) -> dict[str, ConventionCheck]:
    results = {}
    for reading in READINGS:
        lands = all(
            is_conformal_killing(killing_from_scale(sigma, phi, metric, reading=reading), metric) for sigma in scales
        )
        try:
            constant = calibrate_constant(phi, metric, scales, reading=reading)
        except CalibrationError:
            constant = None
        results[reading] = ConventionCheck(reading, lands, constant)
    return results
