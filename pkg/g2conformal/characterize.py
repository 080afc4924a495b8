"""
Characterization of 2-forms that come from generic rank-2 distributions,
recovery of the distribution from such a form, and distributions of ODEs
z' = F(x, y, y', y'', z) in Monge normal form.

Vector fields are lists of five RatFn components in the coordinate frame.
"""
from __future__ import annotations

import logging
from fractions import Fraction
from itertools import combinations
from typing import Sequence

from g2conformal.constants import DIMENSION
from g2conformal.defaults import SuiteReport
from g2conformal.exceptions import ArityError, DivisionByZeroError, RankDeviationError
from g2conformal.geometry.metric import MetricField
from g2conformal.geometry.tensor import COVARIANT, TensorField, constant_ratio
from g2conformal.geometry.tractor import bgg_theta0, normality_residuals, split_L0, wedge_identities
from g2conformal.linalg import dense_to_sparse, nullspace, rank
from g2conformal.scalars.algscalar import AlgScalar
from g2conformal.scalars.parser import parse_expr
from g2conformal.scalars.ratfn import COORDINATES, RatFn
from g2conformal.utility import enforce_required_kwargs

logger = logging.getLogger(__name__)

N = DIMENSION
TOP = tuple(range(N))

VectorField = list[RatFn]
Point = Sequence[Fraction | AlgScalar | int]


def _check_two_form(phi: TensorField) -> TensorField:
    if phi.variance != COVARIANT * 2:
        raise ArityError(f"Expected a 2-form, got variance '{phi.variance}'")
    return phi.retag(3)


def mu_rho_of(phi: TensorField, metric: MetricField) -> tuple[TensorField, TensorField]:
    """
    mu = D^p phi_pa and
    rho = 2 Lap phi + 4 alt(D^p D_a phi_pb) + 3 alt(D_a D^p phi_pb)
          + 24 alt(P^p_a phi_pb) - 6 J phi,
    with Lap = -D^p D_p and DD phi indexed (first derivative, second
    derivative, form, form).
    """
    phi = _check_two_form(phi)
    d_phi = metric.derivative(phi)
    dd_phi = metric.derivative(d_phi)
    mu = metric.trace(d_phi, 0, 1)

    laplacian = -metric.trace(dd_phi, 0, 1)
    outer_trace = metric.trace(dd_phi, 0, 2).alt()
    inner_trace = metric.trace(dd_phi, 1, 2).alt()
    p_phi = metric.curvature.schouten.tensor(phi)
    schouten_trace = metric.trace(p_phi, 0, 2).alt()
    j_phi = metric.trace(p_phi, 0, 1)
    rho = (
        laplacian.scale(2)
        + outer_trace.scale(4)
        + inner_trace.scale(3)
        + schouten_trace.scale(24)
        - j_phi.scale(6)
    )
    return mu, rho


def _slot_factors(mu: TensorField, rho: TensorField, section) -> tuple[AlgScalar | None, AlgScalar | None]:
    mu_factor = constant_ratio(mu, section.mu) if not section.mu.is_zero else None
    rho_factor = constant_ratio(rho, section.rho) if not section.rho.is_zero else None
    return mu_factor, rho_factor


def proportionality_factors(phi: TensorField, metric: MetricField) -> tuple[AlgScalar | None, AlgScalar | None]:
    """Constants relating (mu, rho) above to the mu- and rho-slots of split_L0(2, phi)."""
    mu, rho = mu_rho_of(phi, metric)
    return _slot_factors(mu, rho, split_L0(2, _check_two_form(phi), metric))


def _evaluate_safely(value: RatFn, point: Point) -> AlgScalar | None:
    try:
        return value.evaluate(point)
    except DivisionByZeroError:
        return None


class CharacterizationReport:
    def __init__(
        self,
        *,
        witness: TensorField = None,
        theta0: TensorField = None,
        residuals: tuple[TensorField, TensorField, TensorField] = None,
        mu: TensorField = None,
        rho: TensorField = None,
        top_form: TensorField = None,
        points: Sequence[Point] = None,
        mu_factor: AlgScalar | None = None,
        rho_factor: AlgScalar | None = None,
        trace_part: RatFn | None = None,
    ) -> None:
        required_kwargs = ["witness", "theta0", "residuals", "mu", "rho", "top_form", "points"]
        enforce_required_kwargs(locals(), required_kwargs)

        self.witness = witness
        self.theta0 = theta0
        self.residuals = residuals
        self.mu = mu
        self.rho = rho
        self.top_form = top_form
        self.points = [tuple(point) for point in points]
        self.mu_factor = mu_factor
        self.rho_factor = rho_factor
        self.trace_part = trace_part
        self.top_coefficient = top_form[TOP]
        self.evaluations = [_evaluate_safely(self.top_coefficient, point) for point in self.points]

    @property
    def decomposable(self) -> bool:
        return self.witness.is_zero

    @property
    def normal(self) -> bool:
        return self.theta0.is_zero and all(residual.is_zero for residual in self.residuals)

    @property
    def generic(self) -> bool:
        return bool(self.top_coefficient)

    @property
    def vanishing_consistent(self) -> bool:
        """A true solution's top form vanishes at every tested point or at none."""
        defined = [value for value in self.evaluations if value is not None]
        return all(defined) or not any(defined)

    @property
    def verdict(self) -> bool:
        return self.decomposable and self.normal and self.generic

    def to_suite(self, title: str = "characterize") -> SuiteReport:
        report = SuiteReport(title=title)
        report.add_check(
            "decomposable",
            self.decomposable,
            "phi^phi = 0" if self.decomposable else f"{len(self.witness.nonzero_items())} nonzero components of phi^phi",
        )
        names = ("theta0", "rho_residual", "phi_residual", "mu_residual")
        tensors = (self.theta0,) + tuple(self.residuals)
        failing = [_excerpt(name, tensor) for name, tensor in zip(names, tensors) if not tensor.is_zero]
        report.add_check("normal", self.normal, "nonzero: " + "; ".join(failing) if failing else "")
        report.add_check("generic", self.generic, "phi^mu^rho = " + self.top_coefficient.render())
        report.add_check("vanishing_consistent", self.vanishing_consistent)
        report.add_value("verdict", "yes" if self.verdict else "no")
        report.add_value("top_form", self.top_coefficient)
        for index, (point, value) in enumerate(zip(self.points, self.evaluations)):
            report.add_value(f"top_form.at.{index}", "undefined" if value is None else value)
        report.add_value("mu_factor", "none" if self.mu_factor is None else self.mu_factor)
        report.add_value("rho_factor", "none" if self.rho_factor is None else self.rho_factor)
        if self.trace_part is not None:
            report.add_value("trace_part", self.trace_part)
        return report


def _excerpt(name: str, tensor: TensorField) -> str:
    """The name of a nonzero tensor with its first nonzero component."""
    index, value = tensor.nonzero_items()[0]
    return f"{name}{list(index)} = {value.render()}"


def check_theorem_A(phi: TensorField, metric: MetricField, points: Sequence[Point]) -> CharacterizationReport:
    phi = _check_two_form(phi)
    mu, rho = mu_rho_of(phi, metric)
    section = split_L0(2, phi, metric)
    mu_factor, rho_factor = _slot_factors(mu, rho, section)
    identities = wedge_identities(section)
    report = CharacterizationReport(
        witness=phi.wedge(phi),
        theta0=bgg_theta0(2, phi, metric),
        residuals=normality_residuals(section, metric),
        mu=mu,
        rho=rho,
        top_form=phi.wedge(mu).wedge(rho),
        points=points,
        mu_factor=mu_factor,
        rho_factor=rho_factor,
        trace_part=identities.top_coefficients()[1],
    )
    logger.info(
        "theorem A: decomposable=%s normal=%s generic=%s",
        report.decomposable,
        report.normal,
        report.generic,
    )
    return report


# --- vector fields and distributions ---------------------------------------


def coordinate_field(var: int) -> VectorField:
    """d/dx_var, 1-based."""
    return [RatFn.one() if i == var - 1 else RatFn.zero() for i in range(N)]


def lie_bracket(first: VectorField, second: VectorField) -> VectorField:
    """[X, Y]^i = X^j d_j Y^i - Y^j d_j X^i."""
    result = []
    for i in range(N):
        total = RatFn.zero()
        for j in range(N):
            if first[j] and second[i]:
                total = total + first[j] * second[i].diff(j + 1)
            if second[j] and first[i]:
                total = total - second[j] * first[i].diff(j + 1)
        result.append(total)
    return result


def evaluate_field(field: VectorField, point: Point) -> list[AlgScalar]:
    return [value.evaluate(point) if value else AlgScalar(0) for value in field]


def pointwise_rank(fields: Sequence[VectorField], point: Point) -> int:
    return rank(dense_to_sparse(evaluate_field(field, point)) for field in fields)


def _kernel(rows: Sequence[Sequence], width: int) -> list[list]:
    basis = nullspace([dense_to_sparse(row) for row in rows], width)
    return [[vector.get(i, 0) for i in range(width)] for vector in basis]


def _isotropic_part(kernel: list[list], g_rows: Sequence[Sequence]) -> list[list]:
    """Radical of g restricted to span(kernel), as vectors."""
    gram = [
        [
            sum((g_rows[a][b] * u[a] * v[b] for a in range(N) for b in range(N) if u[a] and v[b]), 0)
            for v in kernel
        ]
        for u in kernel
    ]
    coefficients = _kernel(gram, len(kernel))
    return [
        [sum((c * vector[i] for c, vector in zip(coeffs, kernel) if c), 0) for i in range(N)]
        for coeffs in coefficients
    ]


class DistributionFrame:
    """
    A rank-2 distribution D given by a frame, plus a frame of [D, D].
    'distribution' and 'derived' hold rational vector fields when a frame
    valid at every sample point exists; 'pointwise' holds, per sample
    point, bases of D and [D, D] at that point.
    """

    def __init__(
        self,
        *,
        points: Sequence[Point] = None,
        distribution: list[VectorField] | None = None,
        derived: list[VectorField] | None = None,
        pointwise: list[tuple[list, list]] = None,
    ) -> None:
        required_kwargs = ["points", "pointwise"]
        enforce_required_kwargs(locals(), required_kwargs)

        self.points = [tuple(point) for point in points]
        self.distribution = distribution
        self.derived = derived
        self.pointwise = pointwise

    @property
    def has_rational_frame(self) -> bool:
        return self.distribution is not None

    def frame_ranks(self) -> list[tuple[int, int]]:
        return [
            (
                rank(dense_to_sparse(v) for v in d_basis),
                rank(dense_to_sparse(v) for v in derived_basis),
            )
            for d_basis, derived_basis in self.pointwise
        ]


def _frame_valid_at(fields: Sequence[VectorField], points: Sequence[Point], expected: int) -> bool:
    try:
        return all(pointwise_rank(fields, point) == expected for point in points)
    except DivisionByZeroError:
        return False


def recover_distribution(phi: TensorField, metric: MetricField, points: Sequence[Point]) -> DistributionFrame:
    """D = isotropic part of ker phi, [D, D] = ker phi."""
    phi_rows = [[phi[a, b] for b in range(N)] for a in range(N)]
    pointwise = []
    for point in points:
        values = [[value.evaluate(point) for value in row] for row in phi_rows]
        kernel = _kernel(values, N)
        if len(kernel) != 3:
            raise RankDeviationError(f"ker phi has dimension {len(kernel)} at {tuple(point)}, expected 3")
        g_values = [[metric.g[a, b].evaluate(point) for b in range(N)] for a in range(N)]
        isotropic = _isotropic_part(kernel, g_values)
        if len(isotropic) != 2:
            raise RankDeviationError(
                f"the metric restricted to ker phi has a {len(isotropic)}-dimensional kernel at {tuple(point)}, expected 2"
            )
        pointwise.append((isotropic, kernel))

    distribution = derived = None
    kernel = _kernel(phi_rows, N)
    if len(kernel) == 3:
        isotropic = _isotropic_part(kernel, metric.matrix())
        kernel = [[RatFn.coerce(value) for value in field] for field in kernel]
        isotropic = [[RatFn.coerce(value) for value in field] for field in isotropic]
        if (
            len(isotropic) == 2
            and _frame_valid_at(kernel, points, 3)
            and _frame_valid_at(isotropic, points, 2)
        ):
            distribution, derived = isotropic, kernel
    logger.debug("recovered distribution: rational frame %s", "found" if distribution else "not found")
    return DistributionFrame(points=points, distribution=distribution, derived=derived, pointwise=pointwise)


def growth_vector(frame: Sequence[VectorField], points: Sequence[Point]) -> list[tuple[int, int, int]]:
    """
    Ranks of D, D + [D, D] and D + [D, D] + [D, [D, D]] at each point.
    Raises DivisionByZeroError where a frame denominator vanishes.
    """
    first = list(frame)
    brackets = [lie_bracket(x, y) for x, y in combinations(first, 2)]
    second = first + brackets
    third = second + [lie_bracket(x, y) for x in first for y in brackets]
    return [
        (pointwise_rank(first, point), pointwise_rank(second, point), pointwise_rank(third, point))
        for point in points
    ]


def is_generic_growth(vector: tuple[int, int, int]) -> bool:
    return tuple(vector) == (2, 3, 5)


def monge_frame(F: RatFn) -> list[VectorField]:
    """{d_q, d_x + p d_y + q d_p + F d_z} in coordinates (x, y, p, q, z) = (x1..x5)."""
    p, q = COORDINATES[2], COORDINATES[3]
    total = [RatFn.one(), p, q, RatFn.zero(), RatFn.coerce(F)]
    return [coordinate_field(4), total]


def distribution_from_ode(F: RatFn | str, points: Sequence[Point]) -> DistributionFrame:
    if isinstance(F, str):
        F = parse_expr(F, ode_aliases=True)
    frame = monge_frame(F)
    derived = frame + [lie_bracket(frame[0], frame[1])]
    pointwise = [
        ([evaluate_field(field, point) for field in frame], [evaluate_field(field, point) for field in derived])
        for point in points
    ]
    return DistributionFrame(points=points, distribution=frame, derived=derived, pointwise=pointwise)


class SymbolAlgebraReport:
    """Ranks of the bracket maps L^2 gr_-1 -> gr_-2 and gr_-1 x gr_-2 -> gr_-3 at a point."""

    def __init__(self, first_rank: int, second_rank: int) -> None:
        self.first_rank = first_rank
        self.second_rank = second_rank

    @property
    def first_isomorphism(self) -> bool:
        return self.first_rank == 1

    @property
    def second_isomorphism(self) -> bool:
        return self.second_rank == 2

    @property
    def passed(self) -> bool:
        return self.first_isomorphism and self.second_isomorphism


def symbol_algebra_check(frame: Sequence[VectorField], point: Point) -> SymbolAlgebraReport:
    if len(frame) != 2:
        raise ArityError(f"A rank-2 distribution needs a frame of 2 fields, got {len(frame)}")
    x1, x2 = frame
    x12 = lie_bracket(x1, x2)
    base = pointwise_rank(frame, point)
    with_bracket = pointwise_rank([x1, x2, x12], point)
    third = [lie_bracket(x1, x12), lie_bracket(x2, x12)]
    total = pointwise_rank([x1, x2, x12] + third, point)
    return SymbolAlgebraReport(with_bracket - base, total - with_bracket)
