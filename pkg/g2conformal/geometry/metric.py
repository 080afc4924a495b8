from __future__ import annotations

import logging
from functools import cached_property
from typing import Sequence

from g2conformal.constants import DEFAULT_SAMPLE_POINTS, DIMENSION, SIGNATURE
from g2conformal.exceptions import ArityError, DegenerateMetricError
from g2conformal.geometry.tensor import COVARIANT, CONTRAVARIANT, TensorField, offset_of, index_tuples
from g2conformal.linalg import inertia, rational_determinant_and_adjugate
from g2conformal.scalars.algscalar import AlgScalar
from g2conformal.scalars.parser import parse_expr
from g2conformal.scalars.ratfn import RatFn

logger = logging.getLogger(__name__)

# 2 dx1 dx4 + 2 dx2 dx5 - dx3^2
FLAT_METRIC_ENTRIES = {(0, 3): 1, (1, 4): 1, (2, 2): -1}


class MetricField:
    """
    A pseudo-Riemannian metric g_ab of signature (2, 3) on the chart,
    carrying weight 2 as the conformal metric trivialized in its own scale.
    """

    def __init__(self, *, g: TensorField, base_point: Sequence[AlgScalar | int] = None) -> None:
        if g.variance != COVARIANT * 2:
            raise ArityError(f"A metric has variance 'dd', not '{g.variance}'")
        if not g.is_symmetric():
            raise DegenerateMetricError("The metric is not symmetric")
        self.g = g.retag(2)
        self.base_point = tuple(base_point) if base_point is not None else DEFAULT_SAMPLE_POINTS[0]
        matrix = self.matrix()
        det, adjugate = rational_determinant_and_adjugate(matrix)
        if det.is_zero:
            raise DegenerateMetricError("det g vanishes identically")
        self.det = det
        self.g_inv = TensorField(
            variance=CONTRAVARIANT * 2,
            comps=[adjugate[i][j] / det if adjugate[i][j] else adjugate[i][j] for i, j in index_tuples(2)],
            weight=-2,
        )
        signature = inertia([[entry.evaluate(self.base_point) for entry in row] for row in matrix])
        if signature[2] or signature[:2] != SIGNATURE:
            raise DegenerateMetricError(
                f"Signature at {self.base_point} is {signature}, expected {SIGNATURE}"
            )

    @classmethod
    def from_matrix(cls, matrix: Sequence[Sequence[RatFn | AlgScalar | int]], **kwargs) -> MetricField:
        comps = [matrix[i][j] for i, j in index_tuples(2)]
        return cls(g=TensorField(variance="dd", comps=comps, weight=2), **kwargs)

    @classmethod
    def from_upper_entries(cls, entries: dict[tuple[int, int], RatFn | AlgScalar | int], **kwargs) -> MetricField:
        """Build from entries g_ij with i <= j, 0-based; missing entries are zero."""
        matrix = [[RatFn.zero()] * DIMENSION for _ in range(DIMENSION)]
        for (i, j), value in entries.items():
            if i > j:
                raise ArityError(f"Metric entry ({i}, {j}) must have i <= j")
            value = RatFn.coerce(value)
            matrix[i][j] = value
            matrix[j][i] = value
        return cls.from_matrix(matrix, **kwargs)

    @classmethod
    def from_expressions(cls, entries: dict[tuple[int, int], str], **kwargs) -> MetricField:
        return cls.from_upper_entries({key: parse_expr(text) for key, text in entries.items()}, **kwargs)

    @classmethod
    def flat(cls) -> MetricField:
        return cls.from_upper_entries(FLAT_METRIC_ENTRIES)

    def matrix(self) -> list[list[RatFn]]:
        return [[self.g[i, j] for j in range(DIMENSION)] for i in range(DIMENSION)]

    @cached_property
    def is_constant(self) -> bool:
        return all(value.is_constant for value in self.g.comps)

    @cached_property
    def christoffel(self) -> TensorField:
        """Gamma^c_ab, stored with indices (c, a, b)."""
        if self.is_constant:
            return TensorField.zeros("udd")
        dg = self.g.partial()  # (e, a, b) -> d_e g_ab
        lowered = {}
        for d, a, b in index_tuples(3):
            value = dg[a, b, d] + dg[b, a, d] - dg[d, a, b]
            if value:
                lowered[(d, a, b)] = value / 2
        comps = []
        for c, a, b in index_tuples(3):
            total = RatFn.zero()
            for d in range(DIMENSION):
                inverse = self.g_inv[c, d]
                value = lowered.get((d, a, b))
                if inverse and value:
                    total = total + inverse * value
            comps.append(total)
        logger.debug("christoffel symbols: %d nonzero", sum(1 for value in comps if value))
        return TensorField(variance="udd", comps=comps)

    @cached_property
    def gamma_tables(self) -> tuple[dict, dict]:
        """
        Lookup tables keyed by (d, e): pairs (i, Gamma^i_de) for contravariant
        slots and pairs (i, Gamma^e_di) for covariant ones.
        """
        upper: dict[tuple[int, int], list[tuple[int, RatFn]]] = {}
        lower: dict[tuple[int, int], list[tuple[int, RatFn]]] = {}
        for (c, a, b), value in self.christoffel.nonzero_items():
            upper.setdefault((a, b), []).append((c, value))
            lower.setdefault((a, c), []).append((b, value))
        return upper, lower

    @cached_property
    def curvature(self) -> "Curvature":
        from g2conformal.geometry.curvature import Curvature

        return Curvature(self)

    def derivative(self, tensor: TensorField) -> TensorField:
        return cov_deriv(tensor, self)

    def lower(self, tensor: TensorField, position: int) -> TensorField:
        if tensor.variance[position] != CONTRAVARIANT:
            raise ArityError(f"Slot {position} of '{tensor.variance}' is not contravariant")
        return _apply_at(tensor, position, self.g, COVARIANT, 2)

    def raise_index(self, tensor: TensorField, position: int) -> TensorField:
        if tensor.variance[position] != COVARIANT:
            raise ArityError(f"Slot {position} of '{tensor.variance}' is not covariant")
        return _apply_at(tensor, position, self.g_inv, CONTRAVARIANT, -2)

    def trace(self, tensor: TensorField, first: int, second: int) -> TensorField:
        """Trace over two slots, using g_inv or g when their variance agrees."""
        if tensor.variance[first] != tensor.variance[second]:
            return tensor.contract(first, second)
        if tensor.variance[second] == COVARIANT:
            return self.raise_index(tensor, second).contract(first, second)
        return self.lower(tensor, second).contract(first, second)

    def norm_squared(self, form: TensorField) -> TensorField:
        """g^ab w_a w_b for a 1-form."""
        return self.raise_index(form, 0).tensor(form).contract(0, 1)


def _apply_at(tensor: TensorField, position: int, matrix: TensorField, kind: str, weight: int) -> TensorField:
    entries = [(i, j, value) for (i, j), value in matrix.nonzero_items()]
    variance = tensor.variance[:position] + kind + tensor.variance[position + 1 :]
    comps = [RatFn.zero()] * len(tensor.comps)
    for index, value in tensor.nonzero_items():
        j = index[position]
        for i, k, entry in entries:
            if k != j:
                continue
            target = index[:position] + (i,) + index[position + 1 :]
            offset = offset_of(target)
            comps[offset] = comps[offset] + entry * value
    return TensorField(variance=variance, comps=comps, weight=tensor.weight + weight)


def christoffel(metric: MetricField) -> TensorField:
    return metric.christoffel


def cov_deriv(tensor: TensorField, metric: MetricField) -> TensorField:
    """Levi-Civita derivative, the new covariant index first."""
    partial = tensor.partial()
    if metric.is_constant or tensor.rank == 0:
        return partial
    upper, lower = metric.gamma_tables
    comps = list(partial.comps)
    for index, value in tensor.nonzero_items():
        for slot, kind in enumerate(tensor.variance):
            e = index[slot]
            for d in range(DIMENSION):
                if kind == CONTRAVARIANT:
                    # + Gamma^i_{d e} T^{..e..}
                    for i_target, gamma in upper.get((d, e), ()):
                        target = (d,) + index[:slot] + (i_target,) + index[slot + 1 :]
                        offset = offset_of(target)
                        comps[offset] = comps[offset] + gamma * value
                else:
                    # - Gamma^e_{d i} T_{..e..}
                    for i_target, gamma in lower.get((d, e), ()):
                        target = (d,) + index[:slot] + (i_target,) + index[slot + 1 :]
                        offset = offset_of(target)
                        comps[offset] = comps[offset] - gamma * value
    return TensorField(variance=COVARIANT + tensor.variance, comps=comps, weight=tensor.weight)


def conformal_rescale(metric: MetricField, omega: RatFn) -> tuple[MetricField, TensorField]:
    """ĝ = omega^2 g and the 1-form Upsilon = d omega / omega."""
    omega = RatFn.coerce(omega)
    if omega.is_zero:
        raise DegenerateMetricError("The conformal factor vanishes identically")
    rescaled = MetricField(g=metric.g.scale(omega * omega), base_point=metric.base_point)
    upsilon = TensorField(
        variance="d",
        comps=[omega.diff(var) / omega for var in range(1, DIMENSION + 1)],
    )
    return rescaled, upsilon


def transform_standard_slots(
    rho: TensorField, phi: TensorField, sigma: TensorField, upsilon: TensorField, metric: MetricField
) -> tuple[TensorField, TensorField, TensorField]:
    """
    (rho, phi, sigma) -> (rho - Ups^a phi_a - 1/2 sigma Ups^b Ups_b,
    phi_a + sigma Ups_a, sigma), with Ups raised by the metric of the
    original scale.
    """
    upsilon_up = metric.raise_index(upsilon, 0).retag(0)
    pairing = upsilon_up.tensor(phi).contract(0, 1)
    square = upsilon_up.tensor(upsilon).contract(0, 1)
    new_rho = rho - pairing.retag(rho.weight) - square.tensor(sigma).scale(AlgScalar(1) / 2).retag(rho.weight)
    new_phi = phi + upsilon.tensor(sigma).retag(phi.weight)
    return new_rho, new_phi, sigma
