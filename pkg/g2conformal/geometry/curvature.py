"""
Riemann, Ricci, Schouten, Weyl and Cotton-York tensors of a MetricField.

Conventions: R_ab^c_d = d_a Gamma^c_bd - d_b Gamma^c_ad + Gamma^c_ae Gamma^e_bd
- Gamma^c_be Gamma^e_ad, so (D_a D_b - D_b D_a) v^c = R_ab^c_d v^d;
Ric_bd = R_ab^a_d; P = (Ric - Sc g / 8) / 3 in dimension 5;
A_abc = D_b P_ca - D_c P_ba.
"""
from __future__ import annotations

import logging
from functools import cached_property
from itertools import combinations
from typing import TYPE_CHECKING

from g2conformal.constants import DIMENSION
from g2conformal.geometry.tensor import TensorField, constant_ratio, index_tuples
from g2conformal.scalars.algscalar import AlgScalar
from g2conformal.scalars.ratfn import RatFn

if TYPE_CHECKING:
    from g2conformal.geometry.metric import MetricField

logger = logging.getLogger(__name__)


class Curvature:
    def __init__(self, metric: MetricField) -> None:
        self.metric = metric

    @cached_property
    def riemann(self) -> TensorField:
        """R_ab^c_d with indices (a, b, c, d)."""
        if self.metric.is_constant:
            return TensorField.zeros("ddud")
        gamma = self.metric.christoffel
        d_gamma = gamma.partial()  # (a, c, b, d) -> d_a Gamma^c_bd
        comps = []
        for a, b, c, d in index_tuples(4):
            total = d_gamma[a, c, b, d] - d_gamma[b, c, a, d]
            for e in range(DIMENSION):
                left = gamma[c, a, e]
                if left:
                    right = gamma[e, b, d]
                    if right:
                        total = total + left * right
                left = gamma[c, b, e]
                if left:
                    right = gamma[e, a, d]
                    if right:
                        total = total - left * right
            comps.append(total)
        logger.debug("riemann tensor: %d nonzero components", sum(1 for value in comps if value))
        return TensorField(variance="ddud", comps=comps)

    @cached_property
    def riemann_lowered(self) -> TensorField:
        """R_abcd = g_ce R_ab^e_d."""
        return self.metric.lower(self.riemann, 2)

    @cached_property
    def ricci(self) -> TensorField:
        return self.riemann.contract(0, 2)

    @cached_property
    def scalar(self) -> RatFn:
        return self.metric.trace(self.ricci, 0, 1)[()]

    @cached_property
    def schouten(self) -> TensorField:
        correction = self.metric.g.retag(0).scale(self.scalar / 8)
        return (self.ricci - correction).scale(AlgScalar(1) / 3)

    @cached_property
    def J(self) -> RatFn:
        return self.metric.trace(self.schouten, 0, 1)[()]

    @cached_property
    def weyl(self) -> TensorField:
        """C_abcd, the trace-free part of R_abcd."""
        g = self.metric.g
        p = self.schouten
        comps = []
        for (a, b, c, d), value in self.riemann_lowered.items():
            correction = g[a, c] * p[b, d] - g[b, c] * p[a, d] + g[b, d] * p[a, c] - g[a, d] * p[b, c]
            comps.append(value - correction)
        return TensorField(variance="dddd", comps=comps, weight=2)

    @cached_property
    def schouten_derivative(self) -> TensorField:
        return self.metric.derivative(self.schouten)

    @cached_property
    def cotton(self) -> TensorField:
        """A_abc = D_b P_ca - D_c P_ba."""
        dp = self.schouten_derivative
        return TensorField.from_function("ddd", lambda i: dp[i[1], i[2], i[0]] - dp[i[2], i[1], i[0]])

    def weyl_divergence(self) -> TensorField:
        """D^p C_pabc."""
        derivative = self.metric.derivative(self.weyl)  # (q, p, a, b, c)
        return self.metric.trace(derivative, 0, 1)

    def weyl_divergence_factor(self) -> AlgScalar | None:
        """
        The constant l with D^p C_pabc = l A_abc, or None when the two are not
        proportional (or A vanishes).
        """
        return constant_ratio(self.weyl_divergence(), self.cotton)

    def bianchi_residual(self) -> TensorField:
        """R_ab^c_d + R_bd^c_a + R_da^c_b."""
        r = self.riemann
        return TensorField.from_function(
            "ddud", lambda i: r[i[0], i[1], i[2], i[3]] + r[i[1], i[3], i[2], i[0]] + r[i[3], i[0], i[2], i[1]]
        )

    def skew_residuals(self) -> tuple[TensorField, TensorField]:
        """R_abcd + R_bacd and R_abcd + R_abdc."""
        r = self.riemann_lowered
        return r + r.transpose((1, 0, 2, 3)), r + r.transpose((0, 1, 3, 2))

    def weyl_traces(self) -> list[TensorField]:
        return [self.metric.trace(self.weyl, i, j) for i, j in combinations(range(4), 2)]

    @property
    def is_flat(self) -> bool:
        return self.riemann.is_zero


def curvature_pipeline(metric: MetricField) -> Curvature:
    return metric.curvature
