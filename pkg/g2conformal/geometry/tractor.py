"""
Tractor calculus in a fixed scale.

A section of Lambda^(k+1) of the standard tractor bundle is held by its
four slots (rho, phi, mu, sigma): forms of degree k, k+1, k-1, k and
weights k-1, k+1, k-1, k+1. For k = 0 there is no mu slot and the section
is a standard tractor (rho, phi_a, sigma).

Slots may carry leading passive indices (the 1-form index of a tractor
derivative, for instance); the algebraic terms of the connection only act
on the form indices that follow them.
"""
from __future__ import annotations

import logging
from fractions import Fraction
from functools import lru_cache
from itertools import combinations, permutations
from typing import Mapping, Sequence

from g2conformal.constants import DIMENSION, SLOT_NAMES
from g2conformal.exceptions import ArityError, InconsistentSystemError
from g2conformal.geometry.metric import MetricField
from g2conformal.geometry.tensor import COVARIANT, TensorField
from g2conformal.linalg import nullspace
from g2conformal.scalars.algscalar import AlgScalar
from g2conformal.scalars.poly import monomials_up_to
from g2conformal.scalars.ratfn import COORDINATES, RatFn

logger = logging.getLogger(__name__)

N = DIMENSION


def slot_degrees(k: int) -> dict[str, int]:
    return {"rho": k, "phi": k + 1, "mu": k - 1, "sigma": k}


def slot_weights(k: int) -> dict[str, int]:
    return {"rho": k - 1, "phi": k + 1, "mu": k - 1, "sigma": k + 1}


def form_from_components(
    degree: int, components: Mapping[tuple[int, ...], RatFn | AlgScalar | int], weight: int = 0
) -> TensorField:
    """Antisymmetric covariant tensor from its values on increasing index tuples."""
    entries = {}
    for subset, value in components.items():
        value = RatFn.coerce(value)
        if not value:
            continue
        for perm in permutations(range(degree)):
            inversions = sum(1 for i in range(degree) for j in range(i + 1, degree) if perm[i] > perm[j])
            index = tuple(subset[p] for p in perm)
            entries[index] = -value if inversions % 2 else value
    return TensorField.from_entries(COVARIANT * degree, entries, weight)


def form_components(form: TensorField, passive: int = 0) -> dict[tuple[int, ...], RatFn]:
    """Values on increasing tuples of the form indices (no passive indices allowed)."""
    if passive:
        raise ArityError("Form components are only read from sections without passive indices")
    return {
        subset: form[subset]
        for subset in combinations(range(N), form.rank)
        if form[subset]
    }


class TractorSection:
    """Slots of a section of Lambda^(k+1) T in the chosen scale."""

    def __init__(
        self,
        *,
        k: int,
        rho: TensorField,
        phi: TensorField,
        sigma: TensorField,
        mu: TensorField | None = None,
        passive: int = 0,
    ) -> None:
        if k not in (0, 1, 2):
            raise ArityError(f"Exterior degree k={k} is outside 0..2")
        if k == 0 and mu is not None:
            raise ArityError("Standard tractors (k=0) have no mu slot")
        if k > 0 and mu is None:
            raise ArityError(f"k={k} needs a mu slot")
        self.k = k
        self.passive = passive
        self.rho = rho
        self.phi = phi
        self.mu = mu
        self.sigma = sigma
        degrees = slot_degrees(k)
        for name, tensor in self.slots().items():
            if tensor.rank != passive + degrees[name]:
                raise ArityError(
                    f"Slot '{name}' has rank {tensor.rank}, expected {passive + degrees[name]}"
                )
            if set(tensor.variance) - {COVARIANT}:
                raise ArityError(f"Slot '{name}' must be covariant")

    @classmethod
    def zero(cls, k: int, passive: int = 0) -> TractorSection:
        degrees = slot_degrees(k)
        weights = slot_weights(k)
        slots = {
            name: TensorField.zeros(COVARIANT * (passive + degrees[name]), weights[name])
            for name in SLOT_NAMES
            if k > 0 or name != "mu"
        }
        return cls(k=k, passive=passive, **slots)

    def slots(self) -> dict[str, TensorField]:
        result = {"rho": self.rho, "phi": self.phi}
        if self.mu is not None:
            result["mu"] = self.mu
        result["sigma"] = self.sigma
        return result

    def is_antisymmetric(self) -> bool:
        for tensor in self.slots().values():
            positions = list(range(self.passive, tensor.rank))
            if len(positions) > 1 and tensor.alt(positions) != tensor:
                return False
        return True

    @property
    def is_zero(self) -> bool:
        return all(tensor.is_zero for tensor in self.slots().values())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TractorSection):
            return NotImplemented
        return (self.k, self.passive) == (other.k, other.passive) and self.slots() == other.slots()

    __hash__ = None

    def __repr__(self) -> str:
        return f"TractorSection(k={self.k}, passive={self.passive})"

    def __add__(self, other: TractorSection) -> TractorSection:
        if not isinstance(other, TractorSection):
            return NotImplemented
        mine, theirs = self.slots(), other.slots()
        return TractorSection(k=self.k, passive=self.passive, **{n: mine[n] + theirs[n] for n in mine})

    def __sub__(self, other: TractorSection) -> TractorSection:
        if not isinstance(other, TractorSection):
            return NotImplemented
        mine, theirs = self.slots(), other.slots()
        return TractorSection(k=self.k, passive=self.passive, **{n: mine[n] - theirs[n] for n in mine})

    def scale(self, factor: RatFn | AlgScalar | int) -> TractorSection:
        return TractorSection(
            k=self.k, passive=self.passive, **{n: t.scale(factor) for n, t in self.slots().items()}
        )

    def map_slots(self, function) -> TractorSection:
        return TractorSection(
            k=self.k, passive=self.passive, **{n: function(t) for n, t in self.slots().items()}
        )

    def evaluate(self, point: Sequence[AlgScalar | int]) -> dict[str, list[AlgScalar]]:
        return {name: tensor.evaluate(point) for name, tensor in self.slots().items()}


def _contract_first_form(t2: TensorField, form: TensorField, passive: int, metric: MetricField) -> TensorField:
    # T_c^p F_{P p a..} with result indices (c, P, a..)
    mixed = metric.raise_index(t2, 1)
    return mixed.tensor(form).contract(1, 2 + passive)


def _wedge_in(t2: TensorField, form: TensorField, passive: int, factor: RatFn | AlgScalar | int) -> TensorField:
    # factor * T_{c[a0} F_{|P| a1..ak]} with result indices (c, P, a0..ak)
    product = t2.tensor(form)
    rank = product.rank
    order = [0] + list(range(2, 2 + passive)) + [1] + list(range(2 + passive, rank))
    moved = product.transpose(order)
    return moved.alt(range(1 + passive, rank)).scale(factor)


def _direction_first(form: TensorField, passive: int) -> TensorField:
    # F_{P c a..} -> (c, P, a..)
    order = [passive] + list(range(passive)) + list(range(passive + 1, form.rank))
    return form.transpose(order)


def tractor_connection(section: TractorSection, metric: MetricField) -> TractorSection:
    """
    nabla_c of a section, the new index c first:

        rho   -> D rho - P_c^p phi_p.. - k P_c[a1 mu_..]
        phi   -> D phi + (k+1) g_c[a0 rho_..] + (k+1) P_c[a0 sigma_..]
        mu    -> D mu - P_c^p sigma_p.. + rho_c..
        sigma -> D sigma - phi_c.. + k g_c[a1 mu_..]
    """
    k = section.k
    passive = section.passive
    p = metric.curvature.schouten
    g = metric.g
    D = metric.derivative

    rho = D(section.rho) - _contract_first_form(p, section.phi, passive, metric)
    phi = (
        D(section.phi)
        + _wedge_in(g, section.rho, passive, k + 1)
        + _wedge_in(p, section.sigma, passive, k + 1)
    )
    sigma = D(section.sigma) - _direction_first(section.phi, passive)
    mu = None
    if k > 0:
        rho = rho - _wedge_in(p, section.mu, passive, k)
        mu = (
            D(section.mu)
            - _contract_first_form(p, section.sigma, passive, metric)
            + _direction_first(section.rho, passive)
        )
        sigma = sigma + _wedge_in(g, section.mu, passive, k)
    return TractorSection(k=k, passive=passive + 1, rho=rho, phi=phi, mu=mu, sigma=sigma)


def tractor_curvature(section: TractorSection, metric: MetricField) -> TractorSection:
    """nabla_a nabla_b s - nabla_b nabla_a s, indices (a, b) first."""
    if section.passive:
        raise ArityError("Tractor curvature is applied to sections without passive indices")
    twice = tractor_connection(tractor_connection(section, metric), metric)

    def antisymmetrize(tensor: TensorField) -> TensorField:
        order = [1, 0] + list(range(2, tensor.rank))
        return tensor - tensor.transpose(order)

    return twice.map_slots(antisymmetrize)


class TractorMetric:
    """
    h(s1, s2) = rho1 sigma2 + sigma1 rho2 + g^ab phi1_a phi2_b on standard
    tractors. In slot order (rho, phi_1..phi_5, sigma) its matrix has the
    off-diagonal 1's in the corners and g^-1 in the middle.
    """

    def __init__(self, metric: MetricField) -> None:
        self.metric = metric

    def matrix(self) -> list[list[RatFn]]:
        size = N + 2
        rows = [[RatFn.zero()] * size for _ in range(size)]
        rows[0][size - 1] = RatFn.one()
        rows[size - 1][0] = RatFn.one()
        for i in range(N):
            for j in range(N):
                rows[1 + i][1 + j] = self.metric.g_inv[i, j]
        return rows

    def pair(self, first: TractorSection, second: TractorSection) -> TensorField:
        """Pairing; passive indices of first, then of second, lead the result."""
        if first.k or second.k:
            raise ArityError("The tractor metric is implemented on standard tractors")
        total = first.rho.tensor(second.sigma).retag(0) + first.sigma.tensor(second.rho).retag(0)
        product = first.phi.tensor(second.phi)
        middle = self.metric.trace(product, first.passive, first.phi.rank + second.passive)
        return total + middle.retag(0)


def tau_plus() -> TractorSection:
    return TractorSection(
        k=0,
        rho=TensorField.scalar(1, -1),
        phi=TensorField.zeros("d", 1),
        sigma=TensorField.scalar(0, 1),
    )


def tau_minus() -> TractorSection:
    return TractorSection(
        k=0,
        rho=TensorField.scalar(0, -1),
        phi=TensorField.zeros("d", 1),
        sigma=TensorField.scalar(1, 1),
    )


def _divergence(form: TensorField, metric: MetricField) -> TensorField:
    # D^p F_{p a..}
    return metric.trace(metric.derivative(form), 0, 1)


def split_L0(k: int, sigma: TensorField, metric: MetricField) -> TractorSection:
    """First BGG splitting operator applied to a k-form sigma of weight k+1."""
    if sigma.rank != k or set(sigma.variance) - {COVARIANT}:
        raise ArityError(f"split_L0 needs a covariant {k}-form")
    sigma = sigma.retag(k + 1)
    n = N
    curvature = metric.curvature
    j = curvature.J
    d_sigma = metric.derivative(sigma)
    dd_sigma = metric.derivative(d_sigma)
    box = metric.trace(dd_sigma, 0, 1)
    j_sigma = sigma.scale(j, -2)
    if k == 0:
        rho = (box + j_sigma).scale(Fraction(-1, n))
        return TractorSection(k=0, rho=rho, phi=d_sigma, sigma=sigma)

    phi = d_sigma.alt()
    divergence = metric.trace(d_sigma, 0, 1)
    mu = divergence.scale(Fraction(-1, n - k + 1))

    # D^p D_[a1 sigma_|p|a2..]: trace of the outer derivative with the first form index
    cross = metric.trace(dd_sigma, 0, 2).alt()
    outer = metric.derivative(divergence).alt()
    schouten_term = _contract_first_form(curvature.schouten, sigma, 0, metric).alt()
    rho = (
        box.scale(Fraction(-1, n * (k + 1)))
        + cross.scale(Fraction(k, n * (k + 1)))
        + outer.scale(Fraction(k, n * (n - k + 1)))
        + schouten_term.scale(Fraction(2 * k, n))
        - j_sigma.scale(Fraction(1, n))
    )
    return TractorSection(k=k, rho=rho, phi=phi, mu=mu, sigma=sigma)


def bgg_theta0(k: int, sigma: TensorField, metric: MetricField) -> TensorField:
    """
    First BGG operator. k = 0: (DD sigma + P sigma)_0. k >= 1: the part of
    D sigma that is neither alternating nor a trace,
    D_c sigma - D_[c sigma_..] - k/(n-k+1) g_c[a1 D^p sigma_|p|..].
    """
    if sigma.rank != k:
        raise ArityError(f"bgg_theta0 needs a {k}-form")
    sigma = sigma.retag(k + 1)
    d_sigma = metric.derivative(sigma)
    if k == 0:
        hessian = metric.derivative(d_sigma) + metric.curvature.schouten.tensor(sigma)
        trace = metric.trace(hessian, 0, 1)[()]
        return hessian - metric.g.scale(trace / N).retag(hessian.weight)
    divergence = metric.trace(d_sigma, 0, 1)
    correction = _wedge_in(metric.g, divergence, 0, Fraction(k, N - k + 1))
    return d_sigma - d_sigma.alt() - correction


def normality_residuals(section: TractorSection, metric: MetricField) -> tuple[TensorField, TensorField, TensorField]:
    """rho-, phi- and mu-slots of nabla s for a section with k = 2."""
    if section.k != 2:
        raise ArityError("Normality residuals are defined for k = 2")
    derivative = tractor_connection(section, metric)
    return derivative.rho, derivative.phi, derivative.mu


class WedgeIdentities:
    """A2 = sigma^sigma^mu and A1 = sigma^mu^rho for a k = 2 section."""

    def __init__(self, section: TractorSection) -> None:
        if section.k != 2 or section.passive:
            raise ArityError("Wedge identities take a k = 2 section without passive indices")
        sigma, mu, rho = section.sigma, section.mu, section.rho
        self.A2 = sigma.wedge(sigma).wedge(mu)
        self.A1 = sigma.wedge(mu).wedge(rho)

    def top_coefficients(self) -> tuple[RatFn, RatFn]:
        """Coefficients on dx1^...^dx5."""
        top = tuple(range(N))
        return self.A2[top], self.A1[top]


def wedge_identities(section: TractorSection) -> WedgeIdentities:
    return WedgeIdentities(section)


def reproduces_parallel(section: TractorSection, metric: MetricField) -> bool:
    """split_L0 of the sigma slot gives back every slot."""
    return split_L0(section.k, section.sigma, metric) == section


# --- flat model -----------------------------------------------------------


@lru_cache(maxsize=None)
def slot_keys(k: int) -> tuple[tuple[str, tuple[int, ...]], ...]:
    """Coordinates of a section: (slot name, increasing index tuple)."""
    degrees = slot_degrees(k)
    return tuple(
        (name, subset)
        for name in SLOT_NAMES
        if k > 0 or name != "mu"
        for subset in combinations(range(N), degrees[name])
    )


def section_from_vector(k: int, vector: Sequence[RatFn | AlgScalar | int]) -> TractorSection:
    keys = slot_keys(k)
    if len(vector) != len(keys):
        raise ArityError(f"A k={k} section has {len(keys)} coordinates, got {len(vector)}")
    degrees = slot_degrees(k)
    weights = slot_weights(k)
    components: dict[str, dict] = {name: {} for name in degrees}
    for (name, subset), value in zip(keys, vector):
        components[name][subset] = value
    slots = {
        name: form_from_components(degrees[name], components[name], weights[name])
        for name in SLOT_NAMES
        if k > 0 or name != "mu"
    }
    return TractorSection(k=k, **slots)


def section_to_vector(section: TractorSection) -> list[RatFn]:
    slots = section.slots()
    return [slots[name][subset] for name, subset in slot_keys(section.k)]


@lru_cache(maxsize=None)
def flat_connection_matrices(k: int) -> tuple[tuple[dict[int, AlgScalar], ...], ...]:
    """
    On the flat metric nabla_c = d_c + A_c with constant A_c. Returns, for
    each direction c, the sparse columns A_c e_j.
    """
    metric = flat_metric()
    size = len(slot_keys(k))
    columns_by_direction = [[None] * size for _ in range(N)]
    for j in range(size):
        unit = [1 if i == j else 0 for i in range(size)]
        derivative = tractor_connection(section_from_vector(k, unit), metric)
        slots = derivative.slots()
        for c in range(N):
            column = {}
            for i, (name, subset) in enumerate(slot_keys(k)):
                value = slots[name][(c,) + subset]
                if value:
                    column[i] = value.constant_value()
            columns_by_direction[c][j] = column
    return tuple(tuple(columns) for columns in columns_by_direction)


@lru_cache(maxsize=None)
def flat_metric() -> MetricField:
    return MetricField.flat()


def _apply_flat(k: int, c: int, vector: Sequence[RatFn]) -> list[RatFn]:
    columns = flat_connection_matrices(k)[c]
    result = [RatFn.zero()] * len(vector)
    for j, value in enumerate(vector):
        if not value:
            continue
        for i, entry in columns[j].items():
            result[i] = result[i] + value * entry
    return result


def flat_parallel_solve(k: int, initial: TractorSection | Sequence[AlgScalar | int]) -> TractorSection:
    """
    Parallel section of the flat model through the given value at the
    origin, by the Taylor recursion S_(m+1) = -1/(m+1) x^c A_c S_m.
    """
    if isinstance(initial, TractorSection):
        start = [value.evaluate((0,) * N) for value in section_to_vector(initial)]
    else:
        start = [AlgScalar.coerce(value) for value in initial]
    term = [RatFn.coerce(value) for value in start]
    total = list(term)
    degree = 0
    while any(term):
        degree += 1
        if degree > 4:
            raise InconsistentSystemError("Taylor recursion did not terminate by degree 4")
        step = [RatFn.zero()] * len(term)
        for c in range(N):
            moved = _apply_flat(k, c, term)
            for i, value in enumerate(moved):
                if value:
                    step[i] = step[i] + value * COORDINATES[c]
        term = [value / (-degree) if value else value for value in step]
        total = [a + b for a, b in zip(total, term)]
    section = section_from_vector(k, total)
    if not tractor_connection(section, flat_metric()).is_zero:
        raise InconsistentSystemError("The flat Taylor solution is not parallel")
    logger.debug("flat parallel section k=%d: polynomial degree %d", k, degree - 1)
    return section


def parallel_space_dimension(k: int, degree: int) -> int:
    """
    Nullity of nabla s = 0 on the flat model over polynomial slots of
    degree <= 'degree', i.e. the dimension of the parallel sections found
    by a polynomial ansatz.
    """
    size = len(slot_keys(k))
    monomials = monomials_up_to(degree)
    monomial_index = {m: i for i, m in enumerate(monomials)}
    count = len(monomials)
    matrices = flat_connection_matrices(k)
    rows: dict[tuple[int, int, tuple[int, ...]], dict[int, AlgScalar]] = {}
    for j in range(size):
        for m, exponent in enumerate(monomials):
            unknown = j * count + m
            for c in range(N):
                # d_c of x^exponent
                if exponent[c]:
                    lowered = exponent[:c] + (exponent[c] - 1,) + exponent[c + 1 :]
                    row = rows.setdefault((c, j, lowered), {})
                    row[unknown] = row.get(unknown, AlgScalar(0)) + exponent[c]
                for i, entry in matrices[c][j].items():
                    row = rows.setdefault((c, i, exponent), {})
                    row[unknown] = row.get(unknown, AlgScalar(0)) + entry
    kernel = nullspace(
        ({col: value for col, value in row.items() if value} for row in rows.values()),
        size * count,
    )
    logger.debug(
        "parallel ansatz k=%d degree %d: %d unknowns, nullity %d", k, degree, size * count, len(kernel)
    )
    return len(kernel)

