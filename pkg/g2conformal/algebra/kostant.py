"""
Chevalley-Eilenberg differential of g_- with values in a module V, the
Kostant codifferential on p_+ chains, the Kostant Laplacian, and the
algebraic checks behind normality of the induced conformal connection.

A cochain of degree i is stored on keys (S, m): S a strictly increasing
i-tuple of g_- basis indices, m a basis index of V. Through the duality
between g_- and p_+ the same key names the chain Z_S (x) v_m, so both
operators act on one representation.
"""
from __future__ import annotations

import logging
from functools import lru_cache
from itertools import combinations
from typing import Iterable, Mapping, Sequence

from g2conformal.algebra.lie_g2 import (
    CONFORMAL_GRADING,
    G2_GRADING,
    LieElt,
    g2_named_basis,
    so34_graded,
    so34_named_basis,
)
from g2conformal.linalg import SpanSolver, determinant_and_adjugate, nullspace, rank
from g2conformal.scalars.algscalar import AlgScalar

logger = logging.getLogger(__name__)

Key = tuple[tuple[int, ...], int]


def _sort_with_sign(indices: Sequence[int]) -> tuple[int, tuple[int, ...]]:
    """Sign of the sorting permutation and the sorted tuple; sign 0 on repeats."""
    if len(set(indices)) != len(indices):
        return 0, ()
    sign = 1
    items = list(indices)
    for i in range(len(items)):
        for j in range(i + 1, len(items)):
            if items[i] > items[j]:
                sign = -sign
    return sign, tuple(sorted(items))


class Cochain:
    """Sparse element of C_i(V) = Lambda^i (g/p)* (x) V."""

    __slots__ = ("degree", "space", "_terms")

    def __init__(self, *, degree: int, space: str, terms: Mapping[Key, AlgScalar | int] = None) -> None:
        self.degree = degree
        self.space = space
        cleaned = {}
        for (subset, index), value in (terms or {}).items():
            if len(subset) != degree or list(subset) != sorted(set(subset)):
                raise ValueError(f"'{subset}' is not an increasing {degree}-tuple")
            value = AlgScalar.coerce(value)
            if value:
                cleaned[(tuple(subset), index)] = value
        self._terms = cleaned

    @classmethod
    def _from_accumulator(cls, degree: int, space: str, terms: dict[Key, AlgScalar]) -> Cochain:
        cochain = cls.__new__(cls)
        cochain.degree = degree
        cochain.space = space
        cochain._terms = {key: value for key, value in terms.items() if value}
        return cochain

    @property
    def terms(self) -> dict[Key, AlgScalar]:
        return dict(self._terms)

    @property
    def is_zero(self) -> bool:
        return not self._terms

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Cochain):
            return NotImplemented
        return (self.degree, self.space, self._terms) == (other.degree, other.space, other._terms)

    def __repr__(self) -> str:
        return f"Cochain(degree={self.degree}, space={self.space!r}, terms={len(self._terms)})"

    def _check_compatible(self, other: Cochain) -> None:
        if (self.degree, self.space) != (other.degree, other.space):
            raise TypeError(
                f"Cannot combine cochains of degree {self.degree} in {self.space!r} "
                f"and degree {other.degree} in {other.space!r}"
            )

    def __add__(self, other: Cochain) -> Cochain:
        if not isinstance(other, Cochain):
            return NotImplemented
        self._check_compatible(other)
        terms = dict(self._terms)
        for key, value in other._terms.items():
            terms[key] = terms.get(key, AlgScalar(0)) + value
        return Cochain._from_accumulator(self.degree, self.space, terms)

    def __sub__(self, other: Cochain) -> Cochain:
        return self + other.scale(-1)

    def scale(self, factor: AlgScalar | int) -> Cochain:
        factor = AlgScalar.coerce(factor)
        return Cochain._from_accumulator(
            self.degree, self.space, {key: value * factor for key, value in self._terms.items()}
        )


def _accumulate(target: dict[Key, AlgScalar], key: Key, value: AlgScalar) -> None:
    current = target.get(key)
    target[key] = value if current is None else current + value


class KostantComplex:
    """
    The complexes C_i(V) for a graded Lie algebra acting on V by brackets.

    'negative' is a basis X_a of g_-, 'positive' any basis of p_+; the
    chain basis Z_a of p_+ is the one dual to X_a under the trace form.
    """

    registry: dict[str, "KostantComplex"] = {}

    def __init__(
        self,
        *,
        name: str,
        negative: Sequence[tuple[str, LieElt]],
        positive: Sequence[LieElt],
        values: Sequence[tuple[str, LieElt]],
        grading: Sequence[int],
    ) -> None:
        self.name = name
        self.negative_names = [label for label, _ in negative]
        self.negative = [element for _, element in negative]
        self.value_names = [label for label, _ in values]
        self.values = [element for _, element in values]
        self.grading = tuple(grading)
        self.size = len(self.negative)
        self.dual = dual_basis(self.negative, positive)

        self.negative_degrees = [self._degree(x) for x in self.negative]
        self.value_degrees = [self._degree(v) for v in self.values]

        width = 49
        negative_solver = SpanSolver([x.vectorize() for x in self.negative], width)
        self._dual_solver = SpanSolver([z.vectorize() for z in self.dual], width)
        self._value_solver = SpanSolver([v.vectorize() for v in self.values], width)

        self.negative_brackets = self._structure(self.negative, self.negative, negative_solver)
        self.dual_brackets = self._structure(self.dual, self.dual, self._dual_solver)
        self.negative_action = self._structure(self.negative, self.values, self._value_solver)
        self.dual_action = self._structure(self.dual, self.values, self._value_solver)
        logger.debug(
            "Kostant complex %s: dim g_- %d, dim V %d", name, self.size, len(self.values)
        )

    def _degree(self, element: LieElt) -> int:
        degrees = element.degrees(self.grading)
        if len(degrees) != 1:
            raise ValueError(f"{element!r} is not homogeneous")
        return degrees.pop()

    @staticmethod
    def _structure(
        left: Sequence[LieElt], right: Sequence[LieElt], solver: SpanSolver
    ) -> list[list[dict[int, AlgScalar]]]:
        table = []
        for a in left:
            row = []
            for b in right:
                coordinates = solver.coordinates(a.bracket(b).vectorize())
                if coordinates is None:
                    raise ValueError("Bracket leaves the span of the given basis")
                row.append({index: value for index, value in enumerate(coordinates) if value})
            table.append(row)
        return table

    @classmethod
    def for_space(cls, name: str) -> KostantComplex:
        if name not in cls.registry:
            builders = {
                "g2": _g2_complex,
                "so34": _g2_on_so34_complex,
                "conformal": _conformal_complex,
            }
            if name not in builders:
                raise ValueError(f"Unknown value space '{name}'")
            cls.registry[name] = builders[name]()
        return cls.registry[name]

    def keys(self, degree: int) -> list[Key]:
        return [
            (subset, index)
            for subset in combinations(range(self.size), degree)
            for index in range(len(self.values))
        ]

    def homogeneity(self, key: Key) -> int:
        subset, index = key
        return sum(-self.negative_degrees[s] for s in subset) + self.value_degrees[index]

    def basis_cochain(self, degree: int, key: Key) -> Cochain:
        return Cochain(degree=degree, space=self.name, terms={key: 1})

    def differential(self, cochain: Cochain) -> Cochain:
        """
        (dc)(X_t0, ..., X_ti) = sum_j (-1)^j X_tj . c(.., ^j, ..)
                                + sum_{j<k} (-1)^(j+k) c([X_tj, X_tk], .., ^j, ^k, ..)
        """
        degree = cochain.degree
        result: dict[Key, AlgScalar] = {}
        for (subset, index), value in cochain.terms.items():
            for a in range(self.size):
                if a in subset:
                    continue
                target = tuple(sorted(subset + (a,)))
                sign = -1 if target.index(a) % 2 else 1
                for image, coefficient in self.negative_action[a][index].items():
                    _accumulate(result, (target, image), value * coefficient * sign)
            for position, b in enumerate(subset):
                rest = subset[:position] + subset[position + 1 :]
                lead_sign = -1 if position % 2 else 1
                for p, q in combinations(range(self.size), 2):
                    if p in rest or q in rest:
                        continue
                    coefficient = self.negative_brackets[p][q].get(b)
                    if not coefficient:
                        continue
                    target = tuple(sorted(rest + (p, q)))
                    sign = lead_sign * (-1 if (target.index(p) + target.index(q)) % 2 else 1)
                    _accumulate(result, (target, index), value * coefficient * sign)
        return Cochain._from_accumulator(degree + 1, self.name, result)

    def codifferential(self, chain: Cochain) -> Cochain:
        """
        d*(Z_s1 ^ .. ^ Z_si (x) v) = sum_j (-1)^j Z_s1 ^ .. ^j .. ^ Z_si (x) [Z_sj, v]
                                    + sum_{j<k} (-1)^(j+k) [Z_sj, Z_sk] ^ Z_s1 ^ .. ^j ^k .. (x) v
        with j, k counted from 1.
        """
        degree = chain.degree
        if degree == 0:
            return Cochain(degree=0, space=self.name)
        result: dict[Key, AlgScalar] = {}
        for (subset, index), value in chain.terms.items():
            for position, s in enumerate(subset):
                rest = subset[:position] + subset[position + 1 :]
                sign = 1 if position % 2 else -1
                for image, coefficient in self.dual_action[s][index].items():
                    _accumulate(result, (rest, image), value * coefficient * sign)
            for j, k in combinations(range(degree), 2):
                rest = tuple(s for position, s in enumerate(subset) if position not in (j, k))
                pair_sign = -1 if (j + k) % 2 else 1
                for b, coefficient in self.dual_brackets[subset[j]][subset[k]].items():
                    wedge_sign, target = _sort_with_sign((b,) + rest)
                    if not wedge_sign:
                        continue
                    _accumulate(result, (target, index), value * coefficient * pair_sign * wedge_sign)
        return Cochain._from_accumulator(degree - 1, self.name, result)

    def laplacian(self, cochain: Cochain) -> Cochain:
        total = self.codifferential(self.differential(cochain))
        if cochain.degree > 0:
            total = total + self.differential(self.codifferential(cochain))
        return total

    def homogeneity_blocks(self, degree: int) -> dict[int, list[Key]]:
        blocks: dict[int, list[Key]] = {}
        for key in self.keys(degree):
            blocks.setdefault(self.homogeneity(key), []).append(key)
        return blocks

    def laplacian_kernel(self, degree: int) -> list[Cochain]:
        kernel = []
        for weight, block in sorted(self.homogeneity_blocks(degree).items()):
            positions = {key: i for i, key in enumerate(block)}
            rows: dict[int, dict[int, AlgScalar]] = {}
            for column, key in enumerate(block):
                image = self.laplacian(self.basis_cochain(degree, key))
                for out_key, value in image.terms.items():
                    if out_key not in positions:
                        raise RuntimeError(
                            f"Laplacian leaves homogeneity {weight} in {self.name!r}"
                        )
                    rows.setdefault(positions[out_key], {})[column] = value
            vectors = nullspace(rows.values(), len(block))
            logger.debug(
                "Laplacian block %s degree %d homogeneity %d: size %d, kernel %d",
                self.name, degree, weight, len(block), len(vectors),
            )
            for vector in vectors:
                kernel.append(
                    Cochain(
                        degree=degree,
                        space=self.name,
                        terms={block[column]: value for column, value in vector.items()},
                    )
                )
        return kernel

    def _image_rank(self, cochains: Iterable[Cochain], degree: int) -> int:
        positions = {key: i for i, key in enumerate(self.keys(degree))}
        return rank(
            {positions[key]: value for key, value in cochain.terms.items()} for cochain in cochains
        )

    def hodge_dimensions(self, degree: int) -> HodgeDimensions:
        """Dimensions of im d, ker Laplacian and im d* inside C_degree."""
        differential_image = 0
        if degree > 0:
            differential_image = self._image_rank(
                (self.differential(self.basis_cochain(degree - 1, key)) for key in self.keys(degree - 1)),
                degree,
            )
        codifferential_image = 0
        if degree < self.size:
            codifferential_image = self._image_rank(
                (self.codifferential(self.basis_cochain(degree + 1, key)) for key in self.keys(degree + 1)),
                degree,
            )
        return HodgeDimensions(
            total=len(self.keys(degree)),
            differential_image=differential_image,
            harmonic=len(self.laplacian_kernel(degree)),
            codifferential_image=codifferential_image,
        )

    def lowest_homogeneity_dimension(self) -> int:
        """dim V - dim(p_+ . V)."""
        images = [
            {index: value for index, value in self.dual_action[a][m].items()}
            for a in range(self.size)
            for m in range(len(self.values))
        ]
        return len(self.values) - rank(images)

    @lru_cache(maxsize=None)
    def _dual_gram(self, s: int, t: int) -> AlgScalar:
        return (self.dual[s] @ self.dual[t].transpose()).trace()

    @lru_cache(maxsize=None)
    def _value_gram(self, m: int, n: int) -> AlgScalar:
        return (self.values[m] @ self.values[n].transpose()).trace()

    @lru_cache(maxsize=None)
    def _gram(self, left: Key, right: Key) -> AlgScalar:
        (s_subset, m), (t_subset, n) = left, right
        value_part = self._value_gram(m, n)
        if not value_part:
            return value_part
        if not s_subset:
            return value_part
        matrix = [[self._dual_gram(s, t) for t in t_subset] for s in s_subset]
        determinant, _ = determinant_and_adjugate(matrix)
        return determinant * value_part

    def inner_product(self, left: Cochain, right: Cochain) -> AlgScalar:
        """The inner product induced by tr(M N^T) on p_+ and on V."""
        total = AlgScalar(0)
        for key1, value1 in left.terms.items():
            for key2, value2 in right.terms.items():
                gram = self._gram(key1, key2)
                if gram:
                    total = total + value1 * value2 * gram
        return total

    def adjointness_scale(self, degree: int) -> AlgScalar | None:
        """
        The scalar l with <dc, e> = l <c, d*e> for all c in C_degree and
        e in C_(degree+1), or None if no such scalar exists.
        """
        scale = None
        lower = [self.basis_cochain(degree, key) for key in self.keys(degree)]
        upper = [self.basis_cochain(degree + 1, key) for key in self.keys(degree + 1)]
        differentials = [self.differential(c) for c in lower]
        for e in upper:
            codifferential = self.codifferential(e)
            for c, dc in zip(lower, differentials):
                left = self.inner_product(dc, e)
                right = self.inner_product(c, codifferential)
                if not right:
                    if left:
                        return None
                    continue
                ratio = left / right
                if scale is None:
                    scale = ratio
                elif ratio != scale:
                    return None
        return scale

    def act(self, generator: LieElt, chain: Cochain) -> Cochain:
        """Action of an element of g_0 on Z_S (x) v, a derivation on every factor."""
        on_dual = []
        for z in self.dual:
            coordinates = self._dual_solver.coordinates(generator.bracket(z).vectorize())
            if coordinates is None:
                raise ValueError("Generator does not preserve p_+")
            on_dual.append(coordinates)
        result: dict[Key, AlgScalar] = {}
        for (subset, index), value in chain.terms.items():
            for position, s in enumerate(subset):
                for b, coefficient in enumerate(on_dual[s]):
                    if not coefficient:
                        continue
                    sign, target = _sort_with_sign(subset[:position] + (b,) + subset[position + 1 :])
                    if sign:
                        _accumulate(result, (target, index), value * coefficient * sign)
            coordinates = self._value_solver.coordinates(generator.bracket(self.values[index]).vectorize())
            if coordinates is None:
                raise ValueError("Generator does not preserve V")
            for image, coefficient in enumerate(coordinates):
                if coefficient:
                    _accumulate(result, (subset, image), value * coefficient)
        return Cochain._from_accumulator(chain.degree, self.name, result)

    def level_zero(self) -> list[LieElt]:
        return [v for v, degree in zip(self.values, self.value_degrees) if degree == 0]

    def harmonic_is_submodule(self, degree: int) -> bool:
        """True if every g_0 element in V maps ker Laplacian in this degree into itself."""
        harmonic = self.laplacian_kernel(degree)
        positions = {key: i for i, key in enumerate(self.keys(degree))}

        def vector(chain: Cochain) -> dict[int, AlgScalar]:
            return {positions[key]: value for key, value in chain.terms.items()}

        base = [vector(chain) for chain in harmonic]
        expected = rank(base)
        for generator in self.level_zero():
            images = [vector(self.act(generator, chain)) for chain in harmonic]
            if rank(base + images) != expected:
                logger.debug("ker Laplacian in degree %d is not preserved by %r", degree, generator)
                return False
        return True


class HodgeDimensions:
    def __init__(self, *, total: int, differential_image: int, harmonic: int, codifferential_image: int) -> None:
        self.total = total
        self.differential_image = differential_image
        self.harmonic = harmonic
        self.codifferential_image = codifferential_image

    @property
    def balanced(self) -> bool:
        return self.differential_image + self.harmonic + self.codifferential_image == self.total


def dual_basis(negative: Sequence[LieElt], positive: Sequence[LieElt]) -> list[LieElt]:
    """Z_b in span(positive) with tr(X_a Z_b) = delta_ab."""
    gram = [[(x @ p).trace() for p in positive] for x in negative]
    determinant, adjugate = determinant_and_adjugate(gram)
    if not determinant:
        raise ValueError("The trace form does not pair the given bases")
    dual = []
    for b in range(len(negative)):
        # column b of gram^-1 gives the coefficients of Z_b
        element = LieElt.zero()
        for c, p in enumerate(positive):
            coefficient = adjugate[c][b] / determinant
            if coefficient:
                element = element + p.scale(coefficient)
        dual.append(element)
    return dual


G2_NEGATIVE_ORDER = ("X1", "X2", "r", "Y1", "Y2")
G2_POSITIVE_ORDER = ("Z1", "Z2", "s", "W1", "W2")


def _g2_pieces() -> tuple[list[tuple[str, LieElt]], list[LieElt]]:
    named = dict(g2_named_basis())
    negative = [(name, named[name]) for name in G2_NEGATIVE_ORDER]
    positive = [named[name] for name in G2_POSITIVE_ORDER]
    return negative, positive


def _g2_complex() -> KostantComplex:
    negative, positive = _g2_pieces()
    return KostantComplex(
        name="g2", negative=negative, positive=positive, values=g2_named_basis(), grading=G2_GRADING
    )


def _g2_on_so34_complex() -> KostantComplex:
    negative, positive = _g2_pieces()
    return KostantComplex(
        name="so34", negative=negative, positive=positive, values=so34_named_basis(), grading=G2_GRADING
    )


def _conformal_complex() -> KostantComplex:
    graded = so34_graded()
    return KostantComplex(
        name="conformal",
        negative=graded.components[-1],
        positive=graded.component(1),
        values=so34_named_basis(),
        grading=CONFORMAL_GRADING,
    )


def ce_differential(cochain: Cochain) -> Cochain:
    return KostantComplex.for_space(cochain.space).differential(cochain)


def kostant_codiff(chain: Cochain) -> Cochain:
    if chain.degree < 1:
        raise ValueError("The codifferential needs a chain of degree at least 1")
    return KostantComplex.for_space(chain.space).codifferential(chain)


def laplacian_kernel(degree: int, space: str = "g2") -> list[Cochain]:
    if degree not in (0, 1, 2):
        raise ValueError(f"Laplacian kernels are computed in degrees 0, 1 and 2, not {degree}")
    return KostantComplex.for_space(space).laplacian_kernel(degree)


def conformal_codiff_on_decomposable(u: int, v: int, value: int) -> Cochain:
    """
    d*(U ^ V (x) A) = U (x) [V, A] - V (x) [U, A] on the conformal complex,
    for dual basis indices u != v of p~_+ and a basis index of so(h).
    """
    complex_ = KostantComplex.for_space("conformal")
    result: dict[Key, AlgScalar] = {}
    for first, second, sign in ((u, v, 1), (v, u, -1)):
        for image, coefficient in complex_.dual_action[second][value].items():
            _accumulate(result, ((first,), image), coefficient * sign)
    return Cochain._from_accumulator(1, "conformal", result)


class ContainmentReport:
    def __init__(self, *, contained: bool, harmonic_rank: int, harmonic_dimension: int) -> None:
        self.contained = contained
        self.harmonic_rank = harmonic_rank
        self.harmonic_dimension = harmonic_dimension

    @property
    def passed(self) -> bool:
        return self.contained and self.harmonic_rank == 0


@lru_cache(maxsize=None)
def _inclusion_images() -> tuple[tuple[LieElt, ...], tuple[tuple[dict[int, AlgScalar], ...], ...]]:
    """
    Images under the inclusion g2 -> so(h): the conformal dual basis pairing
    with the g2 basis of g_- (so (g~/p~)* -> (g/p)* is inverted), and the
    so(h) coordinates of every g2 basis element.
    """
    source = KostantComplex.for_space("g2")
    target = KostantComplex.for_space("conformal")
    duals = tuple(dual_basis(source.negative, so34_graded().component(1)))
    solver = SpanSolver([v.vectorize() for v in target.values], 49)
    values = []
    for element in source.values:
        coordinates = solver.coordinates(element.vectorize())
        values.append({i: c for i, c in enumerate(coordinates) if c})
    return duals, tuple(values)


def include_chain(chain: Cochain) -> Cochain:
    """I: Lambda^i p_+ (x) g2 -> Lambda^i p~_+ (x) so(h)."""
    if chain.space != "g2":
        raise ValueError("Only chains with values in g2 can be included")
    target = KostantComplex.for_space("conformal")
    duals, values = _inclusion_images()
    # express each included dual vector in the conformal dual basis
    solver = SpanSolver([z.vectorize() for z in target.dual], 49)
    expansions = []
    for z in duals:
        coordinates = solver.coordinates(z.vectorize())
        expansions.append({i: c for i, c in enumerate(coordinates) if c})
    result: dict[Key, AlgScalar] = {}
    for (subset, index), value in chain.terms.items():
        partial = [((), value)]
        for s in subset:
            extended = []
            for indices, weight in partial:
                for b, coefficient in expansions[s].items():
                    extended.append((indices + (b,), weight * coefficient))
            partial = extended
        for indices, weight in partial:
            sign, target_subset = _sort_with_sign(indices)
            if not sign:
                continue
            for image, coefficient in values[index].items():
                _accumulate(result, (target_subset, image), weight * coefficient * sign)
    return Cochain._from_accumulator(chain.degree, "conformal", result)


def normality_containment_check() -> ContainmentReport:
    """
    Applies d~* after the inclusion to the p_+ ^ p_+ (x) g_0 block and to
    the harmonic 2-chains of g2. The first must land in p~_+ (x) p~_+, the
    second must vanish identically.
    """
    source = KostantComplex.for_space("g2")
    target = KostantComplex.for_space("conformal")
    positive_values = {
        index
        for index, element in enumerate(target.values)
        if element.degrees(CONFORMAL_GRADING) == {1}
    }
    g0_values = [
        index for index, degree in enumerate(source.value_degrees) if degree == 0
    ]
    contained = True
    for subset in combinations(range(source.size), 2):
        for index in g0_values:
            image = target.codifferential(include_chain(source.basis_cochain(2, (subset, index))))
            if any(value_index not in positive_values for (_, value_index) in image.terms):
                contained = False
    harmonic = source.laplacian_kernel(2)
    positions = {key: i for i, key in enumerate(target.keys(1))}
    harmonic_rank = rank(
        {positions[key]: value for key, value in target.codifferential(include_chain(chain)).terms.items()}
        for chain in harmonic
    )
    logger.debug("normality check: contained=%s, rank on harmonic part %d", contained, harmonic_rank)
    return ContainmentReport(
        contained=contained, harmonic_rank=harmonic_rank, harmonic_dimension=len(harmonic)
    )
