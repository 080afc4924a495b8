"""
so(3,4) as 7x7 matrices preserving the model metric h, the subalgebra g2
stabilizing the 3-form Phi, their gradings, and the pairing and insertion
maps Phi induces.

Indices are 0-based here: e1..e7 of the text are positions 0..6.
"""
from __future__ import annotations

import logging
from functools import lru_cache
from itertools import combinations, permutations
from typing import Iterable, Mapping, Sequence

from g2conformal.constants import SEVEN
from g2conformal.linalg import SpanSolver, determinant_and_adjugate, nullspace, rank
from g2conformal.scalars.algscalar import SQRT2, SQRT3, SQRT6, AlgScalar

logger = logging.getLogger(__name__)

# 1/sqrt3 and 1/sqrt6
PHI_A = SQRT3 / 3
PHI_B = SQRT6 / 6

# Grading elements: entry (i, j) has degree E[i] - E[j].
G2_GRADING = (2, 1, 1, 0, -1, -1, -2)
CONFORMAL_GRADING = (1, 0, 0, 0, 0, 0, -1)


def _permutation_sign(sequence: Sequence[int]) -> int:
    sign = 1
    items = list(sequence)
    for i in range(len(items)):
        for j in range(i + 1, len(items)):
            if items[i] > items[j]:
                sign = -sign
    return sign


class LieElt:
    """
    A 7x7 matrix over AlgScalar. Used for elements of so(h) and g2, and for
    h itself.
    """

    __slots__ = ("_rows",)

    def __init__(self, rows: Sequence[Sequence[AlgScalar | int]]) -> None:
        if len(rows) != SEVEN or any(len(row) != SEVEN for row in rows):
            raise ValueError(f"A LieElt needs a {SEVEN}x{SEVEN} matrix")
        self._rows = tuple(tuple(AlgScalar.coerce(x) for x in row) for row in rows)

    @classmethod
    def zero(cls) -> LieElt:
        return cls([[0] * SEVEN for _ in range(SEVEN)])

    @classmethod
    def from_entries(cls, entries: Mapping[tuple[int, int], AlgScalar | int]) -> LieElt:
        rows = [[AlgScalar(0)] * SEVEN for _ in range(SEVEN)]
        for (i, j), value in entries.items():
            rows[i][j] = rows[i][j] + AlgScalar.coerce(value)
        return cls(rows)

    @classmethod
    def from_vector(cls, vector: Mapping[int, AlgScalar]) -> LieElt:
        return cls.from_entries({divmod(col, SEVEN): value for col, value in vector.items()})

    @property
    def rows(self) -> tuple[tuple[AlgScalar, ...], ...]:
        return self._rows

    def __getitem__(self, index: tuple[int, int]) -> AlgScalar:
        i, j = index
        return self._rows[i][j]

    @property
    def is_zero(self) -> bool:
        return not any(any(row) for row in self._rows)

    def __bool__(self) -> bool:
        return not self.is_zero

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LieElt):
            return NotImplemented
        return self._rows == other._rows

    def __hash__(self) -> int:
        return hash(self._rows)

    def __repr__(self) -> str:
        nonzero = {
            (i, j): value.render()
            for i, row in enumerate(self._rows)
            for j, value in enumerate(row)
            if value
        }
        return f"LieElt({nonzero})"

    def __add__(self, other: LieElt) -> LieElt:
        if not isinstance(other, LieElt):
            return NotImplemented
        return LieElt([[a + b for a, b in zip(r1, r2)] for r1, r2 in zip(self._rows, other._rows)])

    def __sub__(self, other: LieElt) -> LieElt:
        if not isinstance(other, LieElt):
            return NotImplemented
        return LieElt([[a - b for a, b in zip(r1, r2)] for r1, r2 in zip(self._rows, other._rows)])

    def __neg__(self) -> LieElt:
        return LieElt([[-a for a in row] for row in self._rows])

    def scale(self, factor: AlgScalar | int) -> LieElt:
        factor = AlgScalar.coerce(factor)
        return LieElt([[a * factor for a in row] for row in self._rows])

    def __rmul__(self, factor: AlgScalar | int) -> LieElt:
        if isinstance(factor, LieElt):
            return NotImplemented
        return self.scale(factor)

    def __matmul__(self, other: LieElt) -> LieElt:
        if not isinstance(other, LieElt):
            return NotImplemented
        columns = list(zip(*other._rows))
        result = []
        for row in self._rows:
            result_row = []
            for column in columns:
                total = AlgScalar(0)
                for a, b in zip(row, column):
                    if a and b:
                        total = total + a * b
                result_row.append(total)
            result.append(result_row)
        return LieElt(result)

    def bracket(self, other: LieElt) -> LieElt:
        return self @ other - other @ self

    def transpose(self) -> LieElt:
        return LieElt(list(zip(*self._rows)))

    def trace(self) -> AlgScalar:
        total = AlgScalar(0)
        for i in range(SEVEN):
            total = total + self._rows[i][i]
        return total

    def apply(self, vector: Sequence[AlgScalar | int]) -> list[AlgScalar]:
        values = [AlgScalar.coerce(v) for v in vector]
        result = []
        for row in self._rows:
            total = AlgScalar(0)
            for a, v in zip(row, values):
                if a and v:
                    total = total + a * v
            result.append(total)
        return result

    def vectorize(self) -> dict[int, AlgScalar]:
        """Sparse row-major coordinates, column index 7*i + j."""
        return {
            SEVEN * i + j: value
            for i, row in enumerate(self._rows)
            for j, value in enumerate(row)
            if value
        }

    def degree_part(self, grading: Sequence[int], degree: int) -> LieElt:
        return LieElt.from_entries(
            {
                (i, j): value
                for i, row in enumerate(self._rows)
                for j, value in enumerate(row)
                if value and grading[i] - grading[j] == degree
            }
        )

    def degrees(self, grading: Sequence[int]) -> set[int]:
        return {
            grading[i] - grading[j]
            for i, row in enumerate(self._rows)
            for j, value in enumerate(row)
            if value
        }


# Middle block of h: the flat metric 2dx1dx4 + 2dx2dx5 - dx3^2.
MODEL_MIDDLE = (
    (0, 0, 0, 1, 0),
    (0, 0, 0, 0, 1),
    (0, 0, -1, 0, 0),
    (1, 0, 0, 0, 0),
    (0, 1, 0, 0, 0),
)


def model_metric() -> LieElt:
    entries = {(0, 6): 1, (6, 0): 1}
    for i, row in enumerate(MODEL_MIDDLE):
        for j, value in enumerate(row):
            if value:
                entries[(i + 1, j + 1)] = value
    return LieElt.from_entries(entries)


H = model_metric()


def preserves_metric(element: LieElt, metric: LieElt = H) -> bool:
    """Mᵀh + hM = 0."""
    return (element.transpose() @ metric + metric @ element).is_zero


def _so34_alpha() -> LieElt:
    return LieElt.from_entries({(0, 0): -1, (6, 6): 1})


def _so34_lower(index: int) -> LieElt:
    entries = {(1 + index, 0): 1}
    for j in range(5):
        if MODEL_MIDDLE[index][j]:
            entries[(6, 1 + j)] = -MODEL_MIDDLE[index][j]
    return LieElt.from_entries(entries)


def _so34_upper(index: int) -> LieElt:
    entries = {(1 + index, 6): 1}
    for j in range(5):
        if MODEL_MIDDLE[index][j]:
            entries[(0, 1 + j)] = -MODEL_MIDDLE[index][j]
    return LieElt.from_entries(entries)


def _so34_middle(p: int, q: int) -> LieElt:
    # middle block h_mid * (E_pq - E_qp)
    entries = {}
    for i in range(5):
        if MODEL_MIDDLE[i][p]:
            entries[(1 + i, 1 + q)] = MODEL_MIDDLE[i][p]
        if MODEL_MIDDLE[i][q]:
            entries[(1 + i, 1 + p)] = -MODEL_MIDDLE[i][q]
    return LieElt.from_entries(entries)


@lru_cache(maxsize=None)
def so34_named_basis() -> tuple[tuple[str, LieElt], ...]:
    """
    Basis of so(h) adapted to the conformal grading: the grading element,
    five elements of degree -1, five of degree 1 and the ten of the
    middle block.
    """
    basis = [("alpha", _so34_alpha())]
    basis += [(f"X{i + 1}", _so34_lower(i)) for i in range(5)]
    basis += [(f"Z{i + 1}", _so34_upper(i)) for i in range(5)]
    basis += [(f"A{p + 1}{q + 1}", _so34_middle(p, q)) for p, q in combinations(range(5), 2)]
    return tuple(basis)


def so34_basis() -> list[LieElt]:
    return [element for _, element in so34_named_basis()]


def g2_matrix(
    *,
    A: Sequence[Sequence[AlgScalar | int]] = ((0, 0), (0, 0)),
    X: Sequence[AlgScalar | int] = (0, 0),
    Y: Sequence[AlgScalar | int] = (0, 0),
    Z: Sequence[AlgScalar | int] = (0, 0),
    W: Sequence[AlgScalar | int] = (0, 0),
    r: AlgScalar | int = 0,
    s: AlgScalar | int = 0,
) -> LieElt:
    """The element of g2 with the given block parameters."""
    a = [[AlgScalar.coerce(v) for v in row] for row in A]
    x1, x2 = (AlgScalar.coerce(v) for v in X)
    y1, y2 = (AlgScalar.coerce(v) for v in Y)
    z1, z2 = (AlgScalar.coerce(v) for v in Z)
    w1, w2 = (AlgScalar.coerce(v) for v in W)
    r = AlgScalar.coerce(r)
    s = AlgScalar.coerce(s)
    trace = a[0][0] + a[1][1]
    m = [[AlgScalar(0)] * SEVEN for _ in range(SEVEN)]

    m[0][0] = trace
    m[0][1], m[0][2], m[0][3], m[0][4], m[0][5] = z1, z2, s, w1, w2

    m[1][0], m[2][0] = x1, x2
    m[1][1], m[1][2], m[2][1], m[2][2] = a[0][0], a[0][1], a[1][0], a[1][1]
    m[1][3], m[2][3] = -SQRT2 * z2, SQRT2 * z1
    m[1][5], m[2][4] = -s / SQRT2, s / SQRT2
    m[1][6], m[2][6] = -w1, -w2

    m[3][0] = r
    m[3][1], m[3][2] = -SQRT2 * x2, SQRT2 * x1
    m[3][4], m[3][5] = -SQRT2 * z2, SQRT2 * z1
    m[3][6] = s

    m[4][0], m[5][0] = y1, y2
    m[4][2], m[5][1] = r / SQRT2, -r / SQRT2
    m[4][3], m[5][3] = -SQRT2 * x2, SQRT2 * x1
    m[4][4], m[4][5], m[5][4], m[5][5] = -a[0][0], -a[1][0], -a[0][1], -a[1][1]
    m[4][6], m[5][6] = -z1, -z2

    m[6][1], m[6][2] = -y1, -y2
    m[6][3] = r
    m[6][4], m[6][5] = -x1, -x2
    m[6][6] = -trace
    return LieElt(m)


def _unit_pair(index: int) -> tuple[int, int]:
    return (1, 0) if index == 0 else (0, 1)


# Generator name -> (degree, keyword arguments of g2_matrix).
G2_GENERATORS: dict[str, tuple[int, dict]] = {
    "Y1": (-3, {"Y": (1, 0)}),
    "Y2": (-3, {"Y": (0, 1)}),
    "r": (-2, {"r": 1}),
    "X1": (-1, {"X": (1, 0)}),
    "X2": (-1, {"X": (0, 1)}),
    "A11": (0, {"A": ((1, 0), (0, 0))}),
    "A12": (0, {"A": ((0, 1), (0, 0))}),
    "A21": (0, {"A": ((0, 0), (1, 0))}),
    "A22": (0, {"A": ((0, 0), (0, 1))}),
    "Z1": (1, {"Z": (1, 0)}),
    "Z2": (1, {"Z": (0, 1)}),
    "s": (2, {"s": 1}),
    "W1": (3, {"W": (1, 0)}),
    "W2": (3, {"W": (0, 1)}),
}


@lru_cache(maxsize=None)
def g2_named_basis() -> tuple[tuple[str, LieElt], ...]:
    return tuple((name, g2_matrix(**kwargs)) for name, (_, kwargs) in G2_GENERATORS.items())


def g2_basis() -> list[LieElt]:
    return [element for _, element in g2_named_basis()]


class ThreeForm7:
    """
    Antisymmetric trilinear form on R^7, stored on strictly increasing
    index triples.
    """

    __slots__ = ("_components",)

    def __init__(self, components: Mapping[tuple[int, int, int], AlgScalar | int] = None) -> None:
        stored: dict[tuple[int, int, int], AlgScalar] = {}
        for triple, value in (components or {}).items():
            if len(set(triple)) != 3 or not all(0 <= i < SEVEN for i in triple):
                raise ValueError(f"'{triple}' is not a triple of distinct indices in 0..6")
            key = tuple(sorted(triple))
            value = AlgScalar.coerce(value) * _permutation_sign(triple)
            total = stored.get(key, AlgScalar(0)) + value
            if total:
                stored[key] = total
            else:
                stored.pop(key, None)
        self._components = stored

    @property
    def components(self) -> dict[tuple[int, int, int], AlgScalar]:
        return dict(self._components)

    def __getitem__(self, triple: tuple[int, int, int]) -> AlgScalar:
        if len(set(triple)) != 3:
            return AlgScalar(0)
        value = self._components.get(tuple(sorted(triple)))
        if value is None:
            return AlgScalar(0)
        return value * _permutation_sign(triple)

    @property
    def is_zero(self) -> bool:
        return not self._components

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ThreeForm7):
            return NotImplemented
        return self._components == other._components

    def __add__(self, other: ThreeForm7) -> ThreeForm7:
        merged = dict(self._components)
        for key, value in other._components.items():
            merged[key] = merged.get(key, AlgScalar(0)) + value
        return ThreeForm7(merged)

    def scale(self, factor: AlgScalar | int) -> ThreeForm7:
        factor = AlgScalar.coerce(factor)
        return ThreeForm7({key: value * factor for key, value in self._components.items()})

    def insert(self, vector: Sequence[AlgScalar | int]) -> list[list[AlgScalar]]:
        """(i_v Psi)_jk = sum_i v_i Psi_ijk, as a 7x7 antisymmetric array."""
        result = [[AlgScalar(0)] * SEVEN for _ in range(SEVEN)]
        for (i, j, k), value in self._components.items():
            for p, q, t in permutations((i, j, k)):
                coefficient = AlgScalar.coerce(vector[p])
                if coefficient:
                    result[q][t] = result[q][t] + coefficient * value * _permutation_sign((p, q, t))
        return result

    def derivation(self, element: LieElt) -> ThreeForm7:
        """(M.Psi)(e_i, e_j, e_k) = Psi(Me_i, e_j, e_k) + Psi(e_i, Me_j, e_k) + Psi(e_i, e_j, Me_k)."""
        result = {}
        for i, j, k in combinations(range(SEVEN), 3):
            total = AlgScalar(0)
            for l in range(SEVEN):
                for coefficient, triple in (
                    (element[l, i], (l, j, k)),
                    (element[l, j], (i, l, k)),
                    (element[l, k], (i, j, l)),
                ):
                    if coefficient:
                        value = self[triple]
                        if value:
                            total = total + coefficient * value
            if total:
                result[(i, j, k)] = total
        return ThreeForm7(result)

    def annihilated_by(self, element: LieElt) -> bool:
        return self.derivation(element).is_zero


def three_form_phi() -> ThreeForm7:
    return ThreeForm7(
        {
            (1, 2, 6): -PHI_A,
            (1, 3, 4): -PHI_B,
            (2, 3, 5): -PHI_B,
            (0, 3, 6): PHI_B,
            (0, 4, 5): -PHI_A,
        }
    )


PHI = three_form_phi()


@lru_cache(maxsize=None)
def _seven_partitions() -> tuple[tuple[tuple[int, int], tuple[int, int], tuple[int, int, int], int], ...]:
    # ordered splittings of 0..6 into increasing blocks of sizes 2, 2, 3 with their signs
    partitions = []
    everything = set(range(SEVEN))
    for first in combinations(range(SEVEN), 2):
        rest = sorted(everything - set(first))
        for second in combinations(rest, 2):
            third = tuple(sorted(set(rest) - set(second)))
            sign = _permutation_sign(first + second + third)
            partitions.append((first, second, third, sign))
    return tuple(partitions)


class ThreeFormPairing:
    """
    The symmetric pairing b(X, Y) e1^...^e7 = i_X Psi ^ i_Y Psi ^ Psi and
    the bilinear form H derived from it.

    H is normalized against the coordinate volume e1^...^e7, which is the
    volume of h; so H equals b whenever b is nondegenerate. For a degenerate
    b, 'form' is None and 'degenerate' is set.
    """

    def __init__(self, *, pairing: list[list[AlgScalar]], determinant: AlgScalar) -> None:
        self.pairing = pairing
        self.determinant = determinant
        self.degenerate = not determinant
        self.form = None if self.degenerate else LieElt(pairing)


def bilinear_from_threeform(psi: ThreeForm7) -> ThreeFormPairing:
    insertions = [psi.insert([1 if i == j else 0 for i in range(SEVEN)]) for j in range(SEVEN)]
    pairing = [[AlgScalar(0)] * SEVEN for _ in range(SEVEN)]
    for x in range(SEVEN):
        for y in range(x, SEVEN):
            alpha, beta = insertions[x], insertions[y]
            total = AlgScalar(0)
            for first, second, third, sign in _seven_partitions():
                a = alpha[first[0]][first[1]]
                if not a:
                    continue
                b = beta[second[0]][second[1]]
                if not b:
                    continue
                c = psi[third]
                if c:
                    total = total + a * b * c * sign
            pairing[x][y] = pairing[y][x] = total
    determinant, _ = determinant_and_adjugate(pairing)
    logger.debug("three-form pairing determinant %s", determinant.render())
    return ThreeFormPairing(pairing=pairing, determinant=determinant)


class GradedDecomp:
    """
    Basis of a graded matrix Lie algebra split by degree. 'components' maps
    each degree to its (name, element) pairs.
    """

    def __init__(self, *, named_basis: Iterable[tuple[str, LieElt]], grading: Sequence[int]) -> None:
        self.grading = tuple(grading)
        self.components: dict[int, list[tuple[str, LieElt]]] = {}
        for name, element in named_basis:
            degrees = element.degrees(self.grading)
            if len(degrees) != 1:
                raise ValueError(f"Basis element '{name}' is not homogeneous")
            self.components.setdefault(degrees.pop(), []).append((name, element))
        self.depth = max(abs(degree) for degree in self.components)

    def component(self, degree: int) -> list[LieElt]:
        return [element for _, element in self.components.get(degree, [])]

    def names(self, degree: int) -> list[str]:
        return [name for name, _ in self.components.get(degree, [])]

    @property
    def dimensions(self) -> tuple[int, ...]:
        return tuple(
            len(self.components.get(degree, [])) for degree in range(-self.depth, self.depth + 1)
        )

    @property
    def negative(self) -> list[LieElt]:
        return [e for degree in range(-self.depth, 0) for e in self.component(degree)]

    @property
    def parabolic(self) -> list[LieElt]:
        return [e for degree in range(0, self.depth + 1) for e in self.component(degree)]

    @property
    def nilradical(self) -> list[LieElt]:
        return [e for degree in range(1, self.depth + 1) for e in self.component(degree)]

    def bracket_respects_grading(self) -> bool:
        for i, left in self.components.items():
            for j, right in self.components.items():
                for _, a in left:
                    for _, b in right:
                        bracket = a.bracket(b)
                        if bracket.is_zero:
                            continue
                        if abs(i + j) > self.depth or bracket.degrees(self.grading) != {i + j}:
                            return False
        return True


@lru_cache(maxsize=None)
def g2_graded() -> GradedDecomp:
    return GradedDecomp(named_basis=g2_named_basis(), grading=G2_GRADING)


@lru_cache(maxsize=None)
def so34_graded() -> GradedDecomp:
    return GradedDecomp(named_basis=so34_named_basis(), grading=CONFORMAL_GRADING)


@lru_cache(maxsize=None)
def _g2_solver() -> SpanSolver:
    return SpanSolver([element.vectorize() for element in g2_basis()], SEVEN * SEVEN)


def expand_in_basis(element: LieElt, basis: Sequence[LieElt]) -> list[AlgScalar] | None:
    """Exact coordinates of element in the given basis, or None outside its span."""
    if list(basis) == g2_basis():
        solver = _g2_solver()
    else:
        solver = SpanSolver([b.vectorize() for b in basis], SEVEN * SEVEN)
    return solver.coordinates(element.vectorize())


def in_g2(element: LieElt) -> bool:
    return _g2_solver().contains(element.vectorize())


def grading_decompose(element: LieElt) -> dict[int, LieElt]:
    """Split an element of g2 into its components g_-3 .. g_3."""
    if not in_g2(element):
        raise ValueError(f"{element!r} does not lie in g2")
    return {degree: element.degree_part(G2_GRADING, degree) for degree in range(-3, 4)}


def phi_annihilator() -> list[LieElt]:
    """Exact kernel of M -> M.Phi on so(h), as combinations of so34_basis()."""
    basis = so34_basis()
    columns = []
    for element in basis:
        image = PHI.derivation(element).components
        columns.append(
            {
                index: image[triple]
                for index, triple in enumerate(combinations(range(SEVEN), 3))
                if triple in image
            }
        )
    rows: dict[int, dict[int, AlgScalar]] = {}
    for col, column in enumerate(columns):
        for row, value in column.items():
            rows.setdefault(row, {})[col] = value
    kernel = nullspace(rows.values(), len(basis))
    logger.debug("annihilator of Phi in so(h): dimension %d", len(kernel))
    return [_combine(basis, vector) for vector in kernel]


def _combine(basis: Sequence[LieElt], coefficients: Mapping[int, AlgScalar]) -> LieElt:
    total = LieElt.zero()
    for index, value in coefficients.items():
        total = total + basis[index].scale(value)
    return total


def span_rank(elements: Iterable[LieElt]) -> int:
    return rank(element.vectorize() for element in elements)


def iphi_forward(element: LieElt) -> list[AlgScalar]:
    """so(h) -> R^7: contract the bivector Mh into Phi and lower with h."""
    bivector = element @ H
    u = [AlgScalar(0)] * SEVEN
    for (i, j, k), value in PHI.components.items():
        for p, q, t in permutations((i, j, k)):
            entry = bivector[p, q]
            if entry:
                u[t] = u[t] + entry * value * _permutation_sign((p, q, t))
    return H.apply(u)


def iphi_reverse(vector: Sequence[AlgScalar | int]) -> LieElt:
    """R^7 -> so(h): M = h (i_v Phi)."""
    return H @ LieElt(PHI.insert(vector))


@lru_cache(maxsize=None)
def double_insertion_multiple() -> AlgScalar:
    """The scalar c with iphi_forward(iphi_reverse(v)) = c v for every v."""
    multiple = None
    for index in range(SEVEN):
        unit = [1 if i == index else 0 for i in range(SEVEN)]
        image = iphi_forward(iphi_reverse(unit))
        if any(value for i, value in enumerate(image) if i != index):
            raise RuntimeError(f"Double insertion does not preserve the line of e{index + 1}")
        if multiple is None:
            multiple = image[index]
        elif image[index] != multiple:
            raise RuntimeError("Double insertion is not a multiple of the identity")
    if not multiple:
        raise RuntimeError("Double insertion vanishes")
    return multiple


def iphi_split(element: LieElt) -> tuple[LieElt, list[AlgScalar]]:
    """
    Decompose M in so(h) = g2 + R^7. Returns the g2 part and the vector v
    with M = g2 part + iphi_reverse(v).
    """
    if not preserves_metric(element):
        raise ValueError(f"{element!r} does not lie in so(h)")
    factor = double_insertion_multiple()
    vector = [value / factor for value in iphi_forward(element)]
    return element - iphi_reverse(vector), vector


def split_equivariance_holds(generator: LieElt, element: LieElt) -> bool:
    """First order G2-equivariance of iphi_split along generator in g2."""
    g2_part, vector = iphi_split(element)
    moved_part, moved_vector = iphi_split(generator.bracket(element))
    return moved_part == generator.bracket(g2_part) and moved_vector == generator.apply(vector)
