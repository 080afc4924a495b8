"""
Exact sparse linear algebra over any field whose elements support
+, -, *, / and truthiness (AlgScalar and RatFn both do).

Rows and vectors are dicts {column: value} without zero entries.
"""
from __future__ import annotations

import logging
from itertools import combinations
from typing import Any, Iterable, Sequence

from sympy.polys.matrices import DomainMatrix

from g2conformal.scalars.poly import RING, PolyQ
from g2conformal.scalars.ratfn import RatFn

logger = logging.getLogger(__name__)

SparseRow = dict[int, Any]


def _pivot_preference(value: Any) -> int:
    # constant entries keep denominators out of the reduced rows
    return 0 if getattr(value, "is_constant", True) else 1


def _axpy(target: SparseRow, scale: Any, source: SparseRow) -> None:
    """target -= scale * source, in place, dropping zeros."""
    for col, value in source.items():
        updated = target.get(col)
        product = scale * value
        if updated is None:
            if product:
                target[col] = -product
            continue
        updated = updated - product
        if updated:
            target[col] = updated
        else:
            del target[col]


class RowReducer:
    """
    Incremental reduced row echelon form. Every stored row has a pivot
    entry equal to 1, and no other stored row has an entry in that column.

    'pivot_limit' restricts pivots to columns below it; columns at or
    above it are carried along as tags (used to track row combinations).
    """

    def __init__(self, *, pivot_limit: int | None = None) -> None:
        self.pivot_limit = pivot_limit
        self.rows: dict[int, SparseRow] = {}

    @property
    def rank(self) -> int:
        return len(self.rows)

    @property
    def pivots(self) -> list[int]:
        return sorted(self.rows)

    def reduce(self, row: SparseRow) -> SparseRow:
        reduced = dict((col, value) for col, value in row.items() if value)
        for col in [c for c in reduced if c in self.rows]:
            value = reduced.get(col)
            if value:
                _axpy(reduced, value, self.rows[col])
        return reduced

    def _choose_pivot(self, row: SparseRow) -> int | None:
        candidates = [
            col for col in row if self.pivot_limit is None or col < self.pivot_limit
        ]
        if not candidates:
            return None
        return min(candidates, key=lambda col: (_pivot_preference(row[col]), col))

    def add_row(self, row: SparseRow) -> bool:
        """Add a row; return True when it increased the rank."""
        reduced = self.reduce(row)
        pivot = self._choose_pivot(reduced)
        if pivot is None:
            return False
        inverse = 1 / reduced[pivot]
        reduced = {col: value * inverse for col, value in reduced.items()}
        for other in self.rows.values():
            value = other.get(pivot)
            if value:
                _axpy(other, value, reduced)
        self.rows[pivot] = reduced
        return True

    def add_rows(self, rows: Iterable[SparseRow]) -> int:
        return sum(1 for row in rows if self.add_row(row))

    def contains(self, row: SparseRow) -> bool:
        reduced = self.reduce(row)
        if self.pivot_limit is None:
            return not reduced
        return not any(col < self.pivot_limit for col in reduced)

    def nullspace(self, ncols: int) -> list[SparseRow]:
        """Basis of {v : row . v = 0 for every stored row}, one vector per free column."""
        basis = []
        for free in range(ncols):
            if free in self.rows:
                continue
            vector = {free: self._one_like()}
            for pivot, row in self.rows.items():
                value = row.get(free)
                if value:
                    vector[pivot] = -value
            basis.append(vector)
        return basis

    def _one_like(self) -> Any:
        for row in self.rows.values():
            for value in row.values():
                return value / value
        return 1


def rank(rows: Iterable[SparseRow]) -> int:
    reducer = RowReducer()
    return reducer.add_rows(rows)


def nullspace(rows: Iterable[SparseRow], ncols: int) -> list[SparseRow]:
    reducer = RowReducer()
    reducer.add_rows(rows)
    logger.debug("nullspace: %d columns, rank %d", ncols, reducer.rank)
    return reducer.nullspace(ncols)


def dense_to_sparse(vector: Sequence[Any]) -> SparseRow:
    return {col: value for col, value in enumerate(vector) if value}


def transpose_rows(columns: Sequence[SparseRow]) -> list[SparseRow]:
    rows: dict[int, SparseRow] = {}
    for col, column in enumerate(columns):
        for row_index, value in column.items():
            rows.setdefault(row_index, {})[col] = value
    return [rows[key] for key in sorted(rows)]


class SpanSolver:
    """
    Expresses vectors in terms of a fixed list of basis vectors. Basis
    vector i is stored with a tag column at offset + i, so reducing a
    target leaves minus its coordinates in the tag columns.
    """

    def __init__(self, basis: Sequence[SparseRow], width: int) -> None:
        self.width = width
        self.size = len(basis)
        self.reducer = RowReducer(pivot_limit=width)
        self.independent = []
        for index, vector in enumerate(basis):
            tagged = dict(vector)
            tagged[width + index] = 1
            if self.reducer.add_row(tagged):
                self.independent.append(index)

    @property
    def rank(self) -> int:
        return self.reducer.rank

    def contains(self, target: SparseRow) -> bool:
        return self.reducer.contains(target)

    def coordinates(self, target: SparseRow) -> list[Any] | None:
        reduced = self.reducer.reduce(target)
        if any(col < self.width for col in reduced):
            return None
        coords = [0] * self.size
        for col, value in reduced.items():
            coords[col - self.width] = -value
        return coords


def minors(matrix: Sequence[Sequence[Any]]) -> dict[tuple[tuple[int, ...], tuple[int, ...]], Any]:
    """
    All square minors of a square matrix by Laplace expansion along the
    first selected row, memoized on (rows, cols). No division is needed, so
    polynomial entries give polynomial minors.
    """
    n = len(matrix)
    table: dict[tuple[tuple[int, ...], tuple[int, ...]], Any] = {}
    for size in range(1, n + 1):
        for rows in combinations(range(n), size):
            first, rest = rows[0], rows[1:]
            for cols in combinations(range(n), size):
                if size == 1:
                    table[(rows, cols)] = matrix[rows[0]][cols[0]]
                    continue
                total = None
                for position, col in enumerate(cols):
                    entry = matrix[first][col]
                    if not entry:
                        continue
                    sub = table[(rest, cols[:position] + cols[position + 1 :])]
                    if not sub:
                        continue
                    term = entry * sub
                    if position % 2:
                        term = -term
                    total = term if total is None else total + term
                table[(rows, cols)] = total if total is not None else matrix[first][cols[0]] * 0
    return table


def determinant_and_adjugate(matrix: Sequence[Sequence[Any]]) -> tuple[Any, list[list[Any]]]:
    n = len(matrix)
    table = minors(matrix)
    everything = tuple(range(n))
    det = table[(everything, everything)]
    adjugate = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            rows = everything[:j] + everything[j + 1 :]
            cols = everything[:i] + everything[i + 1 :]
            cofactor = table[(rows, cols)] if n > 1 else matrix[0][0] * 0 + 1
            adjugate[i][j] = -cofactor if (i + j) % 2 else cofactor
    return det, adjugate


def rational_determinant_and_adjugate(matrix: Sequence[Sequence[RatFn]]) -> tuple[RatFn, list[list[RatFn]]]:
    """
    det and adjugate of a square matrix of rational functions. The entries
    are brought over one denominator D, and sympy computes the division-free
    adjugate and determinant of the polynomial matrix N = D*M over RING:
    det M = det N / D^n and adj M = adj N / D^(n-1).
    """
    n = len(matrix)
    common: dict[PolyQ, int] = {}
    for row in matrix:
        for entry in row:
            for factor, exponent in entry.den_factors:
                common[factor] = max(common.get(factor, 0), exponent)
    numerators = []
    for row in matrix:
        polys = []
        for entry in row:
            own = dict(entry.den_factors)
            scaled = entry.num
            for factor, exponent in common.items():
                if exponent > own.get(factor, 0):
                    scaled = scaled * factor ** (exponent - own.get(factor, 0))
            polys.append(scaled.poly)
        numerators.append(polys)
    adjugate, det = DomainMatrix(numerators, (n, n), RING.to_domain()).adj_det()
    logger.debug("adjugate of a %dx%d matrix over %d denominator factors", n, n, len(common))
    return (
        RatFn.from_factors(PolyQ.wrap(det), {factor: exponent * n for factor, exponent in common.items()}),
        [
            [
                RatFn.from_factors(PolyQ.wrap(entry), {factor: exponent * (n - 1) for factor, exponent in common.items()})
                for entry in row
            ]
            for row in adjugate.to_list()
        ],
    )


def inertia(matrix: Sequence[Sequence[Any]]) -> tuple[int, int, int]:
    """
    (positive, negative, zero) counts of a symmetric matrix over an ordered
    field, by symmetric elimination. Entries must provide sign().
    """
    a = [list(row) for row in matrix]
    n = len(a)
    positive = negative = 0
    k = 0
    while k < n:
        pivot = next((i for i in range(k, n) if a[i][i]), None)
        if pivot is None:
            pair = next(
                ((i, j) for i in range(k, n) for j in range(i + 1, n) if a[i][j]), None
            )
            if pair is None:
                break
            i, j = pair
            # row/col i += row/col j makes the diagonal entry 2*a[i][j]
            for col in range(n):
                a[i][col] = a[i][col] + a[j][col]
            for row in range(n):
                a[row][i] = a[row][i] + a[row][j]
            pivot = i
        a[k], a[pivot] = a[pivot], a[k]
        for row in a:
            row[k], row[pivot] = row[pivot], row[k]
        head = a[k][k]
        if head.sign() > 0:
            positive += 1
        else:
            negative += 1
        for i in range(k + 1, n):
            factor = a[i][k] / head
            if not factor:
                continue
            for j in range(k, n):
                a[i][j] = a[i][j] - factor * a[k][j]
        for i in range(k + 1, n):
            a[k][i] = a[k][i] * 0
            a[i][k] = a[i][k] * 0
        k += 1
    return positive, negative, n - positive - negative
