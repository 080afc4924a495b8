from fractions import Fraction
from unittest import TestCase

from hypothesis import given, settings
from hypothesis import strategies as st

from g2conformal.linalg import (
    SpanSolver,
    dense_to_sparse,
    determinant_and_adjugate,
    inertia,
    nullspace,
    rank,
    rational_determinant_and_adjugate,
)
from g2conformal.scalars.algscalar import AlgScalar
from g2conformal.scalars.ratfn import COORDINATES, RatFn

x1, x2, x3, x4, x5 = COORDINATES
SQRT2 = AlgScalar.sqrt2()


def _matrix(rows):
    return [[AlgScalar.coerce(value) for value in row] for row in rows]


def _apply(row, vector):
    total = AlgScalar(0)
    for col, value in row.items():
        if col in vector:
            total = total + value * vector[col]
    return total


entries = st.integers(min_value=-4, max_value=4).map(AlgScalar)
square_matrices = st.integers(min_value=1, max_value=4).flatmap(
    lambda n: st.lists(st.lists(entries, min_size=n, max_size=n), min_size=n, max_size=n)
)


class TestRankAndKernel(TestCase):
    def test_rank(self):
        rows = [dense_to_sparse(row) for row in _matrix([[1, 2, 3], [2, 4, 6], [0, 1, SQRT2]])]
        self.assertEqual(rank(rows), 2)
        self.assertEqual(rank([]), 0)

    def test_nullspace_vectors_are_annihilated(self):
        rows = [dense_to_sparse(row) for row in _matrix([[1, 2, 3, 4], [0, 1, SQRT2, 0]])]
        kernel = nullspace(rows, 4)
        self.assertEqual(len(kernel), 2)
        for vector in kernel:
            for row in rows:
                self.assertFalse(_apply(row, vector))

    def test_rational_function_entries(self):
        rows = [{0: x1, 1: x2}, {0: x1 * x3, 1: x2 * x3}]
        self.assertEqual(rank(rows), 1)
        (vector,) = nullspace(rows, 2)
        self.assertEqual(vector.get(0, RatFn.zero()) * x1 + vector.get(1, RatFn.zero()) * x2, 0)

    def test_span_solver(self):
        basis = [dense_to_sparse(row) for row in _matrix([[1, 0, 1], [0, 1, 1], [1, 1, 2]])]
        solver = SpanSolver(basis, 3)
        self.assertEqual(solver.rank, 2)
        coordinates = solver.coordinates(dense_to_sparse(_matrix([[2, 3, 5]])[0]))
        self.assertIsNotNone(coordinates)
        total = [AlgScalar(0)] * 3
        for coefficient, vector in zip(coordinates, basis):
            for col, value in vector.items():
                total[col] = total[col] + value * coefficient
        self.assertEqual(total, [2, 3, 5])
        self.assertIsNone(solver.coordinates({0: AlgScalar(1)}))


class TestDeterminants(TestCase):
    def test_two_by_two(self):
        det, adjugate = determinant_and_adjugate(_matrix([[1, 2], [3, 4]]))
        self.assertEqual(det, -2)
        self.assertEqual(adjugate, _matrix([[4, -2], [-3, 1]]))

    def test_polynomial_entries(self):
        matrix = [[x1, RatFn.one()], [RatFn.one(), RatFn.zero()]]
        det, _ = determinant_and_adjugate(matrix)
        self.assertEqual(det, -1)

    @given(square_matrices)
    @settings(max_examples=40, deadline=None)
    def test_adjugate_identity(self, matrix):
        det, adjugate = determinant_and_adjugate(matrix)
        n = len(matrix)
        for i in range(n):
            for j in range(n):
                value = sum((matrix[i][k] * adjugate[k][j] for k in range(n)), AlgScalar(0))
                self.assertEqual(value, det if i == j else 0)


class TestRationalDeterminants(TestCase):
    def test_polynomial_entries(self):
        det, adjugate = rational_determinant_and_adjugate([[x1, RatFn.one()], [RatFn.one(), RatFn.zero()]])
        self.assertEqual(det, -1)
        self.assertEqual(adjugate, [[RatFn.zero(), -RatFn.one()], [-RatFn.one(), x1]])

    def test_denominators(self):
        matrix = [[1 / x1, x2], [x2, x1]]
        det, adjugate = rational_determinant_and_adjugate(matrix)
        self.assertEqual(det, 1 - x2 * x2)
        self.assertEqual(adjugate, [[x1, -x2], [-x2, 1 / x1]])

    def test_adjugate_identity(self):
        matrix = [
            [x1 * SQRT2, 1 / (x2 + 1), RatFn.zero()],
            [x3, RatFn.one(), x1 / x3],
            [RatFn.one(), x4 * x4, SQRT2 / 3 + x5],
        ]
        det, adjugate = rational_determinant_and_adjugate(matrix)
        self.assertFalse(det.is_zero)
        for i in range(3):
            for j in range(3):
                value = sum((matrix[i][k] * adjugate[k][j] for k in range(3)), RatFn.zero())
                self.assertEqual(value, det if i == j else 0)


class TestInertia(TestCase):
    def test_split_signature(self):
        flat = _matrix(
            [
                [0, 0, 0, 1, 0],
                [0, 0, 0, 0, 1],
                [0, 0, -1, 0, 0],
                [1, 0, 0, 0, 0],
                [0, 1, 0, 0, 0],
            ]
        )
        self.assertEqual(inertia(flat), (2, 3, 0))

    def test_degenerate(self):
        self.assertEqual(inertia(_matrix([[1, 1], [1, 1]])), (1, 0, 1))
        self.assertEqual(inertia(_matrix([[Fraction(1, 2), 0], [0, -SQRT2]])), (1, 1, 0))
