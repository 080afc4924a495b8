from __future__ import annotations

from functools import lru_cache
from itertools import permutations, product
from math import factorial
from typing import Callable, Iterable, Sequence

from g2conformal.constants import DIMENSION
from g2conformal.exceptions import ArityError
from g2conformal.scalars.algscalar import AlgScalar
from g2conformal.scalars.ratfn import RatFn

COVARIANT = "d"
CONTRAVARIANT = "u"

Index = tuple[int, ...]


@lru_cache(maxsize=None)
def index_tuples(rank: int) -> tuple[Index, ...]:
    return tuple(product(range(DIMENSION), repeat=rank))


def offset_of(index: Index) -> int:
    position = 0
    for i in index:
        position = position * DIMENSION + i
    return position


@lru_cache(maxsize=None)
def _signed_permutations(size: int) -> tuple[tuple[tuple[int, ...], int], ...]:
    result = []
    for perm in permutations(range(size)):
        inversions = sum(1 for i in range(size) for j in range(i + 1, size) if perm[i] > perm[j])
        result.append((perm, -1 if inversions % 2 else 1))
    return tuple(result)


class TensorField:
    """
    Dense tensor field on the 5-dimensional chart. 'variance' has one
    letter per index, 'u' for contravariant and 'd' for covariant; 'weight'
    is the conformal weight tag of the density factor, trivialized in the
    current scale. Components are RatFn, stored in row-major index order.
    """

    __slots__ = ("variance", "weight", "_comps")

    def __init__(self, *, variance: str, comps: Sequence[RatFn | AlgScalar | int], weight: int = 0) -> None:
        if any(kind not in (COVARIANT, CONTRAVARIANT) for kind in variance):
            raise ArityError(f"Variance '{variance}' may only contain 'u' and 'd'")
        if len(comps) != DIMENSION ** len(variance):
            raise ArityError(
                f"A tensor with variance '{variance}' needs {DIMENSION ** len(variance)} "
                f"components, got {len(comps)}"
            )
        self.variance = variance
        self.weight = weight
        self._comps = tuple(RatFn.coerce(value) for value in comps)

    @classmethod
    def zeros(cls, variance: str, weight: int = 0) -> TensorField:
        return cls(variance=variance, comps=[RatFn.zero()] * DIMENSION ** len(variance), weight=weight)

    @classmethod
    def scalar(cls, value: RatFn | AlgScalar | int, weight: int = 0) -> TensorField:
        return cls(variance="", comps=[value], weight=weight)

    @classmethod
    def from_function(
        cls, variance: str, function: Callable[[Index], RatFn | AlgScalar | int], weight: int = 0
    ) -> TensorField:
        return cls(
            variance=variance,
            comps=[function(index) for index in index_tuples(len(variance))],
            weight=weight,
        )

    @classmethod
    def from_entries(cls, variance: str, entries: dict[Index, RatFn], weight: int = 0) -> TensorField:
        comps = [RatFn.zero()] * DIMENSION ** len(variance)
        for index, value in entries.items():
            comps[offset_of(index)] = RatFn.coerce(value)
        return cls(variance=variance, comps=comps, weight=weight)

    @property
    def rank(self) -> int:
        return len(self.variance)

    @property
    def comps(self) -> tuple[RatFn, ...]:
        return self._comps

    def __getitem__(self, index: Index | int) -> RatFn:
        if isinstance(index, int):
            index = (index,)
        if len(index) != self.rank:
            raise ArityError(f"Index {index} does not match rank {self.rank}")
        return self._comps[offset_of(index)]

    def items(self) -> Iterable[tuple[Index, RatFn]]:
        return zip(index_tuples(self.rank), self._comps)

    def nonzero_items(self) -> list[tuple[Index, RatFn]]:
        return [(index, value) for index, value in self.items() if value]

    @property
    def is_zero(self) -> bool:
        return not any(self._comps)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TensorField):
            return NotImplemented
        return (
            self.variance == other.variance
            and self.weight == other.weight
            and all(a == b for a, b in zip(self._comps, other._comps))
        )

    __hash__ = None

    def __repr__(self) -> str:
        return f"TensorField(variance={self.variance!r}, weight={self.weight}, nonzero={len(self.nonzero_items())})"

    def _check_same_type(self, other: TensorField) -> None:
        if self.variance != other.variance:
            raise TypeError(f"Variance mismatch: '{self.variance}' and '{other.variance}'")
        if self.weight != other.weight:
            raise TypeError(f"Weight mismatch: {self.weight} and {other.weight}")

    def __add__(self, other: TensorField) -> TensorField:
        if not isinstance(other, TensorField):
            return NotImplemented
        self._check_same_type(other)
        return TensorField(
            variance=self.variance,
            comps=[a + b for a, b in zip(self._comps, other._comps)],
            weight=self.weight,
        )

    def __sub__(self, other: TensorField) -> TensorField:
        if not isinstance(other, TensorField):
            return NotImplemented
        self._check_same_type(other)
        return TensorField(
            variance=self.variance,
            comps=[a - b for a, b in zip(self._comps, other._comps)],
            weight=self.weight,
        )

    def __neg__(self) -> TensorField:
        return TensorField(variance=self.variance, comps=[-a for a in self._comps], weight=self.weight)

    def scale(self, factor: RatFn | AlgScalar | int, weight: int = 0) -> TensorField:
        """Multiply by a function; 'weight' is the weight of that function."""
        factor = RatFn.coerce(factor)
        return TensorField(
            variance=self.variance,
            comps=[a * factor if a else a for a in self._comps],
            weight=self.weight + weight,
        )

    def map(self, function: Callable[[RatFn], RatFn]) -> TensorField:
        return TensorField(
            variance=self.variance, comps=[function(a) for a in self._comps], weight=self.weight
        )

    def retag(self, weight: int) -> TensorField:
        return TensorField(variance=self.variance, comps=self._comps, weight=weight)

    def tensor(self, other: TensorField) -> TensorField:
        comps = []
        for a in self._comps:
            for b in other._comps:
                comps.append(a * b if a and b else RatFn.zero())
        return TensorField(
            variance=self.variance + other.variance, comps=comps, weight=self.weight + other.weight
        )

    def _check_positions(self, *positions: int) -> None:
        if len(set(positions)) != len(positions):
            raise ArityError(f"Repeated index positions {positions}")
        for position in positions:
            if not 0 <= position < self.rank:
                raise ArityError(f"Index position {position} is outside rank {self.rank}")

    def contract(self, first: int, second: int) -> TensorField:
        """Trace over one covariant and one contravariant slot."""
        self._check_positions(first, second)
        if self.variance[first] == self.variance[second]:
            raise ArityError(
                f"Slots {first} and {second} are both '{self.variance[first]}'; "
                "contract with the metric instead"
            )
        low, high = sorted((first, second))
        variance = self.variance[:low] + self.variance[low + 1 : high] + self.variance[high + 1 :]
        comps = []
        for index in index_tuples(len(variance)):
            total = RatFn.zero()
            for i in range(DIMENSION):
                full = index[:low] + (i,) + index[low : high - 1] + (i,) + index[high - 1 :]
                value = self._comps[offset_of(full)]
                if value:
                    total = total + value
            comps.append(total)
        return TensorField(variance=variance, comps=comps, weight=self.weight)

    def transpose(self, order: Sequence[int]) -> TensorField:
        """Reorder slots: slot j of the result is slot order[j] of self."""
        if sorted(order) != list(range(self.rank)):
            raise ArityError(f"'{order}' is not a permutation of the slots")
        variance = "".join(self.variance[position] for position in order)
        comps = []
        for index in index_tuples(self.rank):
            source = [0] * self.rank
            for j, position in enumerate(order):
                source[position] = index[j]
            comps.append(self._comps[offset_of(tuple(source))])
        return TensorField(variance=variance, comps=comps, weight=self.weight)

    def _symmetrize(self, positions: Sequence[int] | None, signed: bool) -> TensorField:
        positions = list(range(self.rank)) if positions is None else list(positions)
        self._check_positions(*positions)
        if len({self.variance[p] for p in positions}) > 1:
            raise ArityError("Cannot (anti)symmetrize slots of different variance")
        if len(positions) < 2:
            return self
        perms = _signed_permutations(len(positions))
        norm = factorial(len(positions))
        comps = []
        for index in index_tuples(self.rank):
            if signed and len({index[p] for p in positions}) < len(positions):
                comps.append(RatFn.zero())
                continue
            total = RatFn.zero()
            for perm, sign in perms:
                source = list(index)
                for target, p in zip(positions, perm):
                    source[target] = index[positions[p]]
                value = self._comps[offset_of(tuple(source))]
                if not value:
                    continue
                total = total - value if signed and sign < 0 else total + value
            comps.append(total / norm if total else total)
        return TensorField(variance=self.variance, comps=comps, weight=self.weight)

    def alt(self, positions: Sequence[int] | None = None) -> TensorField:
        """Alternation over the given slots (all slots by default)."""
        return self._symmetrize(positions, signed=True)

    def sym(self, positions: Sequence[int] | None = None) -> TensorField:
        return self._symmetrize(positions, signed=False)

    def wedge(self, other: TensorField) -> TensorField:
        """(k+l)!/(k!l!) alt(self (x) other) for forms of degree k and l."""
        if set(self.variance + other.variance) - {COVARIANT}:
            raise ArityError("The wedge product takes covariant forms")
        k, l = self.rank, other.rank
        if k + l > DIMENSION:
            return TensorField.zeros(COVARIANT * (k + l), self.weight + other.weight)
        factor = factorial(k + l) // (factorial(k) * factorial(l))
        product_form = self.tensor(other).alt()
        return product_form.scale(factor) if factor != 1 else product_form

    def is_antisymmetric(self) -> bool:
        return self.alt() == self

    def is_symmetric(self) -> bool:
        return self.sym() == self

    def partial(self) -> TensorField:
        """Coordinate derivative, the new covariant index first."""
        comps = []
        for var in range(1, DIMENSION + 1):
            comps.extend(value.diff(var) if value else value for value in self._comps)
        return TensorField(variance=COVARIANT + self.variance, comps=comps, weight=self.weight)

    def evaluate(self, point: Sequence[AlgScalar | int]) -> list[AlgScalar]:
        return [value.evaluate(point) if value else AlgScalar(0) for value in self._comps]

    def vanishes_at(self, point: Sequence[AlgScalar | int]) -> bool:
        return not any(self.evaluate(point))


def kronecker() -> TensorField:
    """The identity (1,1)-tensor delta^a_b."""
    return TensorField.from_function("ud", lambda index: 1 if index[0] == index[1] else 0)


def constant_ratio(numerator: TensorField, denominator: TensorField) -> AlgScalar | None:
    """
    The constant l with numerator = l * denominator, or None when the two
    are not proportional by a constant (or the denominator vanishes).
    """
    if numerator.variance != denominator.variance:
        raise ArityError(f"Variance mismatch: '{numerator.variance}' and '{denominator.variance}'")
    factor = None
    for left, right in zip(numerator.comps, denominator.comps):
        if not right:
            if left:
                return None
            continue
        ratio = left / right
        if not ratio.is_constant:
            return None
        ratio = ratio.constant_value()
        if factor is None:
            factor = ratio
        elif factor != ratio:
            return None
    return factor
