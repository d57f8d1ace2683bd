from __future__ import annotations

import math
from typing import Iterable, Iterator, Sequence, Tuple


class Shape:
    """Dimensions (n_1, ..., n_d) of an order-d tensor, d >= 2."""

    __slots__ = ["_dims"]

    _dims: Tuple[int, ...]

    def __init__(self, dims: Iterable[int]):
        dims = tuple(dims)

        if len(dims) < 2:
            raise ValueError(f"Tensor order must be at least 2. Given {dims}")

        for n in dims:
            if not isinstance(n, int) or isinstance(n, bool):  # pyright: ignore
                raise TypeError(f"Dimensions must be int. Given {dims}")
            if n < 1:
                raise ValueError(f"Dimensions must be positive. Given {dims}")

        self._dims = dims

    @property
    def dims(self) -> Tuple[int, ...]:
        return self._dims

    @property
    def order(self) -> int:
        return len(self._dims)

    @property
    def size(self) -> int:
        return math.prod(self._dims)

    def head(self, i: int) -> int:
        """N_i: product of the first i dimensions."""
        self._check_split(i)
        return math.prod(self._dims[:i])

    def tail(self, i: int) -> int:
        """N̄_i: product of the dimensions after the i-th."""
        self._check_split(i)
        return math.prod(self._dims[i:])

    def _check_split(self, i: int):
        if not 0 <= i <= self.order:
            raise IndexError(f"Split {i} out of range for order {self.order}")

    def __getitem__(self, i: int) -> int:
        return self._dims[i]

    def __iter__(self) -> Iterator[int]:
        return iter(self._dims)

    def __len__(self) -> int:
        return len(self._dims)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Shape) and other._dims == self._dims

    def __hash__(self) -> int:
        return hash(self._dims)

    def __repr__(self) -> str:
        return f"Shape{self._dims}"


class RankVector:
    """TT rank (r_1, ..., r_{d-1}). r_0 = r_d = 1 are implicit.

    Zero entries are allowed so that degenerate measurements (e.g. of the
    zero tensor) can be represented; use `is_degenerate` to detect them.
    """

    __slots__ = ["_ranks"]

    _ranks: Tuple[int, ...]

    def __init__(self, ranks: Iterable[int]):
        ranks = tuple(ranks)

        if len(ranks) < 1:
            raise ValueError("Rank vector must have at least one entry")

        for r in ranks:
            if not isinstance(r, int) or isinstance(r, bool):  # pyright: ignore
                raise TypeError(f"Ranks must be int. Given {ranks}")
            if r < 0:
                raise ValueError(f"Ranks must be nonnegative. Given {ranks}")

        self._ranks = ranks

    @property
    def ranks(self) -> Tuple[int, ...]:
        return self._ranks

    @property
    def is_degenerate(self) -> bool:
        return any(r == 0 for r in self._ranks)

    def full(self) -> Tuple[int, ...]:
        """(r_0, r_1, ..., r_{d-1}, r_d) with boundary ranks 1."""
        return (1, *self._ranks, 1)

    def check_feasible(self, shape: Shape) -> None:
        if len(self._ranks) != shape.order - 1:
            raise ValueError(
                f"Rank vector {self._ranks} does not match order "
                f"{shape.order} of {shape}"
            )

        if self.is_degenerate:
            raise ValueError(f"Ranks must be positive. Given {self._ranks}")

        for i, r in enumerate(self._ranks, 1):
            bound = min(shape.head(i), shape.tail(i))
            if r > bound:
                raise ValueError(
                    f"r_{i} = {r} exceeds min(N_{i}, N̄_{i}) = {bound} "
                    f"for {shape}"
                )

    def is_feasible(self, shape: Shape) -> bool:
        try:
            self.check_feasible(shape)
        except ValueError:
            return False
        return True

    def __getitem__(self, i: int) -> int:
        return self._ranks[i]

    def __iter__(self) -> Iterator[int]:
        return iter(self._ranks)

    def __len__(self) -> int:
        return len(self._ranks)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, RankVector) and other._ranks == self._ranks

    def __hash__(self) -> int:
        return hash(self._ranks)

    def __repr__(self) -> str:
        return f"RankVector{self._ranks}"


def as_shape(shape: Shape | Sequence[int]) -> Shape:
    return shape if isinstance(shape, Shape) else Shape(shape)


def as_rank(rank: RankVector | Sequence[int]) -> RankVector:
    return rank if isinstance(rank, RankVector) else RankVector(rank)


def manifold_dimension(shape: Shape, rank: RankVector) -> int:
    """Dimension of the manifold of order-d tensors with TT rank `rank`."""
    rank.check_feasible(shape)
    r = rank.full()
    d = shape.order
    cores = sum(r[i - 1] * shape[i - 1] * r[i] for i in range(1, d + 1))
    return cores - sum(x * x for x in rank)


def free_variable_count(shape: Shape, rank: RankVector) -> int:
    """Free entries of the first d-1 cores of a canonical decomposition.

    The last core is not counted: it is eliminated through the pivot
    equations of each slice.
    """
    rank.check_feasible(shape)
    r = rank.full()
    d = shape.order
    cores = sum(r[i - 1] * shape[i - 1] * r[i] for i in range(1, d))
    return cores - sum(x * x for x in rank)
