from __future__ import annotations

from abc import ABCMeta, abstractmethod
from fractions import Fraction
from typing import Iterable, Iterator, Sequence, Tuple, Union

from ..pattern.constraint import ConstraintTensor
from ..tensor.shape import RankVector, as_rank

Profile = Tuple[int, ...]  # (m_1, ..., m_{d-1})

Number = Union[int, Fraction]


class SubtensorSelection:
    """A set of constraint tensor columns, kept as sorted 0-based indices."""

    __slots__ = ["_columns"]

    _columns: Tuple[int, ...]

    def __init__(self, columns: Iterable[int]):
        cols = tuple(sorted(set(int(c) for c in columns)))
        if cols and cols[0] < 0:
            raise ValueError(f"Column indices must be nonnegative: {cols}")
        self._columns = cols

    @property
    def columns(self) -> Tuple[int, ...]:
        return self._columns

    def check(self, ct: ConstraintTensor) -> None:
        if self._columns and self._columns[-1] >= ct.K:
            raise IndexError(
                f"Column {self._columns[-1]} out of range for K = {ct.K}"
            )

    def external(self) -> Tuple[int, ...]:
        """1-based column numbers."""
        return tuple(c + 1 for c in self._columns)

    def __len__(self) -> int:
        return len(self._columns)

    def __iter__(self) -> Iterator[int]:
        return iter(self._columns)

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, SubtensorSelection)
            and other._columns == self._columns
        )

    def __hash__(self) -> int:
        return hash(self._columns)

    def __repr__(self) -> str:
        return f"SubtensorSelection({list(self._columns)})"


def union_masks(
    masks: Sequence[Tuple[int, ...]], columns: Iterable[int], modes: int
) -> Tuple[int, ...]:
    acc = [0] * modes
    for c in columns:
        for i, m in enumerate(masks[c]):
            acc[i] |= m
    return tuple(acc)


def profile_of(union: Tuple[int, ...]) -> Profile:
    return tuple(m.bit_count() for m in union)


def selection_profile(sel: SubtensorSelection, ct: ConstraintTensor):
    sel.check(ct)
    modes = ct.shape.order - 1
    return profile_of(union_masks(ct.masks, sel, modes))


def nonzero_rows(sel: SubtensorSelection, ct: ConstraintTensor, i: int):
    """m_i: distinct mode-i coordinates over the cells of the selection."""
    if not 1 <= i <= ct.shape.order - 1:
        raise IndexError(f"Mode must be in [1, {ct.shape.order - 1}]")
    return selection_profile(sel, ct)[i - 1]


def capacity_of(profile: Profile, rank: RankVector) -> int:
    r = rank.full()
    return sum(
        max(0, r[i - 1] * r[i] * m - r[i] * r[i])
        for i, m in enumerate(profile, 1)
    )


def independence_capacity(
    sel: SubtensorSelection,
    ct: ConstraintTensor,
    rank: RankVector | Sequence[int],
) -> int:
    """Upper bound on the algebraically independent polynomials of `sel`."""
    return capacity_of(selection_profile(sel, ct), as_rank(rank))


class SubsetInequality(metaclass=ABCMeta):
    """A condition every sub-selection of a given size must satisfy.

    The left side is a nondecreasing function of the profile, which is what
    makes `saturated` usable for pruning.
    """

    @abstractmethod
    def slack(self, profile: Profile, size: int) -> Number:
        ...

    @abstractmethod
    def score(self, profile: Profile) -> Number:
        ...

    @abstractmethod
    def describe(self, profile: Profile, size: int) -> str:
        ...

    def holds(self, profile: Profile, size: int) -> bool:
        return self.slack(profile, size) >= 0

    def saturated(self, profile: Profile, size: int, max_size: int) -> bool:
        """No superset up to `max_size` can violate the inequality."""
        return all(
            self.holds(profile, s) for s in range(size + 1, max_size + 1)
        )


class CapacityInequality(SubsetInequality):
    """capacity(sub) >= |sub|, necessary for independence of sub."""

    def __init__(self, rank: RankVector):
        self.rank = rank

    def slack(self, profile: Profile, size: int) -> int:
        return capacity_of(profile, self.rank) - size

    def score(self, profile: Profile) -> int:
        return capacity_of(profile, self.rank)

    def saturated(self, profile: Profile, size: int, max_size: int) -> bool:
        return capacity_of(profile, self.rank) >= max_size

    def describe(self, profile: Profile, size: int) -> str:
        cap = capacity_of(profile, self.rank)
        return f"capacity {cap} < t = {size} (m = {list(profile)})"


class ModeInequality(SubsetInequality):
    """m_i(sub) - q >= t - q (t - M_i + 1)^+ with q = r_i / r_{i-1}."""

    def __init__(self, rank: RankVector, mode: int, target: int):
        r = rank.full()
        self.rank = rank
        self.mode = mode
        self.target = target
        self.q = Fraction(r[mode], r[mode - 1])

    def slack(self, profile: Profile, size: int) -> Fraction:
        m = profile[self.mode - 1]
        rhs = size - self.q * max(0, size - self.target + 1)
        return m - self.q - rhs

    def score(self, profile: Profile) -> int:
        return profile[self.mode - 1]

    def describe(self, profile: Profile, size: int) -> str:
        m = profile[self.mode - 1]
        return (
            f"m_{self.mode} = {m} too small for t = {size} "
            f"(q = {self.q}, M_{self.mode} = {self.target})"
        )


def mode_target(n_i: int, rank: RankVector, mode: int) -> int:
    """M_i = n_i - floor(r_i / r_{i-1})."""
    r = rank.full()
    return n_i - r[mode] // r[mode - 1]
