"""The constraint tensor of a sampling pattern.

Each slice Y_s (last coordinate s) holding N_s >= r observed entries,
r = r_{d-1}, spends r of them as pivots: they determine the column
U^(d)(:, s). Every other observed entry of the slice gives one polynomial
in the first d-1 cores, represented as one column of the constraint tensor
whose marked cells are the r pivots plus that entry.
"""
from __future__ import annotations

from types import MappingProxyType
from typing import (
    Dict,
    Iterable,
    List,
    Mapping,
    NamedTuple,
    Optional,
    Sequence,
    Set,
    Tuple,
    Union,
)

import numpy as np
from typing_extensions import TypeAlias

from ..logwriter import IWriter, writer_or_default
from ..tensor.shape import RankVector, Shape, as_rank
from .sampling import Index, SamplingPattern


class Lexicographic:
    """First r observed entries of each slice in lexicographic order."""

    def __repr__(self) -> str:
        return "Lexicographic()"


class Explicit:
    def __init__(self, pivots: Iterable[Sequence[int]]):
        """
        Args:
            pivots: full d-way 1-based indices of the pivot entries
        """
        self.pivots = tuple(tuple(int(x) for x in p) for p in pivots)

    def __repr__(self) -> str:
        return f"Explicit({list(self.pivots)})"


class SeededRandom:
    def __init__(self, seed: int):
        self.seed = seed

    def __repr__(self) -> str:
        return f"SeededRandom({self.seed})"


class PivotRules:
    Lexicographic = Lexicographic
    Explicit = Explicit
    SeededRandom = SeededRandom


PivotRule: TypeAlias = Union[Lexicographic, Explicit, SeededRandom]


class PivotRowReport(NamedTuple):
    holds: bool
    required: int
    slice_counts: Tuple[int, ...]
    deficits: Mapping[int, int]  # slice -> missing observations

    def describe(self) -> str:
        if self.holds:
            return f"every slice has at least {self.required} observations"
        parts = ", ".join(
            f"slice {s} lacks {k}" for s, k in self.deficits.items()
        )
        return f"need {self.required} observations per slice: {parts}"


class PivotRowsMissing(ValueError):
    def __init__(self, report: PivotRowReport):
        super().__init__(report.describe())
        self.report = report


class ExplicitPivotNotObserved(ValueError):
    ...


class PivotCountMismatch(ValueError):
    ...


def check_pivot_rows(
    p: SamplingPattern, rank: RankVector | Sequence[int]
) -> PivotRowReport:
    rank = as_rank(rank)
    rank.check_feasible(p.shape)
    r = rank[-1]
    counts = p.slice_counts()
    deficits = {s: r - c for s, c in enumerate(counts, 1) if c < r}
    return PivotRowReport(
        not deficits, r, counts, MappingProxyType(deficits)
    )


class ConstraintColumn(NamedTuple):
    slice: int
    pivots: Tuple[Index, ...]  # (d-1)-way indices
    entry: Index

    @property
    def cells(self) -> Tuple[Index, ...]:
        return tuple(sorted((*self.pivots, self.entry)))

    def masks(self) -> Tuple[int, ...]:
        """Per mode, a bitmask of the coordinates touched by the cells."""
        res = [0] * len(self.entry)
        for cell in (*self.pivots, self.entry):
            for i, x in enumerate(cell):
                res[i] |= 1 << (x - 1)
        return tuple(res)


class ConstraintTensor:
    """Binary tensor of shape (n_1, ..., n_{d-1}, K)."""

    def __init__(
        self,
        shape: Shape,
        last_rank: int,
        columns: Sequence[ConstraintColumn],
        pivots: Mapping[int, Tuple[Index, ...]],
        excluded_slices: Sequence[int] = (),
    ):
        self.shape = shape
        self.last_rank = last_rank
        self.columns = tuple(columns)
        self.pivots: Mapping[int, Tuple[Index, ...]] = MappingProxyType(
            dict(pivots)
        )
        self.excluded_slices = tuple(excluded_slices)
        self._masks = tuple(c.masks() for c in self.columns)

    @property
    def K(self) -> int:
        return len(self.columns)

    @property
    def dims(self) -> Tuple[int, ...]:
        return (*self.shape.dims[:-1], self.K)

    @property
    def masks(self) -> Tuple[Tuple[int, ...], ...]:
        return self._masks

    def support(self) -> Set[Index]:
        """Marked cells as 1-based (x_1, ..., x_{d-1}, column) indices."""
        return {
            (*cell, k)
            for k, col in enumerate(self.columns, 1)
            for cell in col.cells
        }

    def to_rows(self) -> List[List[str]]:
        """CSV rows: column, source slice, then the r+1 cells."""
        rows = [
            ["column", "slice"]
            + [f"cell_{j}" for j in range(1, self.last_rank + 2)]
        ]
        for k, col in enumerate(self.columns, 1):
            cells = [" ".join(map(str, c)) for c in col.cells]
            rows.append([str(k), str(col.slice), *cells])
        return rows

    def __repr__(self) -> str:
        return f"ConstraintTensor(dims={self.dims}, r={self.last_rank})"


def build_constraint_tensor(
    p: SamplingPattern,
    rank: RankVector | Sequence[int],
    pivot_rule: Optional[PivotRule] = None,
    force: bool = False,
    writer: Optional[IWriter] = None,
) -> ConstraintTensor:
    """
    Args:
        force: exclude slices with fewer than r_{d-1} observations (with a
            warning) instead of raising PivotRowsMissing
    """
    rank = as_rank(rank)
    report = check_pivot_rows(p, rank)
    pivot_rule = pivot_rule or Lexicographic()

    if not report.holds:
        if not force:
            raise PivotRowsMissing(report)
        writer_or_default(writer).warning(
            "Excluding slices from the constraint tensor: ", report.describe()
        )

    r = rank[-1]
    by_slice = p.by_slice()
    included = {s: idxs for s, idxs in by_slice.items() if len(idxs) >= r}
    chosen = _choose_pivots(p, included, r, pivot_rule)

    entries: List[Tuple[Index, int]] = []
    for s, idxs in included.items():
        piv = set(chosen[s])
        entries.extend((idx[:-1], s) for idx in idxs if idx not in piv)

    entries.sort()

    pivots = {s: tuple(x[:-1] for x in chosen[s]) for s in included}
    columns = [ConstraintColumn(s, pivots[s], e) for e, s in entries]
    excluded = sorted(report.deficits)
    return ConstraintTensor(p.shape, r, columns, pivots, excluded)


def _choose_pivots(
    p: SamplingPattern,
    included: Mapping[int, List[Index]],
    r: int,
    rule: PivotRule,
) -> Dict[int, Tuple[Index, ...]]:
    if isinstance(rule, Lexicographic):
        return {s: tuple(idxs[:r]) for s, idxs in included.items()}
    elif isinstance(rule, SeededRandom):
        rng = np.random.default_rng(rule.seed)
        res: Dict[int, Tuple[Index, ...]] = {}
        for s, idxs in included.items():
            picks = sorted(rng.choice(len(idxs), size=r, replace=False))
            res[s] = tuple(idxs[j] for j in picks)
        return res

    grouped: Dict[int, List[Index]] = {s: [] for s in included}
    for piv in rule.pivots:
        if piv not in p:
            raise ExplicitPivotNotObserved(f"Pivot {piv} is not observed")
        if piv[-1] in grouped:
            grouped[piv[-1]].append(piv)

    for s, piv in grouped.items():
        if len(set(piv)) != r:
            raise PivotCountMismatch(
                f"Slice {s} needs {r} distinct pivots, got {len(set(piv))}"
            )

    return {s: tuple(sorted(set(piv))) for s, piv in grouped.items()}
