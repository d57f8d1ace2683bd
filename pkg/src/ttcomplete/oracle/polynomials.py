"""Polynomials of the observed entries and their generic Jacobian rank.

Variables are the entries of the first d-1 cores of a canonical
decomposition: for i < d the block U^(i)(1, 1:r_i, :) is fixed to the
identity and every other entry is free. The last core is not a variable.
Each slice s spends its pivots on the column U^(d)(:, s), so a constraint
column with pivots pi_1..pi_r and entry e becomes the polynomial

    L(e) A^-1 v - v_e,   A = [L(pi_1); ...; L(pi_r)],  v = observed pivots

where L(x) is the row vector U^(1)(x_1) ... U^(d-1)(x_{d-1}).
"""
from __future__ import annotations

import statistics
from itertools import combinations
from typing import List, Mapping, NamedTuple, Optional, Sequence, Tuple

import numpy as np
import numpy.typing as npt

from ..checker.capacity import SubtensorSelection, independence_capacity
from ..logwriter import IWriter, writer_or_default
from ..pattern.constraint import ConstraintTensor
from ..pattern.sampling import Index
from ..tensor.dense import FloatArray
from ..tensor.linalg import is_singular, numerical_rank
from ..tensor.shape import RankVector, Shape, as_rank
from ..tensor.tt import entry_gradient

DEFAULT_RANK_TOLERANCE = 1e-8

PIVOT_TOLERANCE = 1e-12


class SingularPivotSystem(ArithmeticError):
    def __init__(self, slice: int, msg: str):
        super().__init__(msg)
        self.slice = slice


class PreconditionNotDependent(ValueError):
    ...


class CanonicalFixingUnavailable(ValueError):
    ...


class GenericPoint(NamedTuple):
    cores: Tuple[FloatArray, ...]  # U^(1), ..., U^(d-1), canonical
    last: FloatArray  # U^(d) as an r_{d-1} x n_d matrix


class PolynomialSystem:
    """One polynomial per constraint tensor column."""

    def __init__(self, ct: ConstraintTensor, rank: RankVector | Sequence[int]):
        rank = as_rank(rank)
        rank.check_feasible(ct.shape)

        for i, r in enumerate(rank, 1):
            if r > ct.shape[i - 1]:
                raise CanonicalFixingUnavailable(
                    f"Canonical fixing needs n_{i} >= r_{i}. "
                    f"Given n_{i} = {ct.shape[i - 1]}, r_{i} = {r}"
                )

        self.ct = ct
        self.rank = rank
        r = rank.full()

        masks: List[npt.NDArray[np.bool_]] = []
        for i in range(1, ct.shape.order):
            m = np.ones((r[i - 1], ct.shape[i - 1], r[i]), dtype=bool)
            m[0, : r[i], :] = False
            masks.append(m)
        self._free = tuple(masks)

        self.variables: List[Tuple[int, int, int, int]] = [
            (i + 1, int(a) + 1, int(x) + 1, int(b) + 1)
            for i, m in enumerate(masks)
            for a, x, b in np.argwhere(m)
        ]

    @property
    def shape(self) -> Shape:
        return self.ct.shape

    @property
    def variable_count(self) -> int:
        return len(self.variables)

    @property
    def polynomial_count(self) -> int:
        return self.ct.K

    def sample_point(self, rng: np.random.Generator) -> GenericPoint:
        r = self.rank.full()
        cores: List[FloatArray] = []
        for i, m in enumerate(self._free, 1):
            core = rng.standard_normal(m.shape)
            core[0, : r[i], :] = np.eye(r[i])
            cores.append(core)
        last = rng.standard_normal((r[-2], self.shape[-1]))
        return GenericPoint(tuple(cores), last)

    def flatten(self, grads: Sequence[FloatArray]) -> FloatArray:
        return np.concatenate([g[m] for g, m in zip(grads, self._free)])

    def jacobian(
        self, sel: SubtensorSelection, point: GenericPoint
    ) -> FloatArray:
        """Rows: selected columns; columns: free variables."""
        sel.check(self.ct)
        rows = [self.gradient(c, point) for c in sel]
        if not rows:
            return np.zeros((0, self.variable_count))
        return np.vstack(rows)

    def gradient(self, column: int, point: GenericPoint) -> FloatArray:
        """Gradient of one column's polynomial over the free variables."""
        col = self.ct.columns[column]
        w = point.last[:, col.slice - 1]

        a = np.vstack([left_vector(point.cores, x) for x in col.pivots])
        if is_singular(a, PIVOT_TOLERANCE):
            raise SingularPivotSystem(
                col.slice, f"Pivot system of slice {col.slice} is singular"
            )
        c = np.linalg.solve(a.T, left_vector(point.cores, col.entry))

        _, g = entry_gradient(point.cores, col.entry, last=w)
        res = self.flatten(g)
        for ck, piv in zip(c, col.pivots):
            _, gp = entry_gradient(point.cores, piv, last=w)
            res = res - ck * self.flatten(gp)
        return res

    def __repr__(self) -> str:
        return (
            f"PolynomialSystem({self.polynomial_count} polynomials, "
            f"{self.variable_count} variables)"
        )


def left_vector(cores: Sequence[FloatArray], index: Sequence[int]):
    """U^(1)(x_1) ... U^(k)(x_k) for the first k = len(cores) modes."""
    v = np.ones(1)
    for core, x in zip(cores, index):
        v = v @ core[:, x - 1, :]
    return v


def jacobian_ranks(
    sys: PolynomialSystem,
    sel: SubtensorSelection,
    trials: int = 3,
    tolerance: float = DEFAULT_RANK_TOLERANCE,
    seed: int = 0,
    writer: Optional[IWriter] = None,
) -> List[int]:
    """Numerical Jacobian rank at `trials` independent generic points."""
    if trials < 1:
        raise ValueError(f"trials must be positive. Given {trials}")

    if len(sel) == 0:
        return [0] * trials

    rng = np.random.default_rng(seed)
    ranks = [
        numerical_rank(sys.jacobian(sel, sys.sample_point(rng)), tolerance)
        for _ in range(trials)
    ]

    if max(ranks) - statistics.median(ranks) > 1:
        writer_or_default(writer).warning(
            f"Jacobian ranks disagree across generic points: {ranks}"
        )

    return ranks


def jacobian_rank(
    sys: PolynomialSystem,
    sel: SubtensorSelection,
    trials: int = 3,
    tolerance: float = DEFAULT_RANK_TOLERANCE,
    seed: int = 0,
    writer: Optional[IWriter] = None,
) -> int:
    """Number of algebraically independent polynomials in `sel`.

    Exact with probability one: the max over random generic points.
    """
    return max(jacobian_ranks(sys, sel, trials, tolerance, seed, writer))


class RowScan(NamedTuple):
    basis: Tuple[int, ...]  # accepted columns, in scan order
    rejected: Optional[int] = None  # first column dependent on the basis


def scan_rows(
    sys: PolynomialSystem,
    columns: Sequence[int],
    tolerance: float = DEFAULT_RANK_TOLERANCE,
    seed: int = 0,
    limit: Optional[int] = None,
    stop_at_rejection: bool = False,
) -> RowScan:
    """Greedy row basis of the Jacobian at one generic point.

    Columns are taken in the given order; one whose gradient does not
    raise the numerical rank is rejected. The scan ends once `limit`
    columns are accepted, or at the first rejection when
    `stop_at_rejection` is set.
    """
    point = sys.sample_point(np.random.default_rng(seed))
    rows: List[FloatArray] = []
    basis: List[int] = []
    rejected: Optional[int] = None

    for c in columns:
        if limit is not None and len(basis) >= limit:
            break
        g = sys.gradient(c, point)
        if numerical_rank(np.vstack([*rows, g]), tolerance) > len(rows):
            rows.append(g)
            basis.append(c)
            continue
        if rejected is None:
            rejected = c
        if stop_at_rejection:
            break

    return RowScan(tuple(basis), rejected)


def eliminate_last_core(
    sys: PolynomialSystem,
    cores: Sequence[FloatArray],
    values: Mapping[Index, float],
) -> FloatArray:
    """Recover U^(d) from the pivot equations of each slice.

    Columns of slices without pivots (excluded from the constraint tensor)
    are NaN.
    """
    r = sys.rank[-1]
    res = np.full((r, sys.shape[-1]), np.nan)

    for s, pivots in sys.ct.pivots.items():
        a = np.vstack([left_vector(cores, x) for x in pivots])
        if is_singular(a, PIVOT_TOLERANCE):
            raise SingularPivotSystem(
                s, f"Pivot system of slice {s} is singular"
            )
        try:
            b = np.array([values[(*x, s)] for x in pivots])
        except KeyError as e:
            raise ValueError(f"Missing value for pivot {e.args[0]}") from e
        res[:, s - 1] = np.linalg.solve(a, b)

    return res


def involved_variable_count(
    sys: PolynomialSystem, sel: SubtensorSelection
) -> int:
    """Variables the selected polynomials depend on, minimized over gauges.

    A selection touching m_i rows of mode i involves r_{i-1} r_i m_i
    entries of core i, r_i^2 of which a suitable gauge fixes.
    """
    return independence_capacity(sel, sys.ct, sys.rank)


def verify_minimal_dependence(
    sys: PolynomialSystem,
    sel: SubtensorSelection,
    trials: int = 3,
    tolerance: float = DEFAULT_RANK_TOLERANCE,
    seed: int = 0,
) -> bool:
    """Whether a dependent selection is minimally dependent.

    True iff every proper subset is independent and the selection involves
    exactly t - 1 variables.
    """
    t = len(sel)
    if jacobian_rank(sys, sel, trials, tolerance, seed) >= t:
        raise PreconditionNotDependent(
            f"Selection {sel.external()} is algebraically independent"
        )

    for sub in combinations(sel.columns, t - 1):
        part = SubtensorSelection(sub)
        if jacobian_rank(sys, part, trials, tolerance, seed) < t - 1:
            return False

    return involved_variable_count(sys, sel) == t - 1
