from __future__ import annotations

from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
import numpy.typing as npt

from .dense import DenseTensor, FloatArray, unfold
from .linalg import (
    DEFAULT_TOLERANCE,
    check_tolerance,
    is_singular,
    numerical_rank,
    svd_cut,
)
from .shape import RankVector, Shape, as_rank


class RankInfeasible(ValueError):
    ...


class SingularCanonicalBlock(ValueError):
    def __init__(self, core: int, msg: str):
        """
        Args:
            core (int): 1-based index of the core whose block is singular
        """
        super().__init__(msg)
        self.core = core


class TTDecomposition:
    """Cores U^(1), ..., U^(d), core i of shape (r_{i-1}, n_i, r_i)."""

    __slots__ = ["_cores", "_shape", "_rank"]

    _cores: Tuple[FloatArray, ...]
    _shape: Shape
    _rank: RankVector

    def __init__(self, cores: Sequence[npt.ArrayLike]):
        cs = [np.array(c, dtype=np.float64) for c in cores]

        if len(cs) < 2:
            raise ValueError("A TT decomposition needs at least two cores")

        for i, c in enumerate(cs, 1):
            if c.ndim != 3:
                raise ValueError(f"Core {i} must be 3-way. Got shape {c.shape}")

        if cs[0].shape[0] != 1 or cs[-1].shape[2] != 1:
            raise ValueError("Boundary ranks r_0 and r_d must be 1")

        for i in range(len(cs) - 1):
            if cs[i].shape[2] != cs[i + 1].shape[0]:
                raise ValueError(
                    f"Core chain mismatch between core {i + 1} "
                    f"{cs[i].shape} and core {i + 2} {cs[i + 1].shape}"
                )

        for c in cs:
            c.setflags(write=False)

        self._cores = tuple(cs)
        self._shape = Shape(c.shape[1] for c in cs)
        self._rank = RankVector(c.shape[2] for c in cs[:-1])

    @property
    def cores(self) -> Tuple[FloatArray, ...]:
        return self._cores

    @property
    def shape(self) -> Shape:
        return self._shape

    @property
    def rank(self) -> RankVector:
        return self._rank

    @property
    def order(self) -> int:
        return len(self._cores)

    def __repr__(self) -> str:
        return f"TTDecomposition({self._shape}, {self._rank})"


def tt_contract(tt: TTDecomposition) -> DenseTensor:
    """Sum over the bond indices of the cores.

    The running product keeps the already contracted modes as a
    column-major row index so the result comes out in the flat order of
    DenseTensor.
    """
    res = tt.cores[0].reshape(tt.shape[0], -1, order="F")

    for core in tt.cores[1:]:
        r_prev, n, r = core.shape
        step = res @ core.reshape(r_prev, n * r, order="F")
        res = step.reshape(res.shape[0] * n, r, order="F")

    return DenseTensor(tt.shape, res[:, 0])


def tt_entry(cores: Sequence[FloatArray], index: Sequence[int]) -> float:
    """A single entry U(x) with a 1-based multi-index."""
    v = np.ones(1)
    for core, x in zip(cores, index):
        v = v @ core[:, x - 1, :]
    return float(v[0])


def entry_gradient(
    cores: Sequence[FloatArray],
    index: Sequence[int],
    last: Optional[FloatArray] = None,
) -> Tuple[float, List[FloatArray]]:
    """Value of one entry and its partial derivatives w.r.t. every core.

    The derivative w.r.t. U^(i)(a, x_i, b) is left_i(a) * right_i(b), where
    left_i is the product of the cores before i and right_i the product of
    the cores after i. When `last` is given it closes the chain instead of
    a trailing core of bond size 1: the value is then
    U^(1)(x_1) ... U^(k)(x_k) @ last.
    """
    k = len(cores)
    lefts: List[FloatArray] = [np.ones(1)]
    for i in range(k - 1):
        lefts.append(lefts[-1] @ cores[i][:, index[i] - 1, :])

    rights: List[FloatArray] = [np.ones(1)] * k
    rights[k - 1] = np.ones(1) if last is None else np.asarray(last)
    for i in range(k - 1, 0, -1):
        rights[i - 1] = cores[i][:, index[i] - 1, :] @ rights[i]

    grads: List[FloatArray] = []
    for i, core in enumerate(cores):
        g = np.zeros_like(core)
        g[:, index[i] - 1, :] = np.outer(lefts[i], rights[i])
        grads.append(g)

    tail = cores[k - 1][:, index[k - 1] - 1, :] @ rights[k - 1]
    value = float(lefts[k - 1] @ tail)
    return value, grads


def tt_rank(t: DenseTensor, tolerance: float = DEFAULT_TOLERANCE) -> RankVector:
    """Numerical ranks of the unfoldings 1..d-1 (zeros for the zero tensor)."""
    check_tolerance(tolerance)
    d = t.shape.order
    return RankVector(
        numerical_rank(unfold(t, i), tolerance) for i in range(1, d)
    )


def tt_svd(
    t: DenseTensor,
    rank: RankVector | Sequence[int],
    tolerance: float = DEFAULT_TOLERANCE,
) -> TTDecomposition:
    """Left-to-right sequential SVD.

    `rank` is an upper bound. Each bond keeps the numerical rank of the
    current remainder, so the result has the minimal TT rank of `t`.
    """
    rank = as_rank(rank)
    shape = t.shape
    d = shape.order

    if len(rank) != d - 1:
        raise ValueError(f"Rank {rank} does not match order {d}")

    cores: List[FloatArray] = []
    r_prev = 1
    rest = t.values.reshape(shape[0], -1, order="F")

    for i in range(1, d):
        n = shape[i - 1]
        mat = rest.reshape(r_prev * n, -1, order="F")
        u, s, vt, found = svd_cut(mat, tolerance)

        if found > rank[i - 1]:
            raise RankInfeasible(
                f"Unfolding {i} has numerical rank {found}, which exceeds "
                f"the requested r_{i} = {rank[i - 1]}"
            )

        r = u.shape[1]
        cores.append(u.reshape(r_prev, n, r, order="F"))
        rest = s[:, None] * vt
        r_prev = r

    cores.append(rest.reshape(r_prev, shape[d - 1], 1, order="F"))
    return TTDecomposition(cores)


def random_tt(
    shape: Shape | Sequence[int],
    rank: RankVector | Sequence[int],
    rng: np.random.Generator,
) -> TTDecomposition:
    shape = shape if isinstance(shape, Shape) else Shape(shape)
    r = as_rank(rank).full()
    return TTDecomposition(
        [rng.standard_normal((r[i], n, r[i + 1])) for i, n in enumerate(shape)]
    )


# A gauge position is a row x of slice 1, or an explicit (a, x) pair
# picking row x of slice a of the core
Position = Union[int, Tuple[int, int]]


def canonical_rows(tt: TTDecomposition) -> List[Tuple[int, ...]]:
    """Rows 1..r_i of each of the first d-1 cores (1-based)."""
    return [tuple(range(1, r + 1)) for r in tt.rank]


def _positions(rows: Sequence[Position]) -> List[Tuple[int, int]]:
    return [(1, p) if isinstance(p, int) else (p[0], p[1]) for p in rows]


def gauge_block(core: FloatArray, rows: Sequence[Position]) -> FloatArray:
    """The r_i x r_i block of core rows U^(i)(a, x, :), one per position.

    With plain rows this is U^(i)(1, rows, :), which for the first core is
    U^(1)(rows, :) because r_0 = 1.
    """
    pos = _positions(rows)
    return core[[a - 1 for a, _ in pos], [x - 1 for _, x in pos], :]


def rows_disjoint(rows: Sequence[Position]) -> bool:
    """No two positions of one core share a row x."""
    xs = [x for _, x in _positions(rows)]
    return len(set(xs)) == len(xs)


def has_proper_structure(
    tt: TTDecomposition,
    rows: Optional[Sequence[Sequence[Position]]] = None,
    tolerance: float = DEFAULT_TOLERANCE,
) -> bool:
    """Whether the chosen blocks of cores 1..d-1 form a proper structure.

    Each entry of `rows` names r_i positions of core i. The positions of a
    core must lie in pairwise distinct rows and their block must be
    invertible.
    """
    rows = canonical_rows(tt) if rows is None else rows
    _check_rows(tt, rows)
    if not all(rows_disjoint(rs) for rs in rows):
        return False
    return not any(
        is_singular(gauge_block(tt.cores[i], rs), tolerance)
        for i, rs in enumerate(rows)
    )


def _check_rows(tt: TTDecomposition, rows: Sequence[Sequence[Position]]):
    if len(rows) != tt.order - 1:
        raise ValueError(f"Expected {tt.order - 1} row sets, got {len(rows)}")

    for i, rs in enumerate(rows):
        r_prev, n, r = tt.cores[i].shape
        pos = _positions(rs)
        if len(pos) != r or len(set(pos)) != r:
            raise ValueError(
                f"Core {i + 1} needs {r} distinct positions, got {rs}"
            )
        if not all(1 <= a <= r_prev and 1 <= x <= n for a, x in pos):
            raise ValueError(f"Rows {rs} out of range for core {i + 1}")


def canonicalize(
    tt: TTDecomposition,
    tolerance: float = DEFAULT_TOLERANCE,
    rows: Optional[Sequence[Sequence[Position]]] = None,
) -> TTDecomposition:
    """Regauge so that the chosen blocks of cores 1..d-1 become identities.

    Bonds are fixed left to right: with B the block of core i, core i is
    multiplied by B^-1 from the right and B is pushed into core i+1. Later
    steps only touch cores to the right, so earlier blocks stay identity.
    """
    check_tolerance(tolerance)

    for i, r in enumerate(tt.rank, 1):
        if r > tt.shape[i - 1]:
            raise SingularCanonicalBlock(
                i, f"Core {i} has {tt.shape[i - 1]} rows, fewer than r_{i}={r}"
            )

    rows = canonical_rows(tt) if rows is None else rows
    _check_rows(tt, rows)
    for i, rs in enumerate(rows, 1):
        if not rows_disjoint(rs):
            raise ValueError(f"Positions {rs} of core {i} share a row")
    cores = [c.copy() for c in tt.cores]

    for i, rs in enumerate(rows):
        block = gauge_block(cores[i], rs)

        if is_singular(block, tolerance):
            raise SingularCanonicalBlock(
                i + 1, f"Gauge block of core {i + 1} is numerically singular"
            )

        # core_i <- core_i B^-1, core_{i+1} <- B core_{i+1}
        cores[i] = cores[i] @ np.linalg.inv(block)
        cores[i + 1] = np.einsum("ab,bxc->axc", block, cores[i + 1])

    return TTDecomposition(cores)


def is_minimal(tt: TTDecomposition, tolerance: float = DEFAULT_TOLERANCE):
    """Every core has full-rank left and right unfoldings."""
    for c in tt.cores:
        r_prev, n, r = c.shape
        left = c.reshape(r_prev * n, r, order="F")
        right = c.reshape(r_prev, n * r, order="F")
        if numerical_rank(left, tolerance) < r:
            return False
        if numerical_rank(right, tolerance) < r_prev:
            return False
    return True
