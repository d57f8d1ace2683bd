from __future__ import annotations

from typing import Tuple

import numpy as np
import numpy.typing as npt

FloatArray = npt.NDArray[np.float64]

DEFAULT_TOLERANCE = 1e-9


def check_tolerance(tolerance: float):
    if not 0 < tolerance < 1:
        raise ValueError(f"Tolerance must be in (0, 1). Given {tolerance}")


def numerical_rank(a: npt.ArrayLike, tolerance: float = DEFAULT_TOLERANCE):
    """Number of singular values above tolerance * (largest)."""
    check_tolerance(tolerance)
    m = np.asarray(a, dtype=np.float64)

    if m.size == 0:
        return 0

    s = np.linalg.svd(m, compute_uv=False)
    return _count_above(s, tolerance)


def _count_above(s: FloatArray, tolerance: float) -> int:
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.count_nonzero(s > tolerance * s[0]))


def svd_cut(
    a: FloatArray, tolerance: float, max_rank: int | None = None
) -> Tuple[FloatArray, FloatArray, FloatArray, int]:
    """Thin SVD truncated at the numerical rank.

    Returns (U, S, Vt, numerical rank). At most `max_rank` triplets are kept,
    but at least one so that zero blocks still factor.
    """
    check_tolerance(tolerance)
    u, s, vt = np.linalg.svd(a, full_matrices=False)
    rank = _count_above(s, tolerance)
    keep = max(1, rank if max_rank is None else min(rank, max_rank))
    return u[:, :keep], s[:keep], vt[:keep], rank


def is_singular(block: FloatArray, tolerance: float) -> bool:
    """True when the smallest singular value is below tolerance * largest."""
    s = np.linalg.svd(block, compute_uv=False)
    return bool(s.size == 0 or s[0] == 0 or s[-1] < tolerance * s[0])
