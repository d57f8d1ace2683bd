from __future__ import annotations

from typing import List, Mapping, NamedTuple, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import least_squares

from ..logwriter import IWriter, writer_or_default
from ..pattern.sampling import Index, SamplingPattern
from ..tensor.dense import DenseTensor, FloatArray
from ..tensor.shape import RankVector, as_rank
from ..tensor.tt import TTDecomposition, entry_gradient, tt_contract

DEFAULT_CLUSTER_TOLERANCE = 1e-4

RESIDUAL_TOLERANCE = 1e-8


class NoFitFound(RuntimeError):
    ...


class CompletionCount(NamedTuple):
    count: int  # distinct completions found, a lower bound
    representatives: Tuple[DenseTensor, ...]
    converged: int
    restarts: int


class _CoreLayout:
    def __init__(self, shape: Sequence[int], rank: RankVector):
        r = rank.full()
        self.shapes = [(r[i], n, r[i + 1]) for i, n in enumerate(shape)]
        sizes = [a * n * b for a, n, b in self.shapes]
        self.offsets = np.cumsum([0, *sizes])

    @property
    def size(self) -> int:
        return int(self.offsets[-1])

    def unpack(self, theta: FloatArray) -> List[FloatArray]:
        return [
            theta[self.offsets[i] : self.offsets[i + 1]].reshape(s)
            for i, s in enumerate(self.shapes)
        ]


def _fit(
    layout: _CoreLayout,
    indices: Sequence[Index],
    targets: FloatArray,
    theta0: FloatArray,
):
    def residuals(theta: FloatArray) -> FloatArray:
        cores = layout.unpack(theta)
        vals = [entry_gradient(cores, x)[0] for x in indices]
        return np.asarray(vals) - targets

    def jacobian(theta: FloatArray) -> FloatArray:
        cores = layout.unpack(theta)
        rows = [
            np.concatenate([g.ravel() for g in entry_gradient(cores, x)[1]])
            for x in indices
        ]
        return np.vstack(rows)

    return least_squares(
        residuals,
        theta0,
        jac=jacobian,  # pyright: ignore
        method="trf",
        xtol=1e-14,
        ftol=1e-14,
        gtol=1e-14,
        max_nfev=2000,
    )


def count_completions(
    p: SamplingPattern,
    values: Mapping[Index, float],
    rank: RankVector | Sequence[int],
    restarts: int = 20,
    cluster_tol: float = DEFAULT_CLUSTER_TOLERANCE,
    seed: int = 0,
    writer: Optional[IWriter] = None,
) -> CompletionCount:
    """Fit the observed entries from random starts and cluster the results.

    Each restart minimizes the squared residual over all core entries with
    a trust region solver. The observed values are normalized to unit
    norm first, so both the fit and the 1e-8 residual cutoff are relative
    to their magnitude. Fits above the cutoff are discarded; the rest are
    grouped greedily by relative Frobenius distance of the full tensors.
    """
    rank = as_rank(rank)
    rank.check_feasible(p.shape)
    writer = writer_or_default(writer)

    if restarts < 1:
        raise ValueError(f"restarts must be positive. Given {restarts}")
    if cluster_tol <= 0:
        raise ValueError(f"cluster_tol must be positive. Given {cluster_tol}")

    indices = list(p)
    missing = [x for x in indices if x not in values]
    if missing:
        raise ValueError(f"No value given for observed entries {missing[:5]}")

    targets = np.array([values[x] for x in indices], dtype=np.float64)
    scale = float(np.linalg.norm(targets)) or 1.0
    unit = targets / scale
    layout = _CoreLayout(p.shape.dims, rank)
    rng = np.random.default_rng(seed)

    reps: List[DenseTensor] = []
    converged = 0

    for k in range(restarts):
        res = _fit(layout, indices, unit, rng.standard_normal(layout.size))
        err = float(np.linalg.norm(res.fun))

        if err > RESIDUAL_TOLERANCE:
            writer.debug(f"Restart {k}: residual {err:.3e}, discarded")
            continue

        converged += 1
        cores = layout.unpack(res.x)
        cores[0] = cores[0] * scale
        full = tt_contract(TTDecomposition(cores))

        if not any(full.relative_distance(t) <= cluster_tol for t in reps):
            writer.debug(f"Restart {k}: new completion #{len(reps) + 1}")
            reps.append(full)

    if converged == 0:
        raise NoFitFound(
            f"None of {restarts} restarts fitted the observed entries "
            f"with rank {rank.ranks}"
        )

    if converged < restarts:
        writer.info(f"{restarts - converged} of {restarts} restarts failed")

    return CompletionCount(len(reps), tuple(reps), converged, restarts)
