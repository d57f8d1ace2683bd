from __future__ import annotations

import functools
from typing import Callable, Dict, List, Mapping, NamedTuple, Optional, Sequence

import numpy as np

from ..checker.abc import Verdict
from ..checker.completability import check_finite, check_unique
from ..checker.search import SearchBudget
from ..logwriter import IWriter, writer_or_default
from ..pattern.sampling import random_pattern
from ..runner.abc import IEvent, IJob, Job
from ..runner.event_logger import log_job_event
from ..runner.run import run_jobs
from ..runner.run_mp import run_jobs_mp_spawn
from ..tensor.shape import RankVector, Shape, as_rank, as_shape


def azuma_column_check(
    n_cells: int, k: int, p: float, seeds: Sequence[int]
) -> float:
    """Fraction of seeds for which Bernoulli(p) sampling of `n_cells`
    cells observes more than `k` of them."""
    if not 0 <= p <= 1:
        raise ValueError(f"Probability must be in [0, 1]. Given {p}")
    if not seeds:
        raise ValueError("At least one seed is required")

    hits = sum(
        1 for s in seeds if np.random.default_rng(s).binomial(n_cells, p) > k
    )
    return hits / len(seeds)


class SweepRow(NamedTuple):
    p: float
    trials: int
    counts: Mapping[Verdict, int]
    errors: int

    @property
    def certified_rate(self) -> float:
        ok = sum(n for v, n in self.counts.items() if v.certified)
        return ok / self.trials if self.trials else 0.0

    def to_csv_row(self) -> List[str]:
        return [
            repr(self.p),
            str(self.trials),
            *(str(self.counts.get(v, 0)) for v in Verdict),
            str(self.errors),
            repr(self.certified_rate),
        ]


SWEEP_HEADER = (
    "p",
    "trials",
    *(v.value for v in Verdict),
    "errors",
    "certified_rate",
)


def _sweep_point(
    dims: Sequence[int],
    ranks: Sequence[int],
    p: float,
    seed: int,
    budget: SearchBudget,
    unique: bool,
) -> str:
    pattern = random_pattern(dims, p, seed)
    check = check_unique if unique else check_finite
    return check(pattern, ranks, budget, force=False).verdict.value


def phase_sweep(
    shape: Shape | Sequence[int],
    rank: RankVector | Sequence[int],
    p_grid: Sequence[float],
    seeds: Sequence[int],
    budget: Optional[SearchBudget] = None,
    unique: bool = False,
    njobs: int = 1,
    writer: Optional[IWriter] = None,
) -> List[SweepRow]:
    """Verdict frequencies of random patterns over a grid of probabilities.

    For a fixed seed the patterns are nested in p, since each one thresholds
    the same uniform draws.
    """
    shape = as_shape(shape)
    rank = as_rank(rank)
    rank.check_feasible(shape)
    budget = budget or SearchBudget()
    writer = writer_or_default(writer)

    for p in p_grid:
        if not 0 <= p <= 1:
            raise ValueError(f"Probability must be in [0, 1]. Given {p}")

    points = [(j, s) for j in range(len(p_grid)) for s in seeds]
    jobs = [
        Job(
            f"p={p_grid[j]} seed={s}",
            functools.partial(
                _sweep_point,
                shape.dims,
                rank.ranks,
                p_grid[j],
                s,
                budget,
                unique,
            ),
        )
        for j, s in points
    ]

    callback: Callable[[IEvent[IJob]], None] = functools.partial(
        log_job_event, writer
    )

    if njobs <= 1:
        summary = run_jobs(jobs, True, callback)
    else:
        summary = run_jobs_mp_spawn(jobs, True, callback, njobs, writer)

    rows: List[SweepRow] = []
    for j, p in enumerate(p_grid):
        counts: Dict[Verdict, int] = {}
        errors = 0
        for i, (k, _) in enumerate(points):
            if k != j:
                continue
            if i in summary.results:
                v = Verdict(summary.results[i])
                counts[v] = counts.get(v, 0) + 1
            else:
                errors += 1
        rows.append(SweepRow(p, len(seeds) - errors, counts, errors))

    return rows
