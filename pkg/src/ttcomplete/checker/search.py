from __future__ import annotations

import time
from typing import List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from .capacity import Profile, SubsetInequality, profile_of

Masks = Sequence[Tuple[int, ...]]


class SearchBudget(NamedTuple):
    max_subsets: int = 2**22
    max_nodes: int = 10**5
    exhaustive_limit: int = 22
    random_trials: int = 10_000
    time_limit: Optional[float] = None  # seconds
    seed: int = 0
    jacobian_trials: int = 3
    jacobian_tolerance: float = 1e-8


class BudgetExhausted(Exception):
    ...


class SearchEffort:
    """Counters shared by every search step of one check."""

    def __init__(self, budget: SearchBudget):
        self.budget = budget
        self.subsets = 0
        self.nodes = 0
        self.pruned = 0
        self._started = time.monotonic()

    def subset(self):
        self.subsets += 1
        if self.subsets > self.budget.max_subsets:
            raise BudgetExhausted(
                f"examined more than {self.budget.max_subsets} subsets"
            )
        if self.subsets % 4096 == 0:
            self._check_time()

    def node(self):
        self.nodes += 1
        if self.nodes > self.budget.max_nodes:
            raise BudgetExhausted(
                f"expanded more than {self.budget.max_nodes} search nodes"
            )
        self._check_time()

    def _check_time(self):
        limit = self.budget.time_limit
        if limit is not None and time.monotonic() - self._started > limit:
            raise BudgetExhausted(f"exceeded the time limit of {limit}s")


def _or(a: Tuple[int, ...], b: Tuple[int, ...]) -> Tuple[int, ...]:
    return tuple(x | y for x, y in zip(a, b))


def find_violation(
    masks: Masks,
    candidates: Sequence[int],
    ineq: SubsetInequality,
    effort: SearchEffort,
    max_size: int,
    anchor: Optional[int] = None,
) -> Optional[Tuple[int, ...]]:
    """Smallest violating subset of `candidates`, lexicographically least.

    Subsets are generated level by level, each extended only by candidates
    after its last element. A subset that is saturated for `max_size` is
    not extended: its supersets cannot violate either. When `anchor` is
    given, only subsets containing it are considered (it is not part of
    `candidates`).
    """
    cands = sorted(candidates)
    modes = len(masks[cands[0]] if cands else masks[anchor or 0])
    base: Tuple[int, ...] = (0,) * modes
    size = 0

    if anchor is not None:
        base = masks[anchor]
        size = 1
        effort.subset()
        prof = profile_of(base)
        if not ineq.holds(prof, 1):
            return (anchor,)
        if ineq.saturated(prof, 1, max_size):
            effort.pruned += 1
            return None

    frontier: List[Tuple[Tuple[int, ...], Tuple[int, ...]]] = [((), base)]

    while frontier:
        size += 1
        level: List[Tuple[Tuple[int, ...], Tuple[int, ...]]] = []
        violators: List[Tuple[int, ...]] = []

        for pos, union in frontier:
            start = pos[-1] + 1 if pos else 0
            for k in range(start, len(cands)):
                effort.subset()
                u = _or(union, masks[cands[k]])
                prof = profile_of(u)
                nxt = pos + (k,)
                if not ineq.holds(prof, size):
                    violators.append(nxt)
                elif ineq.saturated(prof, size, max_size):
                    effort.pruned += 1
                else:
                    level.append((nxt, u))

        if violators:
            best = [cands[k] for k in min(violators)]
            if anchor is not None:
                best.append(anchor)
            return tuple(sorted(best))

        frontier = level

    return None


def random_violation(
    masks: Masks,
    candidates: Sequence[int],
    ineq: SubsetInequality,
    effort: SearchEffort,
) -> Optional[Tuple[int, ...]]:
    """Uniform random subsets; near-violations are shrunk greedily."""
    cands = sorted(candidates)
    n = len(cands)
    rng = np.random.default_rng(effort.budget.seed)
    modes = len(masks[cands[0]])

    def prof(sub: Sequence[int]) -> Profile:
        u: Tuple[int, ...] = (0,) * modes
        for c in sub:
            u = _or(u, masks[c])
        return profile_of(u)

    for _ in range(effort.budget.random_trials):
        size = int(rng.integers(1, n + 1))
        sub = [cands[j] for j in sorted(rng.choice(n, size, replace=False))]
        effort.subset()
        slack = ineq.slack(prof(sub), len(sub))

        if slack > 1:
            continue

        # drop the element whose removal lowers the slack most
        while slack >= 0 and len(sub) > 1:
            options = [
                (ineq.slack(prof(sub[:j] + sub[j + 1 :]), len(sub) - 1), j)
                for j in range(len(sub))
            ]
            for _ in options:
                effort.subset()
            best, j = min(options)
            if best > slack:
                break
            sub.pop(j)
            slack = best

        if slack < 0:
            return tuple(sub)

    return None


def search_selection(
    masks: Masks,
    candidates: Sequence[int],
    size: int,
    ineq: SubsetInequality,
    effort: SearchEffort,
) -> Optional[Tuple[int, ...]]:
    """A `size`-subset of `candidates` all of whose subsets satisfy `ineq`.

    Depth-first with candidates ordered by marginal score, highest first.
    After a candidate has been explored at a node it is dropped for the
    remaining siblings, and candidates that cannot join the current
    selection are dropped for the whole subtree, so a finished search
    without result proves that no such subset exists. Returns None in
    that case.
    """
    if size <= 0:
        return ()
    if not candidates:
        return None

    modes = len(masks[candidates[0]])

    def admits(chosen: Sequence[int], c: int) -> bool:
        found = find_violation(
            masks, chosen, ineq, effort, len(chosen) + 1, anchor=c
        )
        return found is None

    def rec(
        chosen: List[int], union: Tuple[int, ...], allowed: List[int]
    ) -> Optional[Tuple[int, ...]]:
        if len(chosen) == size:
            return tuple(sorted(chosen))
        if len(chosen) + len(allowed) < size:
            return None

        effort.node()
        base = ineq.score(profile_of(union))
        ok = [c for c in allowed if admits(chosen, c)]

        def gain(c: int) -> float:
            return ineq.score(profile_of(_or(union, masks[c]))) - base

        ok.sort(key=lambda c: (-gain(c), c))

        for j, c in enumerate(ok):
            if len(chosen) + len(ok) - j < size:
                break
            res = rec(chosen + [c], _or(union, masks[c]), ok[j + 1 :])
            if res is not None:
                return res

        return None

    return rec([], (0,) * modes, sorted(candidates))
