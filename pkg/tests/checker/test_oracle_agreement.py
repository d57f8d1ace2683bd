"""Combinatorial verdicts against the Jacobian rank and completion counts."""
import numpy as np
import pytest
from pytest_mock import MockerFixture

from ttcomplete.checker.abc import Verdict
from ttcomplete.checker.capacity import SubtensorSelection
from ttcomplete.checker.completability import check_finite, check_unique
from ttcomplete.logwriter import IWriter
from ttcomplete.oracle.completion import count_completions
from ttcomplete.oracle.polynomials import PolynomialSystem, jacobian_rank
from ttcomplete.pattern.constraint import (
    build_constraint_tensor,
    check_pivot_rows,
)
from ttcomplete.pattern.sampling import random_pattern
from ttcomplete.tensor.tt import random_tt, tt_contract


@pytest.mark.parametrize("seed", range(20))
def test_finite_verdict_matches_jacobian_rank(seed: int):
    rank = (1, 1)
    p = random_pattern((3, 3, 3), 0.9, seed)
    report = check_finite(p, rank)

    if not check_pivot_rows(p, rank).holds:
        assert report.verdict in (Verdict.Falsified, Verdict.NotGuaranteed)
        return

    assert report.verdict in (Verdict.FinitelyCompletable, Verdict.Falsified)

    ct = build_constraint_tensor(p, rank)
    system = PolynomialSystem(ct, rank)
    jr = jacobian_rank(system, SubtensorSelection(range(ct.K)))

    assert (report.verdict == Verdict.FinitelyCompletable) == (
        jr == report.required
    )


@pytest.mark.parametrize("seed", range(10))
def test_unique_verdict_matches_completion_count(
    seed: int, mocker: MockerFixture
):
    rank = (1, 1)
    shape = (4, 4, 4)
    p = random_pattern(shape, 0.95, seed)
    report = check_unique(p, rank)

    full = tt_contract(random_tt(shape, rank, np.random.default_rng(seed)))
    values = {x: full[x] for x in p}
    writer = mocker.Mock(spec=IWriter)
    res = count_completions(p, values, rank, 6, seed=seed, writer=writer)

    if report.verdict == Verdict.UniquelyCompletable:
        assert res.count == 1
        assert res.representatives[0].relative_distance(full) < 1e-4
    elif report.verdict == Verdict.Falsified:
        assert res.count > 1
