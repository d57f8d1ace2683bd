from fractions import Fraction
from pathlib import Path

import pytest

from ttcomplete.checker.capacity import (
    CapacityInequality,
    ModeInequality,
    SubtensorSelection,
    capacity_of,
    independence_capacity,
    mode_target,
    nonzero_rows,
)
from ttcomplete.pattern.constraint import PivotRules, build_constraint_tensor
from ttcomplete.pattern.sampling import SamplingPattern
from ttcomplete.tensor.shape import RankVector
from ttcomplete.textio import read_pattern

FIXTURES = Path(__file__).parents[1] / "fixtures"


def _example_ct(rank: tuple):
    pf = read_pattern(FIXTURES / "constraint_example.txt")
    p = SamplingPattern(pf.shape, pf.observed)
    return build_constraint_tensor(p, rank, PivotRules.Explicit(pf.pivots))


def test_selection():
    sel = SubtensorSelection([3, 1, 3, 0])
    assert sel.columns == (0, 1, 3)
    assert sel.external() == (1, 2, 4)
    assert len(sel) == 3
    assert sel == SubtensorSelection((0, 1, 3))

    with pytest.raises(ValueError):
        SubtensorSelection([-1])


def test_nonzero_rows():
    ct = _example_ct((2, 2))
    first = SubtensorSelection([0])
    assert nonzero_rows(first, ct, 1) == 3
    assert nonzero_rows(first, ct, 2) == 2
    assert nonzero_rows(SubtensorSelection(range(ct.K)), ct, 1) == 3
    assert nonzero_rows(SubtensorSelection(()), ct, 1) == 0

    with pytest.raises(IndexError):
        nonzero_rows(first, ct, 3)
    with pytest.raises(IndexError):
        nonzero_rows(SubtensorSelection([5]), ct, 1)


def test_capacity_of():
    # r = (1, 2, 2, 1): (2 m_1 - 4)^+ + (4 m_2 - 4)^+
    rank = RankVector((2, 2))
    assert capacity_of((1, 1), rank) == 0
    assert capacity_of((3, 2), rank) == 2 + 4
    assert capacity_of((2, 3), rank) == 0 + 8


def test_independence_capacity_example():
    ct = _example_ct((1, 2))
    rank = RankVector((1, 2))
    # every single column touches 3 rows of mode 1 and 2 rows of mode 2
    for k in range(ct.K):
        assert independence_capacity(SubtensorSelection([k]), ct, rank) == 2
    assert independence_capacity(SubtensorSelection(range(3)), ct, rank) == 4


def test_capacity_inequality():
    ineq = CapacityInequality(RankVector((1, 1)))
    assert ineq.slack((2, 2), 2) == 0
    assert ineq.holds((2, 2), 2)
    assert not ineq.holds((1, 2), 2)
    assert ineq.saturated((3, 3), 1, 4)
    assert not ineq.saturated((2, 2), 1, 3)
    assert "capacity 1 < t = 2" in ineq.describe((1, 2), 2)


def test_mode_inequality():
    rank = RankVector((2, 1))
    assert mode_target(3, rank, 1) == 3 - 2
    assert mode_target(3, rank, 2) == 3 - 0

    ineq = ModeInequality(rank, 1, 1)
    assert ineq.q == Fraction(2)
    # m - q - (t - q (t - M + 1)^+) with t = 1, M = 1
    assert ineq.slack((1, 1), 1) == 1 - 2 - (1 - 2)
    assert ineq.holds((1, 1), 1)
    assert ineq.score((3, 1)) == 3

    ineq = ModeInequality(RankVector((1, 1)), 2, 2)
    assert ineq.slack((1, 1), 1) == 1 - 1 - 1
    assert not ineq.holds((1, 1), 1)
    assert ineq.holds((1, 2), 1)
