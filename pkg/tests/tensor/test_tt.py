import numpy as np
import pytest

from ttcomplete.tensor.dense import DenseTensor
from ttcomplete.tensor.shape import RankVector
from ttcomplete.tensor.tt import (
    RankInfeasible,
    SingularCanonicalBlock,
    TTDecomposition,
    canonicalize,
    entry_gradient,
    has_proper_structure,
    is_minimal,
    random_tt,
    tt_contract,
    tt_entry,
    tt_rank,
    tt_svd,
)


def test_contract_matches_entries():
    tt = random_tt((2, 3, 4), (2, 3), np.random.default_rng(0))
    full = tt_contract(tt)
    for idx in [(1, 1, 1), (2, 3, 4), (1, 2, 3), (2, 1, 4)]:
        assert full[idx] == pytest.approx(tt_entry(tt.cores, idx))


def test_contract_rank_one():
    a, b, c = np.array([1.0, 2.0]), np.array([3.0, 5.0]), np.array([7.0, 1.0])
    tt = TTDecomposition(
        [a.reshape(1, 2, 1), b.reshape(1, 2, 1), c.reshape(1, 2, 1)]
    )
    expect = np.einsum("i,j,k->ijk", a, b, c)
    np.testing.assert_allclose(tt_contract(tt).array, expect)


def test_decomposition_validation():
    rng = np.random.default_rng(0)
    with pytest.raises(ValueError):
        TTDecomposition([rng.standard_normal((1, 2, 2))])
    with pytest.raises(ValueError):
        TTDecomposition(
            [rng.standard_normal((1, 2, 2)), rng.standard_normal((3, 2, 1))]
        )
    with pytest.raises(ValueError):
        TTDecomposition(
            [rng.standard_normal((2, 2, 2)), rng.standard_normal((2, 2, 1))]
        )


@pytest.mark.parametrize(
    "shape,rank",
    [
        ((3, 4, 3), (2, 2)),
        ((2, 3, 3, 2), (2, 3, 2)),
        ((4, 4), (3,)),
    ],
)
def test_svd_round_trip(shape: tuple, rank: tuple):
    tt = random_tt(shape, rank, np.random.default_rng(1))
    full = tt_contract(tt)

    assert tt_rank(full) == RankVector(rank)

    # a larger upper bound still yields the minimal rank
    loose = tuple(r + 1 for r in rank)
    svd = tt_svd(full, loose)
    assert svd.rank == RankVector(rank)
    assert tt_contract(svd).relative_distance(full) < 1e-10


def test_svd_rank_too_small():
    full = tt_contract(random_tt((3, 3, 3), (2, 2), np.random.default_rng(2)))
    with pytest.raises(RankInfeasible):
        tt_svd(full, (1, 2))


def test_rank_of_zero_tensor():
    assert tt_rank(DenseTensor.zeros((2, 3, 2))) == RankVector((0, 0))


def test_canonicalize():
    tt = random_tt((3, 3, 3), (2, 2), np.random.default_rng(3))
    canon = canonicalize(tt)

    for i, r in enumerate(canon.rank):
        np.testing.assert_allclose(
            canon.cores[i][0, :r, :], np.eye(r), atol=1e-10
        )

    assert tt_contract(canon).relative_distance(tt_contract(tt)) < 1e-10


def test_canonicalize_custom_rows():
    tt = random_tt((3, 3, 3), (2, 2), np.random.default_rng(4))
    rows = [(2, 3), (1, 3)]
    canon = canonicalize(tt, rows=rows)
    np.testing.assert_allclose(
        canon.cores[0][0, [1, 2], :], np.eye(2), atol=1e-10
    )
    np.testing.assert_allclose(
        canon.cores[1][0, [0, 2], :], np.eye(2), atol=1e-10
    )


def test_canonicalize_singular_block():
    rng = np.random.default_rng(5)
    first = rng.standard_normal((1, 3, 2))
    first[0, 1, :] = first[0, 0, :]  # rows 1 and 2 are parallel
    tt = TTDecomposition([first, rng.standard_normal((2, 3, 1))])

    assert not has_proper_structure(tt)
    assert has_proper_structure(tt, [(1, 3)])

    with pytest.raises(SingularCanonicalBlock) as e:
        canonicalize(tt)
    assert e.value.core == 1


def test_has_proper_structure_rows_checked():
    tt = random_tt((3, 3, 3), (2, 2), np.random.default_rng(6))
    with pytest.raises(ValueError):
        has_proper_structure(tt, [(1, 1), (1, 2)])
    with pytest.raises(ValueError):
        has_proper_structure(tt, [(1, 4), (1, 2)])


def test_proper_structure_needs_disjoint_rows():
    tt = random_tt((3, 3, 3), (2, 2), np.random.default_rng(6))

    # slices 1 and 2 of core 2 at the same row 3
    shared = [(1, 2), ((1, 3), (2, 3))]
    assert not has_proper_structure(tt, shared)
    with pytest.raises(ValueError, match="share a row"):
        canonicalize(tt, rows=shared)

    rows = [(1, 2), ((2, 1), (1, 3))]
    assert has_proper_structure(tt, rows)
    canon = canonicalize(tt, rows=rows)
    np.testing.assert_allclose(
        canon.cores[1][[1, 0], [0, 2], :], np.eye(2), atol=1e-10
    )
    assert tt_contract(canon).relative_distance(tt_contract(tt)) < 1e-10

    with pytest.raises(ValueError):
        has_proper_structure(tt, [(1, 2), ((3, 1), (1, 3))])


def test_entry_gradient_finite_differences():
    tt = random_tt((2, 3, 2), (2, 2), np.random.default_rng(7))
    cores = [c.copy() for c in tt.cores]
    idx = (2, 3, 1)
    value, grads = entry_gradient(cores, idx)
    assert value == pytest.approx(tt_entry(cores, idx))

    h = 1e-6
    for i, core in enumerate(cores):
        for pos in np.ndindex(*core.shape):
            bumped = [c.copy() for c in cores]
            bumped[i][pos] += h
            fd = (tt_entry(bumped, idx) - value) / h
            assert grads[i][pos] == pytest.approx(fd, abs=1e-4)


def test_entry_gradient_with_closing_vector():
    tt = random_tt((2, 3, 2), (2, 2), np.random.default_rng(8))
    last = tt.cores[2][:, 1, 0]
    value, grads = entry_gradient(tt.cores[:2], (2, 1), last=last)
    assert value == pytest.approx(tt_entry(tt.cores, (2, 1, 2)))
    assert len(grads) == 2


def test_is_minimal():
    tt = random_tt((3, 3, 3), (2, 2), np.random.default_rng(9))
    assert is_minimal(tt)

    rng = np.random.default_rng(10)
    first = rng.standard_normal((1, 3, 2))
    first[0, :, 1] = first[0, :, 0]  # left unfolding of rank 1
    redundant = TTDecomposition([first, rng.standard_normal((2, 3, 1))])
    assert not is_minimal(redundant)
