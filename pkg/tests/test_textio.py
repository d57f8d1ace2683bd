from pathlib import Path

import numpy as np
import pytest

from ttcomplete.tensor.dense import DenseTensor
from ttcomplete.tensor.shape import RankVector, Shape
from ttcomplete.textio import (
    FormatError,
    format_pattern,
    format_tensor,
    read_pattern,
    read_tensor,
    read_values,
    write_atomic,
)

FIXTURES = Path(__file__).parent / "fixtures"


def test_read_pattern_fixture():
    pf = read_pattern(FIXTURES / "constraint_example.txt")
    assert pf.shape == Shape((3, 3, 3))
    assert pf.rank == RankVector((2, 2))
    assert len(pf.observed) == 9
    assert len(pf.pivots) == 6
    assert pf.observed[0] == (1, 1, 1)


def test_read_values_fixture():
    values = read_values(FIXTURES / "two_by_two_values.txt")
    assert values == {
        (1, 1, 1): 2.0,
        (2, 1, 1): 3.0,
        (1, 2, 1): 5.0,
        (1, 1, 2): 7.0,
    }


def test_pattern_text(tmp_path: Path):
    text = format_pattern(
        Shape((2, 3)), [(1, 1), (2, 3)], RankVector((1,)), [(1, 1)]
    )
    assert text == "shape 2 3\nrank 1\n1 1\n2 3\npivot 1 1\n"

    f = tmp_path / "p.txt"
    write_atomic(f, text)
    pf = read_pattern(f)
    assert pf.observed == ((1, 1), (2, 3))
    assert pf.pivots == ((1, 1),)


def test_tensor_file(tmp_path: Path):
    arr = np.arange(6, dtype=float).reshape((2, 3))
    t = DenseTensor.from_array(arr)
    f = tmp_path / "t.txt"
    write_atomic(f, format_tensor(t, RankVector((1,))))

    tf = read_tensor(f)
    assert tf.rank == RankVector((1,))
    assert tf.tensor is not None
    np.testing.assert_array_equal(tf.tensor.array, arr)

    f.write_text("shape 2 2\n")
    assert read_tensor(f).tensor is None


@pytest.mark.parametrize(
    "text,lineno",
    [
        ("", 1),
        ("rank 1\n", 1),
        ("shape 2 2\n1 1\n1 x\n", 3),
        ("shape 2 2\n1 1\n\n1 1\n", 4),
        ("shape 2 2\n# comment\n3 1\n", 3),
        ("shape 2 2\n1 1 1\n", 2),
        ("shape 2 2\npivot 0 1\n", 2),
        ("shape 0 2\n", 1),
    ],
)
def test_read_pattern_errors(tmp_path: Path, text: str, lineno: int):
    f = tmp_path / "p.txt"
    f.write_text(text)
    with pytest.raises(FormatError) as e:
        read_pattern(f)
    assert e.value.lineno == lineno


@pytest.mark.parametrize(
    "text",
    [
        "value 1 1 nan\n",
        "value 1 1 inf\n",
        "value 1 1 1.0\nvalue 1 1 2.0\n",
        "val 1 1 1.0\n",
        "value 1\n",
        "value 1 1 abc\n",
    ],
)
def test_read_values_errors(tmp_path: Path, text: str):
    f = tmp_path / "v.txt"
    f.write_text(text)
    with pytest.raises(FormatError):
        read_values(f)


def test_read_tensor_errors(tmp_path: Path):
    f = tmp_path / "t.txt"
    f.write_text("shape 2 2\ndense\n1 2 3\n")
    with pytest.raises(FormatError):
        read_tensor(f)

    f.write_text("shape 2 2\nsparse\n")
    with pytest.raises(FormatError):
        read_tensor(f)


def test_write_atomic_leaves_no_temp(tmp_path: Path):
    f = tmp_path / "sub" / "out.txt"
    write_atomic(f, "a\n")
    write_atomic(f, "b\n")
    assert f.read_text() == "b\n"
    assert [p.name for p in f.parent.iterdir()] == ["out.txt"]
