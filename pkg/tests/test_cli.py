import csv
import io
from itertools import product
from pathlib import Path

import pytest
from pytest_mock import MockerFixture

from ttcomplete import cli
from ttcomplete.cli import main, parse_p_grid, parse_range, parse_seeds
from ttcomplete.tensor.shape import RankVector, Shape
from ttcomplete.textio import format_pattern

FIXTURES = Path(__file__).parent / "fixtures"


def _fixture(name: str) -> str:
    return str(FIXTURES / name)


def _full_pattern(tmp_path: Path) -> str:
    f = tmp_path / "full.txt"
    cells = list(product(range(1, 4), repeat=3))
    f.write_text(format_pattern(Shape((3, 3, 3)), cells, RankVector((2, 2))))
    return str(f)


def test_constraint_example(capsys: pytest.CaptureFixture[str]):
    assert main(["constraint", _fixture("constraint_example.txt")]) == 0

    rows = list(csv.reader(io.StringIO(capsys.readouterr().out)))
    assert rows[0] == ["column", "slice", "cell_1", "cell_2", "cell_3"]
    assert len(rows) == 4

    support = {cell for row in rows[1:] for cell in row[2:]}
    assert support == {
        "1 1 1",
        "1 2 1",
        "2 3 1",
        "3 3 1",
        "1 1 2",
        "2 1 2",
        "3 2 2",
        "1 3 3",
        "3 2 3",
    }


def test_constraint_empty_pattern(tmp_path: Path):
    f = tmp_path / "empty.txt"
    f.write_text("shape 2 2 2\nrank 1 1\n")
    assert main(["constraint", str(f)]) == 2


def test_check_verdicts(tmp_path: Path, capsys: pytest.CaptureFixture[str]):
    assert main(["check", _fixture("two_by_two.txt")]) == 0
    out = capsys.readouterr().out
    assert "verdict: finitely-completable" in out.splitlines()

    assert main(["check", _fixture("undersampled.txt")]) == 3
    assert main(["check", _full_pattern(tmp_path), "--budget", "5"]) == 4


def test_check_unique_on_two_by_two(capsys: pytest.CaptureFixture[str]):
    assert main(["check", _fixture("two_by_two.txt"), "--unique"]) == 4
    assert "verdict: unknown" in capsys.readouterr().out


def test_check_output_is_deterministic(tmp_path: Path):
    args = ["check", _fixture("duplicated.txt"), "--format", "csv"]
    assert main([*args, "--out", str(tmp_path / "a")]) == 3
    assert main([*args, "--out", str(tmp_path / "b")]) == 3

    a = (tmp_path / "a" / "report.csv").read_bytes()
    b = (tmp_path / "b" / "report.csv").read_bytes()
    assert a == b
    assert len(a.decode().splitlines()) == 2


@pytest.mark.parametrize(
    "template,lines",
    [("linear", 81), ("cubic", 21), ("fig1", 81), ("fig2", 21)],
)
def test_bounds_templates(
    template: str, lines: int, capsys: pytest.CaptureFixture[str]
):
    assert main(["bounds", "--template", template]) == 0
    assert len(capsys.readouterr().out.splitlines()) == lines


def test_bounds_aliases_match(capsys: pytest.CaptureFixture[str]):
    assert main(["bounds", "--template", "fig1"]) == 0
    fig1 = capsys.readouterr().out
    assert main(["bounds"]) == 0
    assert capsys.readouterr().out == fig1

    rows = list(csv.reader(io.StringIO(fig1)))
    assert [int(row[0]) for row in rows[1:]] == list(range(1, 81))


def test_bounds_custom_with_svg(tmp_path: Path):
    args = [
        "bounds",
        "--template",
        "custom",
        "--rank-template",
        "r,r^2,r",
        "--r-range",
        "1:4",
        "--n",
        "500",
        "--out",
        str(tmp_path),
    ]
    assert main([*args, "--format", "csv"]) == 0
    assert len((tmp_path / "bounds.csv").read_text().splitlines()) == 5
    assert not (tmp_path / "bounds.svg").exists()

    assert main([*args, "--format", "svg"]) == 0
    svg = (tmp_path / "bounds.svg").read_text()
    assert svg.count("<polyline") == 3

    (tmp_path / "bounds.svg").unlink()
    assert main([*args, "--svg"]) == 0
    assert (tmp_path / "bounds.svg").read_text() == svg


def test_oracle_count(tmp_path: Path, capsys: pytest.CaptureFixture[str]):
    args = [
        "oracle",
        _fixture("two_by_two.txt"),
        "--count",
        "--values",
        _fixture("two_by_two_values.txt"),
        "--restarts",
        "8",
    ]
    assert main(args) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "format_version: 1"
    assert "clusters: 1" in lines
    assert "restarts: 8" in lines
    assert lines[-1].startswith("fingerprint: ")

    assert main([*args, "--out", str(tmp_path)]) == 0
    assert (tmp_path / "oracle.txt").exists()
    assert (tmp_path / "completion_1.txt").read_text().startswith(
        "shape 2 2 2\nrank 1 1\ndense\n"
    )


def test_oracle_jacobian_rank(capsys: pytest.CaptureFixture[str]):
    args = [
        "oracle",
        _fixture("two_by_two.txt"),
        "--jacobian-rank",
        "--seeds",
        "0,1",
    ]
    assert main(args) == 0
    lines = capsys.readouterr().out.splitlines()
    assert "variables: 2" in lines
    assert "polynomials: 2" in lines
    assert "capacity: 2" in lines
    assert "seed 0: rank 2 (trials 2 2 2)" in lines
    assert "seed 1: rank 2 (trials 2 2 2)" in lines


@pytest.mark.parametrize(
    "flags",
    [
        ["--rank"],
        ["--rank", "1,1"],
        ["--rank", "--tol", "1e-6"],
        ["--jacobian-rank", "--rank", "1,1"],
    ],
)
def test_oracle_rank_flag(flags: list, capsys: pytest.CaptureFixture[str]):
    assert main(["oracle", _fixture("two_by_two.txt"), *flags]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert "variables: 2" in lines
    assert "seed 0: rank 2 (trials 2 2 2)" in lines


def test_oracle_rank_with_count(capsys: pytest.CaptureFixture[str]):
    args = [
        "oracle",
        _fixture("two_by_two.txt"),
        "--rank",
        "1,1",
        "--count",
        "--values",
        _fixture("two_by_two_values.txt"),
        "--restarts",
        "4",
    ]
    assert main(args) == 0
    assert "clusters: 1" in capsys.readouterr().out.splitlines()


@pytest.mark.parametrize(
    "args",
    [
        ["--tol", "1e-6", "check", "<pattern>"],
        ["check", "<pattern>", "--tol", "1e-6"],
        ["--tol", "1e-6", "constraint", "<pattern>"],
        ["bounds", "--template", "fig2", "--tol", "1e-6"],
    ],
)
def test_tol_is_global(args: list, mocker: MockerFixture):
    spy = mocker.spy(cli, "make_config")
    args = [_fixture("two_by_two.txt") if a == "<pattern>" else a for a in args]
    assert main(args) == 0
    config = spy.spy_return
    assert config.tolerance == 1e-6
    assert config.budget.jacobian_tolerance == 1e-6


def test_sweep(capsys: pytest.CaptureFixture[str]):
    args = [
        "sweep",
        "--shape",
        "3,3,3",
        "--rank",
        "1,1",
        "--p-grid",
        "0.5:1:0.5",
        "--seeds",
        "0:3",
    ]
    assert main(args) == 0
    rows = list(csv.reader(io.StringIO(capsys.readouterr().out)))
    assert rows[0][:2] == ["p", "trials"]
    assert [row[0] for row in rows[1:]] == ["0.5", "1.0"]
    assert rows[-1][-1] == "1.0"


@pytest.mark.parametrize(
    "args",
    [
        ["bounds", "--svg"],
        ["bounds", "--template", "custom"],
        ["check", "two_by_two.txt"],
        ["check", "--rank", "1,1", "<missing>"],
        ["check", "--budget", "0", "<pattern>"],
        ["oracle", "--jacobian-rank", "--tol", "2", "<pattern>"],
        ["--tol", "0", "check", "<pattern>"],
        ["oracle", "<pattern>"],
        ["bounds", "--format", "svg"],
    ],
)
def test_usage_errors(args: list, tmp_path: Path):
    if args[-1] == "<pattern>":
        args = [*args[:-1], _fixture("two_by_two.txt")]
    elif args[-1] == "<missing>":
        args = [*args[:-1], str(tmp_path / "nope.txt")]
    elif args[-1] == "two_by_two.txt":
        f = tmp_path / "norank.txt"
        f.write_text("shape 2 2 2\n1 1 1\n")
        args = [*args[:-1], str(f)]
    assert main(args) == 1


@pytest.mark.parametrize(
    "args",
    [
        [],
        ["check"],
        ["bounds", "--r-range", "a"],
        ["bounds", "--format", "pdf"],
        ["bounds", "--template", "fig3"],
    ],
)
def test_argparse_errors(args: list):
    with pytest.raises(SystemExit) as e:
        main(args)
    assert e.value.code == 1


def test_parsers():
    assert parse_seeds("2:5") == (2, 3, 4)
    assert parse_seeds("1,7") == (1, 7)
    assert parse_range("3:5") == (3, 4, 5)
    assert parse_range("4") == (4,)
    assert parse_p_grid("0.1:0.3:0.1") == (0.1, 0.2, 0.3)
    assert parse_p_grid("0.5,1") == (0.5, 1.0)
