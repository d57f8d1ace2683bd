"""Command line front-end.

Exit codes: 0 success / certified, 1 usage or input error, 2 not enough
pivot rows, 3 falsified, 4 unknown, 5 genericity failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import sys
from pathlib import Path
from typing import Callable, Dict, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from . import VERSION
from .bounds.formulas import (
    CURVE_HEADER,
    TEMPLATE_ALIASES,
    TEMPLATES,
    bound_curves,
    curve_setup,
    parse_rank_template,
)
from .bounds.simulation import SWEEP_HEADER, phase_sweep
from .bounds.svg import render_svg
from .checker.abc import Verdict
from .checker.capacity import SubtensorSelection, independence_capacity
from .checker.completability import CSV_HEADER, check_finite, check_unique
from .checker.search import SearchBudget
from .fingerprint import digest
from .logwriter import LOGLEVELS, IWriter, create_cli_logwriter
from .oracle.completion import NoFitFound, count_completions
from .oracle.polynomials import (
    DEFAULT_RANK_TOLERANCE,
    PolynomialSystem,
    SingularPivotSystem,
    jacobian_ranks,
)
from .pattern.constraint import (
    Explicit,
    Lexicographic,
    PivotRowsMissing,
    PivotRule,
    SeededRandom,
    build_constraint_tensor,
)
from .pattern.sampling import Index, SamplingPattern
from .tensor.shape import RankVector
from .tensor.tt import SingularCanonicalBlock, random_tt, tt_contract
from .textio import (
    PatternFile,
    format_tensor,
    read_pattern,
    read_values,
    write_atomic,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NOT_GUARANTEED = 2
EXIT_FALSIFIED = 3
EXIT_UNKNOWN = 4
EXIT_GENERICITY = 5

FORMAT_VERSION = 1

VERDICT_EXIT = {
    Verdict.UniquelyCompletable: EXIT_OK,
    Verdict.FinitelyCompletable: EXIT_OK,
    Verdict.NotGuaranteed: EXIT_NOT_GUARANTEED,
    Verdict.Falsified: EXIT_FALSIFIED,
    Verdict.Unknown: EXIT_UNKNOWN,
}


class UsageError(ValueError):
    ...


class RunConfig(NamedTuple):
    command: str
    pattern: Optional[str] = None
    rank: Optional[Tuple[int, ...]] = None
    tolerance: float = DEFAULT_RANK_TOLERANCE
    budget: SearchBudget = SearchBudget()
    seeds: Tuple[int, ...] = (0,)
    out: Optional[str] = None
    format: str = "text"
    force: bool = False
    mode: str = ""  # finite | unique | jacobian | count
    pivots: str = "auto"
    pivot_seed: int = 0
    trials: int = 3
    restarts: int = 20
    cluster_tol: float = 1e-4
    values: Optional[str] = None
    jobs: int = 1
    p_grid: Tuple[float, ...] = ()
    shape: Optional[Tuple[int, ...]] = None
    template: str = "linear"
    rank_template: Optional[str] = None
    r_values: Optional[Tuple[int, ...]] = None
    n: Optional[int] = None
    d: Optional[int] = None
    eps: Optional[float] = None

    def fingerprint(self) -> str:
        return digest(self._replace(out=None))


class ArgumentParser(argparse.ArgumentParser):
    def error(self, message: str):  # type: ignore[override]
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def parse_ints(text: str) -> Tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.replace(",", " ").split())
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"expected integers: {text!r}") from e


def parse_seeds(text: str) -> Tuple[int, ...]:
    """ "a:b" (half-open range) or a comma separated list."""
    try:
        if ":" in text:
            a, b = text.split(":")
            return tuple(range(int(a), int(b)))
        return tuple(int(x) for x in text.split(","))
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"invalid seeds: {text!r}") from e


def parse_p_grid(text: str) -> Tuple[float, ...]:
    """ "start:stop:step" (both ends included) or a comma separated list."""
    try:
        if ":" in text:
            a, b, step = (float(x) for x in text.split(":"))
            if step <= 0 or b < a:
                raise ValueError(text)
            k = int(round((b - a) / step)) + 1
            return tuple(round(float(x), 12) for x in np.linspace(a, b, k))
        return tuple(float(x) for x in text.split(","))
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"invalid p grid: {text!r}") from e


def parse_range(text: str) -> Tuple[int, ...]:
    """ "a:b" (both ends included) or a single value."""
    try:
        if ":" in text:
            a, b = text.split(":")
            return tuple(range(int(a), int(b) + 1))
        return (int(text),)
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"invalid range: {text!r}") from e


def build_parser() -> ArgumentParser:
    parser = ArgumentParser(
        prog="ttcomplete",
        description="Finite and unique completability of tensors of "
        "given TT rank from their sampling pattern",
    )
    parser.add_argument("--version", action="version", version=VERSION)
    parser.add_argument("--loglevel", choices=LOGLEVELS, default="info")
    parser.add_argument("--logfile", action="append", default=[])
    parser.add_argument(
        "--tol",
        type=float,
        default=DEFAULT_RANK_TOLERANCE,
        help="relative singular value cutoff of numerical ranks",
    )

    # accepted after the subcommand as well
    tol = ArgumentParser(add_help=False)
    tol.add_argument("--tol", type=float, default=argparse.SUPPRESS)

    out = ArgumentParser(add_help=False)
    out.add_argument("--out", help="output directory (default: stdout)")

    pat = ArgumentParser(add_help=False)
    pat.add_argument("pattern", help="pattern file")
    pat.add_argument(
        "--pivots",
        choices=["auto", "lexicographic", "explicit", "random"],
        default="auto",
        help="auto: explicit when the file has pivot lines",
    )
    pat.add_argument("--pivot-seed", type=int, default=0)
    pat.add_argument("--force", action="store_true")

    budget = ArgumentParser(add_help=False)
    budget.add_argument(
        "--budget", type=int, default=SearchBudget().max_subsets
    )
    budget.add_argument(
        "--max-nodes", type=int, default=SearchBudget().max_nodes
    )
    budget.add_argument("--time-limit", type=float)
    budget.add_argument("--seed", type=int, default=0)

    sub = parser.add_subparsers(dest="command", required=True)

    rank = ArgumentParser(add_help=False)
    rank.add_argument("--rank", type=parse_ints, help="e.g. 2,2")

    sub.add_parser(
        "constraint",
        parents=[pat, rank, tol, out],
        help="list the constraint tensor",
    )

    p = sub.add_parser(
        "check",
        parents=[pat, rank, budget, tol, out],
        help="check completability",
    )
    g = p.add_mutually_exclusive_group()
    g.add_argument(
        "--finite", dest="mode", action="store_const", const="finite"
    )
    g.add_argument(
        "--unique", dest="mode", action="store_const", const="unique"
    )
    p.add_argument("--format", choices=["text", "csv"], default="text")

    p = sub.add_parser(
        "bounds", parents=[tol, out], help="sample complexity bounds"
    )
    p.add_argument(
        "--template",
        choices=[*TEMPLATES, *TEMPLATE_ALIASES, "custom"],
        default="linear",
    )
    p.add_argument("--rank-template", help='e.g. "r,2r,r^2"')
    p.add_argument("--r-range", type=parse_range)
    p.add_argument("--n", type=int)
    p.add_argument("--d", type=int)
    p.add_argument("--eps", type=float)
    p.add_argument(
        "--format",
        choices=["csv", "svg"],
        default="csv",
        help="svg: also write bounds.svg",
    )
    p.add_argument(
        "--svg", dest="format", action="store_const", const="svg"
    )

    p = sub.add_parser(
        "oracle", parents=[pat, tol, out], help="numerical algebraic checks"
    )
    p.add_argument(
        "--rank",
        type=parse_ints,
        nargs="?",
        const=(),
        help="TT rank, e.g. 2,2 (after PATTERN). Selects the Jacobian rank "
        "unless --count is given; bare --rank takes the rank of the file",
    )
    g = p.add_mutually_exclusive_group()
    g.add_argument(
        "--jacobian-rank", dest="mode", action="store_const", const="jacobian"
    )
    g.add_argument(
        "--count", dest="mode", action="store_const", const="count"
    )
    p.add_argument("--values", help="values file (default: generic values)")
    p.add_argument("--trials", type=int, default=3)
    p.add_argument("--seeds", type=parse_seeds, default=(0,))
    p.add_argument("--restarts", type=int, default=20)
    p.add_argument("--cluster-tol", type=float, default=1e-4)

    p = sub.add_parser(
        "sweep",
        parents=[budget, tol, out],
        help="verdict rates of random patterns",
    )
    p.add_argument("--shape", type=parse_ints, required=True)
    p.add_argument("--rank", type=parse_ints, required=True)
    p.add_argument("--p-grid", type=parse_p_grid, default="0.1:1:0.1")
    p.add_argument("--seeds", type=parse_seeds, default=tuple(range(10)))
    p.add_argument(
        "--unique", dest="mode", action="store_const", const="unique"
    )
    p.add_argument("--jobs", type=int, default=1)

    return parser


def make_config(args: argparse.Namespace) -> RunConfig:
    a = vars(args)
    tol = a.get("tol", DEFAULT_RANK_TOLERANCE)
    if not 0 < tol < 1:
        raise UsageError(f"--tol must be in (0, 1). Given {tol}")

    budget = SearchBudget(
        max_subsets=a.get("budget", SearchBudget().max_subsets),
        max_nodes=a.get("max_nodes", SearchBudget().max_nodes),
        time_limit=a.get("time_limit"),
        seed=a.get("seed", 0),
        jacobian_tolerance=tol,
    )

    if budget.max_subsets < 1 or budget.max_nodes < 1:
        raise UsageError("Search budgets must be positive")

    rank, mode = a.get("rank"), a.get("mode")
    if args.command == "check":
        mode = mode or "finite"
    elif args.command == "oracle":
        if mode is None and rank is None:
            raise UsageError("oracle needs --rank, --jacobian-rank or --count")
        mode = mode or "jacobian"
        rank = rank or None

    return RunConfig(
        command=args.command,
        pattern=a.get("pattern"),
        rank=rank,
        tolerance=tol,
        budget=budget,
        seeds=tuple(a.get("seeds", (0,))),
        out=a.get("out"),
        format=a.get("format") or "text",
        force=a.get("force", False),
        mode=mode or "",
        pivots=a.get("pivots", "auto"),
        pivot_seed=a.get("pivot_seed", 0),
        trials=a.get("trials", 3),
        restarts=a.get("restarts", 20),
        cluster_tol=a.get("cluster_tol", 1e-4),
        values=a.get("values"),
        jobs=a.get("jobs", 1),
        p_grid=tuple(a.get("p_grid", ())),
        shape=a.get("shape"),
        template=a.get("template", "linear"),
        rank_template=a.get("rank_template"),
        r_values=a.get("r_range"),
        n=a.get("n"),
        d=a.get("d"),
        eps=a.get("eps"),
    )


def _emit(config: RunConfig, fname: str, text: str):
    if config.out is None:
        sys.stdout.write(text)
    else:
        write_atomic(Path(config.out) / fname, text)


def _csv(rows: Sequence[Sequence[str]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerows(rows)
    return buf.getvalue()


def _load(
    config: RunConfig,
) -> Tuple[PatternFile, SamplingPattern, RankVector]:
    assert config.pattern is not None
    pf = read_pattern(config.pattern)
    ranks = config.rank if config.rank is not None else pf.rank
    if ranks is None:
        raise UsageError("No rank given: use --rank or a 'rank' line")
    rank = RankVector(ranks)
    rank.check_feasible(pf.shape)
    return pf, SamplingPattern(pf.shape, pf.observed), rank


def _pivot_rule(config: RunConfig, pf: PatternFile) -> PivotRule:
    if config.pivots == "explicit":
        if not pf.pivots:
            raise UsageError("--pivots explicit needs 'pivot' lines")
        return Explicit(pf.pivots)
    elif config.pivots == "random":
        return SeededRandom(config.pivot_seed)
    elif config.pivots == "auto" and pf.pivots:
        return Explicit(pf.pivots)
    return Lexicographic()


def cmd_constraint(config: RunConfig, writer: IWriter) -> int:
    pf, p, rank = _load(config)
    ct = build_constraint_tensor(
        p, rank, _pivot_rule(config, pf), config.force, writer
    )
    writer.info(f"Constraint tensor of {ct.K} columns, dims {ct.dims}")
    _emit(config, "constraint.csv", _csv(ct.to_rows()))
    return EXIT_OK


def cmd_check(config: RunConfig, writer: IWriter) -> int:
    pf, p, rank = _load(config)
    check = check_unique if config.mode == "unique" else check_finite
    report = check(
        p, rank, config.budget, _pivot_rule(config, pf), config.force, writer
    )
    report = report._replace(fingerprint=config.fingerprint())

    if config.format == "csv":
        _emit(config, "report.csv", _csv([CSV_HEADER, report.to_csv_row()]))
    else:
        _emit(config, "report.txt", report.to_text())

    writer.info(f"Verdict: {report.verdict.value}")
    return VERDICT_EXIT[report.verdict]


def cmd_bounds(config: RunConfig, writer: IWriter) -> int:
    if config.template == "custom":
        if config.rank_template is None:
            raise UsageError("--template custom needs --rank-template")
        text, r_values, n, eps = config.rank_template, (1,), 1000, 0.001
    else:
        text, r_values, n, eps = curve_setup(config.template)

    template = parse_rank_template(text)
    r_values = config.r_values or r_values
    n = config.n if config.n is not None else n
    eps = config.eps if config.eps is not None else eps

    rows = bound_curves(template, r_values, n, eps, config.d)
    _emit(
        config,
        "bounds.csv",
        _csv([CURVE_HEADER, *(row.to_csv_row() for row in rows)]),
    )

    if config.format == "svg":
        if config.out is None:
            raise UsageError("--format svg needs --out")
        title = f"rank ({text}), n = {n}, d = {template.order}, eps = {eps}"
        _emit(config, "bounds.svg", render_svg(rows, title))

    writer.info(f"Evaluated {len(rows)} rank values of template {text!r}")
    return EXIT_OK


def _generic_values(
    p: SamplingPattern, rank: RankVector, seed: int
) -> Dict[Index, float]:
    tt = random_tt(p.shape, rank, np.random.default_rng(seed))
    full = tt_contract(tt)
    return {x: full[x] for x in p}


def cmd_oracle(config: RunConfig, writer: IWriter) -> int:
    pf, p, rank = _load(config)
    lines = [f"format_version: {FORMAT_VERSION}"]

    if config.mode == "jacobian":
        ct = build_constraint_tensor(
            p, rank, _pivot_rule(config, pf), config.force, writer
        )
        sys_ = PolynomialSystem(ct, rank)
        sel = SubtensorSelection(range(ct.K))
        lines += [
            f"variables: {sys_.variable_count}",
            f"polynomials: {sys_.polynomial_count}",
            f"capacity: {independence_capacity(sel, ct, rank)}",
        ]
        for seed in config.seeds:
            ranks = jacobian_ranks(
                sys_, sel, config.trials, config.tolerance, seed, writer
            )
            lines.append(
                f"seed {seed}: rank {max(ranks)} "
                f"(trials {' '.join(map(str, ranks))})"
            )
    else:
        seed = config.seeds[0]
        if config.values is not None:
            values = read_values(config.values)
        else:
            values = _generic_values(p, rank, seed)
            writer.info(f"Using generic observed values from seed {seed}")

        res = count_completions(
            p,
            values,
            rank,
            config.restarts,
            config.cluster_tol,
            seed,
            writer,
        )
        lines += [
            f"clusters: {res.count}",
            f"converged: {res.converged}",
            f"restarts: {res.restarts}",
        ]
        for k, t in enumerate(res.representatives, 1):
            if config.out is not None:
                _emit(config, f"completion_{k}.txt", format_tensor(t, rank))

    lines.append(f"fingerprint: {config.fingerprint()}")
    _emit(config, "oracle.txt", "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_sweep(config: RunConfig, writer: IWriter) -> int:
    assert config.shape is not None and config.rank is not None
    rows = phase_sweep(
        config.shape,
        config.rank,
        config.p_grid,
        config.seeds,
        config.budget,
        config.mode == "unique",
        config.jobs,
        writer,
    )
    _emit(
        config,
        "sweep.csv",
        _csv([SWEEP_HEADER, *(row.to_csv_row() for row in rows)]),
    )
    return EXIT_OK


COMMANDS: Dict[str, Callable[[RunConfig, IWriter], int]] = {
    "constraint": cmd_constraint,
    "check": cmd_check,
    "bounds": cmd_bounds,
    "oracle": cmd_oracle,
    "sweep": cmd_sweep,
}


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    writer = create_cli_logwriter(args.loglevel, args.logfile)

    try:
        config = make_config(args)
        return COMMANDS[config.command](config, writer)
    except PivotRowsMissing as e:
        writer.error(str(e))
        return EXIT_NOT_GUARANTEED
    except (SingularPivotSystem, SingularCanonicalBlock, NoFitFound) as e:
        writer.error("Genericity failure: ", str(e))
        return EXIT_GENERICITY
    except (ValueError, OSError) as e:
        writer.error(str(e))
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
