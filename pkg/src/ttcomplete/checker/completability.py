"""Deciding finite and unique completability from the sampling pattern.

A pattern is finitely completable when the constraint tensor holds
M = free_variable_count columns whose polynomials are algebraically
independent. Every subset of such columns has independence capacity at
least its size, so a capacity violation falsifies. The converse fails: a
selection passing the capacity search is only a candidate, and the rank of
the Jacobian at a generic point confirms it or replaces dependent columns.

Unique completability additionally needs, per mode i < d, M_i further
columns (disjoint from everything else selected) whose every subset
satisfies the mode inequality.
"""
from __future__ import annotations

from typing import List, NamedTuple, Optional, Sequence, Tuple

from ..logwriter import IWriter, writer_or_default
from ..oracle.polynomials import (
    CanonicalFixingUnavailable,
    PolynomialSystem,
    SingularPivotSystem,
    jacobian_rank,
    scan_rows,
)
from ..pattern.constraint import (
    ConstraintTensor,
    PivotRule,
    build_constraint_tensor,
    check_pivot_rows,
)
from ..pattern.sampling import SamplingPattern
from ..tensor.shape import RankVector, as_rank, free_variable_count
from .abc import ConditionResult, ConditionResults, Falsified, Verdict
from .capacity import (
    CapacityInequality,
    ModeInequality,
    Profile,
    SubtensorSelection,
    capacity_of,
    mode_target,
    profile_of,
    selection_profile,
    union_masks,
)
from .search import (
    BudgetExhausted,
    SearchBudget,
    SearchEffort,
    find_violation,
    random_violation,
    search_selection,
)

FORMAT_VERSION = 1

CSV_HEADER = (
    "verdict",
    "mode",
    "required",
    "columns",
    "witness",
    "witness_profile",
    "subsets",
    "nodes",
    "pruned",
    "reason",
)


class CompletabilityReport(NamedTuple):
    verdict: Verdict
    shape: Tuple[int, ...]
    rank: Tuple[int, ...]
    required: int  # M
    columns: int  # K
    # exhaustive | pruned-exhaustive | randomized | counting | jacobian
    mode: str
    witness: Optional[SubtensorSelection] = None
    witness_profile: Optional[Profile] = None
    certificates: Tuple[SubtensorSelection, ...] = ()
    subsets: int = 0
    nodes: int = 0
    pruned: int = 0
    reason: str = ""
    notes: Tuple[str, ...] = ()
    fingerprint: Optional[str] = None

    def to_text(self) -> str:
        def cols(sel: Optional[SubtensorSelection]) -> str:
            return "-" if sel is None else " ".join(map(str, sel.external()))

        lines = [
            f"format_version: {FORMAT_VERSION}",
            f"verdict: {self.verdict.value}",
            f"shape: {' '.join(map(str, self.shape))}",
            f"rank: {' '.join(map(str, self.rank))}",
            f"required: {self.required}",
            f"columns: {self.columns}",
            f"mode: {self.mode}",
            f"witness: {cols(self.witness)}",
        ]
        if self.witness_profile is not None:
            prof = " ".join(map(str, self.witness_profile))
            lines.append(f"witness_profile: {prof}")
        for j, sel in enumerate(self.certificates):
            lines.append(f"certificate_{j}: {cols(sel)}")
        lines += [
            f"subsets: {self.subsets}",
            f"nodes: {self.nodes}",
            f"pruned: {self.pruned}",
            f"reason: {self.reason}",
        ]
        lines.extend(f"note: {n}" for n in self.notes)
        if self.fingerprint is not None:
            lines.append(f"fingerprint: {self.fingerprint}")
        return "\n".join(lines) + "\n"

    def to_csv_row(self) -> List[str]:
        witness = "" if self.witness is None else self.witness
        return [
            self.verdict.value,
            self.mode,
            str(self.required),
            str(self.columns),
            " ".join(map(str, witness.external())) if witness else "",
            " ".join(map(str, self.witness_profile or ())),
            str(self.subsets),
            str(self.nodes),
            str(self.pruned),
            self.reason,
        ]


def _effort_mode(effort: SearchEffort) -> str:
    return "pruned-exhaustive" if effort.pruned else "exhaustive"


def check_condition_ii(
    sel: SubtensorSelection,
    ct: ConstraintTensor,
    rank: RankVector | Sequence[int],
    budget: Optional[SearchBudget] = None,
    effort: Optional[SearchEffort] = None,
) -> ConditionResult:
    """Whether the polynomials of `sel` are algebraically independent.

    Selections up to `budget.exhaustive_limit` columns are enumerated
    (with pruning) for a subset whose capacity is below its size. When
    there is none, the Jacobian at a generic point decides. Larger
    selections are only sampled at random and never come back Verified.
    """
    rank = as_rank(rank)
    sel.check(ct)
    budget = budget or SearchBudget()
    effort = effort or SearchEffort(budget)
    ineq = CapacityInequality(rank)
    cols = sel.columns

    if not cols:
        return ConditionResults.Verified()

    def falsified(witness: Tuple[int, ...]) -> Falsified:
        prof = selection_profile(SubtensorSelection(witness), ct)
        return ConditionResults.Falsified(
            witness, ineq.describe(prof, len(witness))
        )

    try:
        if len(cols) <= budget.exhaustive_limit:
            found = find_violation(ct.masks, cols, ineq, effort, len(cols))
            if found is None:
                return _confirm_independent(sel, ct, rank, budget)
            return falsified(found)

        found = random_violation(ct.masks, cols, ineq, effort)
    except BudgetExhausted as e:
        return ConditionResults.Unknown(str(e))

    if found is not None:
        return falsified(found)

    return ConditionResults.Unknown(
        f"no violation among {budget.random_trials} random subsets of "
        f"{len(cols)} columns"
    )


def _confirm_independent(
    sel: SubtensorSelection,
    ct: ConstraintTensor,
    rank: RankVector,
    budget: SearchBudget,
) -> ConditionResult:
    tol = budget.jacobian_tolerance
    try:
        system = PolynomialSystem(ct, rank)
        scan = scan_rows(
            system, sel.columns, tol, budget.seed, stop_at_rejection=True
        )
        if scan.rejected is None:
            return ConditionResults.Verified()

        witness = tuple(sorted((*scan.basis, scan.rejected)))
        jr = jacobian_rank(
            system,
            SubtensorSelection(witness),
            budget.jacobian_trials,
            tol,
            budget.seed + 1,
        )
    except (SingularPivotSystem, CanonicalFixingUnavailable) as e:
        return ConditionResults.Unknown(
            f"capacity suffices but the Jacobian check failed: {e}"
        )

    t = len(witness)
    if jr < t:
        return ConditionResults.Falsified(
            witness,
            f"Jacobian rank {jr} < t = {t} although the capacity suffices",
        )
    return ConditionResults.Unknown(
        f"Jacobian of columns {[c + 1 for c in witness]} lost rank at one "
        "point only"
    )


def _report(
    ct: ConstraintTensor,
    rank: RankVector,
    required: int,
    verdict: Verdict,
    mode: str,
    effort: Optional[SearchEffort] = None,
    witness: Optional[Sequence[int]] = None,
    certificates: Tuple[SubtensorSelection, ...] = (),
    reason: str = "",
    notes: Tuple[str, ...] = (),
) -> CompletabilityReport:
    wsel = None if witness is None else SubtensorSelection(witness)
    wprof = None if wsel is None else selection_profile(wsel, ct)
    return CompletabilityReport(
        verdict=verdict,
        shape=ct.shape.dims,
        rank=rank.ranks,
        required=required,
        columns=ct.K,
        mode=mode,
        witness=wsel,
        witness_profile=wprof,
        subsets=effort.subsets if effort else 0,
        nodes=effort.nodes if effort else 0,
        pruned=effort.pruned if effort else 0,
        certificates=certificates,
        reason=reason,
        notes=notes,
    )


def _find_selection(
    ct: ConstraintTensor,
    rank: RankVector,
    required: int,
    effort: SearchEffort,
    writer: IWriter,
) -> Tuple[Optional[CompletabilityReport], Optional[Tuple[int, ...]]]:
    """Condition (i)+(ii) search on a built constraint tensor.

    Returns either a final report or the capacity-feasible selection.
    """
    budget = effort.budget
    ineq = CapacityInequality(rank)
    all_cols = tuple(range(ct.K))

    if ct.K < required:
        return (
            _report(
                ct,
                rank,
                required,
                Verdict.Falsified,
                "counting",
                effort,
                reason=f"constraint tensor has K = {ct.K} < M = {required} "
                "columns",
            ),
            None,
        )

    total = capacity_of(
        profile_of(union_masks(ct.masks, all_cols, ct.shape.order - 1)), rank
    )
    if total < required:
        return (
            _report(
                ct,
                rank,
                required,
                Verdict.Falsified,
                "counting",
                effort,
                witness=all_cols,
                reason=f"capacity of all columns {total} < M = {required}",
            ),
            None,
        )

    try:
        found = search_selection(ct.masks, all_cols, required, ineq, effort)
    except BudgetExhausted as e:
        writer.info("Selection search stopped: ", str(e))
        notes: Tuple[str, ...] = ()
        if required > budget.exhaustive_limit:
            notes = (_greedy_note(ct, rank, required, budget),)
        return (
            _report(
                ct,
                rank,
                required,
                Verdict.Unknown,
                "randomized"
                if required > budget.exhaustive_limit
                else _effort_mode(effort),
                effort,
                reason=str(e),
                notes=notes,
            ),
            None,
        )

    if found is None:
        return (
            _report(
                ct,
                rank,
                required,
                Verdict.Falsified,
                _effort_mode(effort),
                effort,
                reason=f"no {required} columns satisfy the capacity "
                "inequality on every subset",
            ),
            None,
        )

    return None, found


def _greedy_note(
    ct: ConstraintTensor, rank: RankVector, required: int, budget: SearchBudget
) -> str:
    ineq = CapacityInequality(rank)
    modes = ct.shape.order - 1
    chosen: List[int] = []
    union = (0,) * modes
    rest = list(range(ct.K))

    while len(chosen) < required:
        base = ineq.score(profile_of(union))

        def gain(c: int) -> Tuple[int, int]:
            u = tuple(a | b for a, b in zip(union, ct.masks[c]))
            return (-(ineq.score(profile_of(u)) - base), c)

        best = min(rest, key=gain)
        rest.remove(best)
        chosen.append(best)
        union = tuple(a | b for a, b in zip(union, ct.masks[best]))

    res = check_condition_ii(SubtensorSelection(chosen), ct, rank, budget)
    if isinstance(res, Falsified):
        return f"greedy selection violated by columns {list(res.witness)}"
    return "greedy selection survived random subset checks"


def check_finite(
    p: SamplingPattern,
    rank: RankVector | Sequence[int],
    budget: Optional[SearchBudget] = None,
    pivot_rule: Optional[PivotRule] = None,
    force: bool = False,
    writer: Optional[IWriter] = None,
) -> CompletabilityReport:
    """
    Args:
        force: build the constraint tensor from the slices that hold
            enough observations instead of answering NotGuaranteed
    """
    rank = as_rank(rank)
    writer = writer_or_default(writer)
    budget = budget or SearchBudget()
    effort = SearchEffort(budget)
    shape = p.shape

    rows = check_pivot_rows(p, rank)
    required = free_variable_count(shape, rank)
    r_last = rank[-1]

    # K of the constraint tensor built from the slices that qualify
    columns = sum(c - r_last for c in rows.slice_counts if c >= r_last)

    if len(p) < required + r_last * shape[-1]:
        return CompletabilityReport(
            Verdict.Falsified,
            shape.dims,
            rank.ranks,
            required,
            columns,
            "counting",
            reason=f"{len(p)} samples < M + r_{{d-1}} n_d = "
            f"{required + r_last * shape[-1]}",
        )

    if not rows.holds and not force:
        return CompletabilityReport(
            Verdict.NotGuaranteed,
            shape.dims,
            rank.ranks,
            required,
            columns,
            "counting",
            reason=rows.describe(),
        )

    ct = build_constraint_tensor(p, rank, pivot_rule, force, writer)
    report, found = _find_selection(ct, rank, required, effort, writer)
    if report is not None:
        return report

    assert found is not None
    writer.debug(f"Capacity search selected {len(found)} columns")
    return _confirm_finite(ct, rank, required, found, effort, writer)


def _confirm_finite(
    ct: ConstraintTensor,
    rank: RankVector,
    required: int,
    found: Tuple[int, ...],
    effort: SearchEffort,
    writer: IWriter,
) -> CompletabilityReport:
    """Jacobian row basis of M columns, starting from the capacity selection.

    Falls back to the remaining columns when some selected polynomials are
    dependent. Falsified when all K polynomials have Jacobian rank < M.
    """
    budget = effort.budget
    tol = budget.jacobian_tolerance
    chosen = set(found)
    order = [*found, *(c for c in range(ct.K) if c not in chosen)]
    mode = _effort_mode(effort)

    try:
        system = PolynomialSystem(ct, rank)
        scan = scan_rows(system, order, tol, budget.seed, limit=required)
        jr = len(scan.basis)
        if jr < required:
            jr = jacobian_rank(
                system,
                SubtensorSelection(range(ct.K)),
                budget.jacobian_trials,
                tol,
                budget.seed + 1,
                writer,
            )
    except (SingularPivotSystem, CanonicalFixingUnavailable) as e:
        return _report(
            ct,
            rank,
            required,
            Verdict.Unknown,
            mode,
            effort,
            reason=f"capacity suffices but the Jacobian check failed: {e}",
        )

    if len(scan.basis) == required:
        swapped = len(chosen.difference(scan.basis))
        notes: Tuple[str, ...] = ()
        if swapped:
            notes = (
                f"{swapped} columns of the capacity selection were "
                "dependent and were replaced",
            )
            writer.info(notes[0])
        return _report(
            ct,
            rank,
            required,
            Verdict.FinitelyCompletable,
            mode,
            effort,
            certificates=(SubtensorSelection(scan.basis),),
            reason=f"{required} columns with independent polynomials",
            notes=notes,
        )

    if jr < required:
        return _report(
            ct,
            rank,
            required,
            Verdict.Falsified,
            "jacobian",
            effort,
            reason=f"Jacobian rank {jr} of all {ct.K} polynomials < "
            f"M = {required} although the capacity suffices",
        )

    return _report(
        ct,
        rank,
        required,
        Verdict.Unknown,
        "jacobian",
        effort,
        reason=f"Jacobian rank {jr} = M at some points but not at the "
        "point scanned",
    )


def check_unique(
    p: SamplingPattern,
    rank: RankVector | Sequence[int],
    budget: Optional[SearchBudget] = None,
    pivot_rule: Optional[PivotRule] = None,
    force: bool = False,
    writer: Optional[IWriter] = None,
) -> CompletabilityReport:
    rank = as_rank(rank)
    writer = writer_or_default(writer)
    budget = budget or SearchBudget()

    finite = check_finite(p, rank, budget, pivot_rule, force, writer)
    if finite.verdict != Verdict.FinitelyCompletable:
        return finite

    ct = build_constraint_tensor(p, rank, pivot_rule, force, writer)
    effort = SearchEffort(budget)
    effort.subsets = finite.subsets
    effort.nodes = finite.nodes
    effort.pruned = finite.pruned

    base = finite.certificates[0]
    used = set(base)
    certificates = [base]

    for i in range(1, p.shape.order):
        target = mode_target(p.shape[i - 1], rank, i)
        free = [c for c in range(ct.K) if c not in used]
        if target <= 0:
            certificates.append(SubtensorSelection(()))
            continue

        def unknown(reason: str) -> CompletabilityReport:
            return finite._replace(
                verdict=Verdict.Unknown,
                certificates=tuple(certificates),
                subsets=effort.subsets,
                nodes=effort.nodes,
                pruned=effort.pruned,
                reason=reason,
                notes=(
                    "finite completability is certified; the uniqueness "
                    "conditions are sufficient only",
                ),
            )

        if len(free) < target:
            return unknown(
                f"mode {i} needs {target} columns disjoint from the "
                f"{len(used)} already selected; {len(free)} remain"
            )

        ineq = ModeInequality(rank, i, target)
        try:
            found = search_selection(ct.masks, free, target, ineq, effort)
        except BudgetExhausted as e:
            return unknown(f"mode {i}: {e}")

        if found is None:
            return unknown(
                f"no {target} remaining columns satisfy the mode {i} "
                "inequality"
            )

        used.update(found)
        certificates.append(SubtensorSelection(found))

    return finite._replace(
        verdict=Verdict.UniquelyCompletable,
        certificates=tuple(certificates),
        subsets=effort.subsets,
        nodes=effort.nodes,
        pruned=effort.pruned,
        reason="finite completability and every mode condition hold",
    )


def check_matrix_finite(
    p: SamplingPattern,
    r: int,
    budget: Optional[SearchBudget] = None,
    writer: Optional[IWriter] = None,
) -> CompletabilityReport:
    """Finite completability of a rank-r matrix (order-2 pattern)."""
    if p.shape.order != 2:
        raise ValueError(f"Expected a matrix pattern. Given {p.shape}")
    return check_finite(p, RankVector((r,)), budget, writer=writer)


def recheck_witness(
    report: CompletabilityReport,
    ct: ConstraintTensor,
    rank: RankVector | Sequence[int],
) -> bool:
    """Whether the stored witness still violates the capacity inequality."""
    if report.witness is None:
        return False
    rank = as_rank(rank)
    prof = selection_profile(report.witness, ct)
    return capacity_of(prof, rank) < len(report.witness)
