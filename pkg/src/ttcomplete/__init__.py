from .bounds.formulas import (
    bound_curves,
    make_inputs,
    tt_finite_bound,
    tt_unique_bound,
    unfolding_bound,
)
from .bounds.simulation import azuma_column_check, phase_sweep
from .checker.abc import ConditionResults, Verdict
from .checker.capacity import SubtensorSelection, independence_capacity
from .checker.completability import (
    CompletabilityReport,
    check_condition_ii,
    check_finite,
    check_unique,
)
from .checker.search import SearchBudget
from .oracle.completion import count_completions
from .oracle.polynomials import PolynomialSystem, jacobian_rank
from .pattern.constraint import (
    PivotRules,
    build_constraint_tensor,
    check_pivot_rows,
)
from .pattern.sampling import SamplingPattern, random_pattern
from .tensor.dense import DenseTensor
from .tensor.shape import RankVector, Shape
from .tensor.tt import TTDecomposition, tt_contract, tt_rank, tt_svd

VERSION = "0.0.0a0"  # Automatically set by hatch

__all__ = [
    "Shape",
    "RankVector",
    "DenseTensor",
    "TTDecomposition",
    "tt_contract",
    "tt_rank",
    "tt_svd",
    "SamplingPattern",
    "random_pattern",
    "PivotRules",
    "check_pivot_rows",
    "build_constraint_tensor",
    "SubtensorSelection",
    "independence_capacity",
    "ConditionResults",
    "Verdict",
    "SearchBudget",
    "CompletabilityReport",
    "check_condition_ii",
    "check_finite",
    "check_unique",
    "PolynomialSystem",
    "jacobian_rank",
    "count_completions",
    "make_inputs",
    "unfolding_bound",
    "tt_finite_bound",
    "tt_unique_bound",
    "bound_curves",
    "azuma_column_check",
    "phase_sweep",
]
