"""Sample complexity bounds for an n x ... x n tensor of order d.

Natural logarithms throughout. Every bound is evaluated even when its
hypotheses fail; `valid` tells whether they hold.
"""
from __future__ import annotations

import math
import re
from typing import List, NamedTuple, Optional, Sequence, Tuple

from ..tensor.shape import RankVector, as_rank


class BoundsInputs(NamedTuple):
    n: int
    d: int
    rank: RankVector
    eps: float

    @property
    def m(self) -> int:
        """sum_{k=1}^{d-2} r_{k-1} r_k."""
        r = self.rank.full()
        return sum(r[k - 1] * r[k] for k in range(1, self.d - 1))

    @property
    def M(self) -> int:
        r = self.rank.full()
        return self.n * self.m - sum(r[k] ** 2 for k in range(1, self.d - 1))

    @property
    def r_ratio(self) -> float:
        """max_{k <= d-2} r_k / r_{k-1}."""
        r = self.rank.full()
        return max(r[k] / r[k - 1] for k in range(1, self.d - 1))


def make_inputs(
    n: int, d: int, rank: RankVector | Sequence[int], eps: float
) -> BoundsInputs:
    rank = as_rank(rank)
    if n < 2:
        raise ValueError(f"n must be at least 2. Given {n}")
    if d < 3:
        raise ValueError(f"d must be at least 3. Given {d}")
    if len(rank) != d - 1:
        raise ValueError(f"Rank {rank.ranks} does not match order {d}")
    if rank.is_degenerate:
        raise ValueError(f"Ranks must be positive. Given {rank.ranks}")
    if not 0 < eps < 1:
        raise ValueError(f"eps must be in (0, 1). Given {eps}")
    return BoundsInputs(n, d, rank, eps)


class Bound(NamedTuple):
    value: float
    valid: bool
    threshold: float  # observations per column
    column_thresholds: Tuple[float, ...] = ()

    @property
    def ceiling(self) -> int:
        return math.ceil(self.value)


def _row_exponent(i: int, d: int) -> int:
    return i if i <= (d - 1) / 2 else d - i


def unfolding_bound(inp: BoundsInputs) -> Bound:
    """Samples for finite completability of the balanced unfolding."""
    n, d, eps = inp.n, inp.d, inp.eps
    log_n = math.log(n)

    thresholds = tuple(
        max(12 * (_row_exponent(i, d) * log_n - math.log(eps)) + 12, 2 * r)
        for i, r in enumerate(inp.rank, 1)
    )

    valid = all(
        1 < r and 6 * r <= n ** _row_exponent(i, d)
        for i, r in enumerate(inp.rank, 1)
    )

    i = (d - 1) // 2
    cols = n ** math.ceil((d + 1) / 2)
    return Bound(cols * thresholds[i - 1], valid, thresholds[i - 1], thresholds)


def _tt_valid(inp: BoundsInputs, n_floor: int) -> bool:
    r_last = inp.rank[inp.d - 3]  # r_{d-2}
    return inp.n > n_floor and inp.r_ratio <= min(
        inp.n / 6, r_last
    )


def _check_M(inp: BoundsInputs):
    if inp.M <= 0:
        raise ValueError(f"M = {inp.M} must be positive for {inp}")


def tt_finite_bound(inp: BoundsInputs) -> Bound:
    _check_M(inp)
    n, eps = inp.n, inp.eps
    r_last = inp.rank[inp.d - 3]
    l = max(
        27 * math.log(n / eps) + 9 * math.log(2 * inp.M / eps) + 18,
        6 * r_last,
    )
    return Bound(n * n * l, _tt_valid(inp, max(inp.m, 200)), l)


def tt_unique_bound(inp: BoundsInputs) -> Bound:
    _check_M(inp)
    n, eps = inp.n, inp.eps
    r_last = inp.rank[inp.d - 3]
    l = max(
        63 * math.log(4 * n / eps) + 9 * math.log(8 * inp.M / eps) + 18,
        6 * r_last,
    )
    return Bound(n * n * l, _tt_valid(inp, max(inp.m + inp.d, 400)), l)


class ProbabilityBounds(NamedTuple):
    p_finite: float
    p_unique: float
    success: float


def sampling_probability_bounds(inp: BoundsInputs) -> ProbabilityBounds:
    """Bernoulli sampling probabilities above which the bounds apply."""
    e = inp.d - 2
    cells = float(inp.n) ** e
    extra = float(inp.n) ** (-e / 4)
    finite = tt_finite_bound(inp).threshold / cells + extra
    unique = tt_unique_bound(inp).threshold / cells + extra

    # (1 - eps) (1 - exp(-sqrt(n^{d-2}) / 2))^{n^2}
    tail = math.exp(-math.sqrt(cells) / 2)
    log_success = math.log1p(-inp.eps) + inp.n**2 * math.log1p(-tail)
    return ProbabilityBounds(finite, unique, math.exp(log_success))


def column_threshold(n: int, r: int, r_ratio: float, eps: float) -> float:
    """Observations per column for the matrix bound."""
    return max(
        9 * math.log(n / eps) + 3 * math.log(2 * r / eps) + 6, 2 * r_ratio
    )


def matrix_finite_bound(n: int, N: int, r: int, eps: float) -> Bound:
    """Samples for finite completability of a rank-r n x N matrix."""
    if not 0 < eps < 1:
        raise ValueError(f"eps must be in (0, 1). Given {eps}")
    l = max(12 * math.log(n / eps) + 12, 2 * r)
    return Bound(N * l, 6 * r <= n and r * (n - r) <= N, l)


def azuma_threshold(n: int, k: int) -> float:
    """p above which more than k of n cells are observed w.h.p."""
    return k / n + n ** (-0.25)


def azuma_success_probability(n: int) -> float:
    return -math.expm1(-math.sqrt(n) / 2)


_TERM = re.compile(r"^(\d*)\s*\*?\s*(r(?:\^(\d+))?)?$")


class RankTemplate(NamedTuple):
    """Comma separated monomials c*r^k, e.g. "r,2r,r^2"."""

    text: str
    terms: Tuple[Tuple[int, int], ...]  # (coefficient, power)

    def instantiate(self, r: int) -> RankVector:
        return RankVector(c * r**k for c, k in self.terms)

    @property
    def order(self) -> int:
        return len(self.terms) + 1


def parse_rank_template(text: str) -> RankTemplate:
    terms: List[Tuple[int, int]] = []
    for tok in text.split(","):
        tok = tok.strip()
        mo = _TERM.match(tok)
        if not tok or mo is None or (not mo.group(1) and not mo.group(2)):
            raise ValueError(f"Invalid rank template term {tok!r} in {text!r}")
        coef = int(mo.group(1)) if mo.group(1) else 1
        power = 0 if not mo.group(2) else int(mo.group(3) or 1)
        if coef < 1:
            raise ValueError(f"Coefficient must be positive in {tok!r}")
        terms.append((coef, power))
    return RankTemplate(text, tuple(terms))


class CurveSetup(NamedTuple):
    template: str
    r_values: Tuple[int, ...]
    n: int
    eps: float


TEMPLATES = {
    "linear": CurveSetup("r,2r,3r,3r,2r,r", tuple(range(1, 81)), 1000, 0.001),
    "cubic": CurveSetup(
        "r,r^2,r^3,r^3,r^2,r", tuple(range(1, 21)), 1000, 0.001
    ),
}

TEMPLATE_ALIASES = {"fig1": "linear", "fig2": "cubic"}


def curve_setup(name: str) -> CurveSetup:
    try:
        return TEMPLATES[TEMPLATE_ALIASES.get(name, name)]
    except KeyError:
        raise ValueError(f"Unknown curve template {name!r}") from None


CURVE_HEADER = (
    "r",
    "unfolding_bound",
    "tt_finite_bound",
    "tt_unique_bound",
    "valid_unfolding",
    "valid_tt_finite",
    "valid_tt_unique",
)


class CurveRow(NamedTuple):
    r: int
    unfolding: Bound
    tt_finite: Bound
    tt_unique: Bound

    def to_csv_row(self) -> List[str]:
        return [
            str(self.r),
            repr(self.unfolding.value),
            repr(self.tt_finite.value),
            repr(self.tt_unique.value),
            str(int(self.unfolding.valid)),
            str(int(self.tt_finite.valid)),
            str(int(self.tt_unique.valid)),
        ]


def bound_curves(
    template: RankTemplate | str,
    r_values: Sequence[int],
    n: int,
    eps: float,
    d: Optional[int] = None,
) -> List[CurveRow]:
    if isinstance(template, str):
        template = parse_rank_template(template)
    if d is not None and d != template.order:
        raise ValueError(
            f"Template {template.text!r} describes order {template.order}, "
            f"not {d}"
        )

    rows: List[CurveRow] = []
    for r in r_values:
        inp = make_inputs(n, template.order, template.instantiate(r), eps)
        rows.append(
            CurveRow(
                r,
                unfolding_bound(inp),
                tt_finite_bound(inp),
                tt_unique_bound(inp),
            )
        )
    return rows
