from __future__ import annotations

import enum
from typing import Tuple, Union

from typing_extensions import TypeAlias


class Verified:
    def __repr__(self) -> str:
        return "Verified()"


class Falsified:
    def __init__(self, witness: Tuple[int, ...], reason: str):
        """
        Args:
            witness: 0-based column indices of a violating subset
            reason: the inequality that fails, rendered
        """
        self.witness = witness
        self.reason = reason

    def __repr__(self) -> str:
        return f"Falsified({self.witness}, {self.reason!r})"


class Unknown:
    def __init__(self, reason: str):
        self.reason = reason

    def __repr__(self) -> str:
        return f"Unknown({self.reason!r})"


class ConditionResults:
    Verified = Verified
    Falsified = Falsified
    Unknown = Unknown


ConditionResult: TypeAlias = Union[Verified, Falsified, Unknown]


class Verdict(enum.Enum):
    UniquelyCompletable = "uniquely-completable"
    FinitelyCompletable = "finitely-completable"
    NotGuaranteed = "not-guaranteed"
    Falsified = "falsified"
    Unknown = "unknown"

    @property
    def certified(self) -> bool:
        return self in (
            Verdict.UniquelyCompletable,
            Verdict.FinitelyCompletable,
        )
