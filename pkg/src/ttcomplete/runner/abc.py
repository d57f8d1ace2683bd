from __future__ import annotations

from abc import ABCMeta, abstractmethod
from typing import Callable, Generic, TypeVar

_T_Job = TypeVar("_T_Job", bound="IJob", covariant=True)


class IEvent(Generic[_T_Job]):
    ...


class IJob(metaclass=ABCMeta):
    @property
    @abstractmethod
    def name(self) -> str:
        ...

    @property
    @abstractmethod
    def method(self) -> Callable[[], object]:
        """Must be picklable to run in a child process."""
        ...


class Job(IJob):
    __slots__ = ["_name", "_method"]

    def __init__(self, name: str, method: Callable[[], object]):
        self._name = name
        self._method = method

    @property
    def name(self) -> str:
        return self._name

    @property
    def method(self) -> Callable[[], object]:
        return self._method

    def __repr__(self) -> str:
        return f"Job({self._name!r})"
