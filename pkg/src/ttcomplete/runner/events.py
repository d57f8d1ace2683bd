from __future__ import annotations

from traceback import TracebackException
from typing import TypeVar

from .abc import IEvent, IJob

_T_Job = TypeVar("_T_Job", bound=IJob)


class JobEvent(IEvent[_T_Job]):
    def __init__(self, job: _T_Job):
        self._job = job

    @property
    def job(self) -> _T_Job:
        return self._job

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.job})"


class ErrorJobEvent(JobEvent[_T_Job]):
    def __init__(self, job: _T_Job, err: BaseException):
        """
        Args:
            err (BaseException):
                Converted at once to a TracebackException, which holds no
                references to the stack frames.
        """
        super().__init__(job)
        self.trace_exc = TracebackException.from_exception(err)


class Start(JobEvent[_T_Job]):
    ...


class Done(JobEvent[_T_Job]):
    def __init__(self, job: _T_Job, result: object):
        super().__init__(job)
        self.result = result


class StopOnFail(IEvent[_T_Job]):
    ...


class ExecError(ErrorJobEvent[_T_Job]):
    ...


class FatalError(ErrorJobEvent[_T_Job]):
    ...
