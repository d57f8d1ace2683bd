from __future__ import annotations

import enum
import traceback
from multiprocessing.pool import Pool
from typing import (
    Callable,
    Dict,
    Literal,
    NamedTuple,
    Optional,
    Sequence,
    Tuple,
    TypeVar,
)

from . import events
from .abc import IEvent, IJob


class Result(enum.Enum):
    Done = 1
    Fail = 2
    Fatal = 3


SummaryKey = Literal["done", "fail", "discard"]


class RunSummary(NamedTuple):
    total: int
    done: int
    fail: int
    discard: int  # not run because of abort
    detail: Dict[int, SummaryKey]
    results: Dict[int, object]  # job index -> return value, done jobs only

    @classmethod
    def create(
        cls, detail: Dict[int, SummaryKey], results: Dict[int, object]
    ) -> RunSummary:
        a: Dict[SummaryKey, int] = {"done": 0, "fail": 0, "discard": 0}
        for _, key in detail.items():
            a[key] += 1
        return cls(**a, total=len(detail), detail=detail, results=results)


_T_Job = TypeVar("_T_Job", bound=IJob)


def run_jobs(
    jobs: Sequence[_T_Job],
    keep_going: bool,
    callback: Callable[[IEvent[_T_Job]], None],
) -> RunSummary:
    """Run jobs one after another in the calling thread."""
    summary: Dict[int, SummaryKey] = {}
    results: Dict[int, object] = {}

    for i, job in enumerate(jobs):
        try:
            result, value = process_job(job, callback, None)
        except Exception as e:
            result, value = Result.Fatal, None
            try:
                callback(events.FatalError(job, e))
            except Exception:
                traceback.print_exc()

        if result == Result.Done:
            summary[i] = "done"
            results[i] = value
        elif result == Result.Fail:
            summary[i] = "fail"
            if not keep_going:
                try:
                    callback(events.StopOnFail())
                except Exception:
                    traceback.print_exc()
                break
        else:
            summary[i] = "fail"
            break

    for i in range(len(jobs)):
        if i not in summary:
            summary[i] = "discard"

    return RunSummary.create(summary, results)


def process_job(
    job: _T_Job,
    callback: Callable[[IEvent[_T_Job]], None],
    pool: Optional[Pool],
) -> Tuple[Result, object]:
    callback(events.Start(job))

    try:
        if pool is None:
            value = job.method()
        else:
            value = pool.apply(job.method)
    except Exception as e:
        callback(events.ExecError(job, e))
        return Result.Fail, None

    callback(events.Done(job, value))
    return Result.Done, value
