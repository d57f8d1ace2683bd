from __future__ import annotations

import traceback
from multiprocessing import get_context
from multiprocessing.context import SpawnContext
from threading import Condition, Thread
from typing import Callable, Dict, List, Optional, Sequence, TypeVar

from ..logwriter import IWriter, writer_or_default
from . import events
from .abc import IEvent, IJob
from .run import Result, RunSummary, SummaryKey, process_job

_T_Job = TypeVar("_T_Job", bound=IJob)


def run_jobs_mp_spawn(
    jobs: Sequence[_T_Job],
    keep_going: bool,
    callback: Callable[[IEvent[_T_Job]], None],
    njobs: int,
    writer: Optional[IWriter] = None,
) -> RunSummary:
    """
    Runs jobs on `njobs` threads, each forwarding its jobs to a private
    single-process pool started with 'spawn'. Jobs whose method cannot be
    pickled run in the thread itself. The callback must be thread safe.
    Results are keyed by job index, so they do not depend on scheduling.
    """
    if len(jobs) == 0:
        return RunSummary.create({}, {})

    assert njobs >= 2

    ctx = get_context("spawn")

    # warm-up pool; pools created later in threads are unreliable without it
    with ctx.Pool(1):
        pass

    sendable = _test_interproc_portability([j.method for j in jobs], ctx)
    _log_sendable_stats(sendable, writer_or_default(writer))

    summary: Dict[int, SummaryKey] = {}
    results: Dict[int, object] = {}

    job_q: List[int] = list(reversed(range(len(jobs))))  # pop() from the end
    stop = False
    cv = Condition()

    def get_job() -> Optional[int]:
        with cv:
            if stop or not job_q:
                return None
            return job_q.pop()

    def set_result(i: int, res: Optional[Result], value: object):
        nonlocal stop

        with cv:
            if res is None or res == Result.Fatal:
                summary[i] = "fail"
                stop = True
            elif res == Result.Fail:
                summary[i] = "fail"
                if not keep_going:
                    stop = True
                    try:
                        callback(events.StopOnFail())
                    except Exception:
                        traceback.print_exc()
            else:
                summary[i] = "done"
                results[i] = value

            cv.notify_all()

    args = (ctx, get_job, set_result, jobs, sendable, callback)
    threads = [Thread(target=worker, args=args) for _ in range(njobs)]

    for t in threads:
        t.start()

    try:
        for t in threads:
            t.join()
    finally:
        with cv:
            stop = True
            cv.notify_all()

    for i in range(len(jobs)):
        if i not in summary:
            summary[i] = "discard"

    return RunSummary.create(summary, results)


def worker(
    ctx: SpawnContext,
    get_job: Callable[[], Optional[int]],
    set_result: Callable[[int, Optional[Result], object], None],
    jobs: Sequence[_T_Job],
    sendable: Sequence[bool],
    callback: Callable[[IEvent[_T_Job]], None],
):
    with ctx.Pool(1) as pool:
        while True:
            i = get_job()

            if i is None:
                return

            job = jobs[i]
            res, value = None, None

            try:
                res, value = process_job(
                    job, callback, pool if sendable[i] else None
                )
            except (Exception, KeyboardInterrupt) as e:
                callback(events.FatalError(job, e))
            finally:
                set_result(i, res, value)

                if res is None:
                    return


def _test_interproc_portability(
    objs: Sequence[object], ctx: SpawnContext
) -> List[bool]:
    picklable = [True] * len(objs)

    with ctx.Pool(1) as pool:
        for i, obj in enumerate(objs):
            try:
                pool.apply(_dummy_func, (obj,))
            except Exception:
                picklable[i] = False

    return picklable


def _dummy_func(_: object) -> bool:
    ...


def _log_sendable_stats(sendable: Sequence[bool], writer: IWriter):
    n = len(sendable)
    ng = n - sum(1 for x in sendable if x)

    if ng > 0:
        writer.warning(
            f"{ng} of {n} jobs will run on threads in the main process "
            "because their methods cannot be sent to child processes"
        )