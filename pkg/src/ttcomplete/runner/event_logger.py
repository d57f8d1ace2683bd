from __future__ import annotations

from threading import Lock

from ..logwriter import IWriter, RichStr
from . import events
from .abc import IEvent, IJob

_event_lock = Lock()

_NAME_COLOR = (0, 0xCC, 0)


def log_job_event(w: IWriter, e: IEvent[IJob]):
    with _event_lock:
        _log_job_event(w, e)


def _log_job_event(w: IWriter, e: IEvent[IJob]):
    if isinstance(e, events.ErrorJobEvent):
        w.warning("".join(e.trace_exc.format()))

        name = RichStr(e.job.name, _NAME_COLOR)

        if isinstance(e, events.ExecError):
            w.error("Job ", name, " failed")
        elif isinstance(e, events.FatalError):
            w.error("Fatal error while running ", name)
        else:
            w.warning(f"Unhandled error event for {e.job}")
    elif isinstance(e, events.JobEvent):
        name = RichStr(e.job.name, _NAME_COLOR)

        if isinstance(e, events.Start):
            w.debug("Start ", name)
        elif isinstance(e, events.Done):
            w.info("Done ", name)
        else:
            w.warning(f"Unhandled event for {e.job}")
    elif isinstance(e, events.StopOnFail):
        w.warning("Execution aborted due to an error")
    else:
        w.warning(f"Unhandled event {e}")
