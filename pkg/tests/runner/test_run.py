import functools

import pytest
from pytest_mock import MockerFixture

from ttcomplete.logwriter import IWriter
from ttcomplete.runner import events
from ttcomplete.runner.abc import Job
from ttcomplete.runner.event_logger import log_job_event
from ttcomplete.runner.run import run_jobs
from ttcomplete.runner.run_mp import run_jobs_mp_spawn


def _fail():
    raise RuntimeError("boom")


def _jobs():
    return [
        Job("a", lambda: 1),
        Job("b", _fail),
        Job("c", lambda: 3),
    ]


def test_run_jobs_keep_going(mocker: MockerFixture):
    callback = mocker.Mock()
    s = run_jobs(_jobs(), True, callback)

    assert (s.total, s.done, s.fail, s.discard) == (3, 2, 1, 0)
    assert s.detail == {0: "done", 1: "fail", 2: "done"}
    assert s.results == {0: 1, 2: 3}

    kinds = [type(c.args[0]) for c in callback.call_args_list]
    assert kinds == [
        events.Start,
        events.Done,
        events.Start,
        events.ExecError,
        events.Start,
        events.Done,
    ]


def test_run_jobs_stop_on_fail(mocker: MockerFixture):
    callback = mocker.Mock()
    s = run_jobs(_jobs(), False, callback)

    assert (s.total, s.done, s.fail, s.discard) == (3, 1, 1, 1)
    assert s.detail[2] == "discard"
    assert s.results == {0: 1}
    assert isinstance(callback.call_args_list[-1].args[0], events.StopOnFail)


def test_run_jobs_fatal_callback(mocker: MockerFixture):
    def callback(e: object):
        if isinstance(e, events.Done):
            raise KeyError("callback")

    s = run_jobs(_jobs(), True, callback)
    assert s.detail == {0: "fail", 1: "discard", 2: "discard"}


def test_done_event_carries_result(mocker: MockerFixture):
    callback = mocker.Mock()
    run_jobs([Job("a", lambda: "x")], True, callback)
    done = callback.call_args_list[-1].args[0]
    assert isinstance(done, events.Done)
    assert done.result == "x"


def test_log_job_event(mocker: MockerFixture):
    w = mocker.Mock(spec=IWriter)
    job = Job("a", lambda: None)

    log_job_event(w, events.Start(job))
    w.debug.assert_called_once()

    log_job_event(w, events.Done(job, None))
    w.info.assert_called_once()

    try:
        raise RuntimeError("boom")
    except RuntimeError as e:
        log_job_event(w, events.ExecError(job, e))
    w.error.assert_called_once()
    assert "boom" in w.warning.call_args.args[0]

    log_job_event(w, events.StopOnFail())
    assert w.warning.call_count == 2


def test_run_jobs_mp_spawn(mocker: MockerFixture):
    jobs = [
        Job(f"pow{i}", functools.partial(pow, 2, i)) for i in range(6)
    ] + [Job("local", lambda: "main")]
    writer = mocker.Mock(spec=IWriter)

    s = run_jobs_mp_spawn(jobs, True, lambda e: None, 2, writer)

    assert s.done == 7
    assert s.results == {**{i: 2**i for i in range(6)}, 6: "main"}
    writer.warning.assert_called_once()


def test_run_jobs_mp_spawn_empty():
    s = run_jobs_mp_spawn([], True, lambda e: None, 2)
    assert s.total == 0


@pytest.mark.parametrize("keep_going", [True, False])
def test_run_jobs_empty(keep_going: bool):
    s = run_jobs([], keep_going, lambda e: None)
    assert s == (0, 0, 0, 0, {}, {})
