import io
import logging
from pathlib import Path

import pytest
from pytest_mock import MockerFixture

from ttcomplete.logwriter import (
    ColorTextWriter,
    IWriter,
    LoggerWriter,
    RichStr,
    TextFileWriterOpenOnDemand,
    TextWriter,
    WritersWrapper,
    create_cli_logwriter,
    create_logwriter,
    typeguard_loglevel,
    writer_or_default,
)


def test_rich_str():
    s = RichStr("ab", (1, 2, 3))
    assert (s + "c").color == (1, 2, 3)
    assert ("c" + s).color == (1, 2, 3)
    assert "c" + s == "cab"
    assert RichStr(s).color == (1, 2, 3)


def test_text_writer_levels():
    buf = io.StringIO()
    w = TextWriter(buf, "info")
    w.debug("hidden")
    w.info("a", RichStr("b", (0, 0, 0)))
    w.error("c")
    assert buf.getvalue() == "ab\nc\n"


def test_color_text_writer():
    buf = io.StringIO()
    ColorTextWriter(buf, "debug").error("bad")
    out = buf.getvalue()
    assert "bad" in out
    assert out.startswith("\x1b[38;5;")
    assert out.endswith("\x1b[39m\n")


def test_logger_writer(caplog: pytest.LogCaptureFixture):
    logger = logging.getLogger("ttcomplete.test")
    with caplog.at_level(logging.DEBUG, logger="ttcomplete.test"):
        LoggerWriter(logger).warning("x", "y")
    assert caplog.records[-1].levelno == logging.WARNING
    assert caplog.records[-1].getMessage() == "xy"


def test_text_file_writer(tmp_path: Path):
    fname = tmp_path / "logs" / "run.log"
    w = TextFileWriterOpenOnDemand("info", fname)
    w.debug("hidden")
    w.info("one")
    w.warning("two")
    assert fname.read_text() == "[info] one\n[warning] two\n"


def test_writers_wrapper(mocker: MockerFixture):
    a = mocker.Mock(spec=IWriter)
    b = mocker.Mock(spec=IWriter)
    WritersWrapper([a, b]).info("m")
    a.write.assert_called_once_with("m", level="info")
    b.write.assert_called_once_with("m", level="info")


def test_create_logwriter(tmp_path: Path):
    assert isinstance(create_logwriter(io.StringIO(), "info"), TextWriter)
    assert isinstance(
        create_logwriter(str(tmp_path / "a.log"), "info"),
        TextFileWriterOpenOnDemand,
    )
    assert isinstance(
        create_logwriter(logging.getLogger("x"), "info"), LoggerWriter
    )
    with pytest.raises(TypeError):
        create_logwriter(1, "info")


def test_create_cli_logwriter(tmp_path: Path):
    assert not isinstance(create_cli_logwriter("info"), WritersWrapper)
    w = create_cli_logwriter("info", [tmp_path / "a.log"])
    assert isinstance(w, WritersWrapper)
    assert len(w.writers) == 2


def test_loglevel(mocker: MockerFixture):
    assert typeguard_loglevel("warning")
    assert not typeguard_loglevel("verbose")
    with pytest.raises(ValueError):
        TextWriter(io.StringIO(), "verbose")  # type: ignore

    w = mocker.Mock(spec=IWriter)
    assert writer_or_default(w) is w
    assert writer_or_default(None).loglevel == "warning"
