from __future__ import annotations

import abc
import os
import sys
from logging import Logger
from pathlib import Path
from typing import Any, List, Mapping, Optional, Sequence, Tuple

from typing_extensions import Literal, Protocol, TypeGuard, runtime_checkable

from .textio import StrOrPath

RGB = Tuple[int, int, int]


class RichStr(str):
    """A str carrying a foreground color for terminal output."""

    color: Optional[RGB]

    def __new__(cls, s: str, *_args: object, **_kwargs: object):
        return super().__new__(cls, s)

    def __init__(self, s: str, color: Optional[RGB] = None):
        if color is None and isinstance(s, RichStr):
            color = s.color
        self.color = color

    def __add__(self, rhs: object):
        if type(rhs) == str:
            return RichStr(str(self) + rhs, self.color)
        return NotImplemented

    def __radd__(self, lhs: object):
        if isinstance(lhs, str):
            return RichStr(lhs + str(self), self.color)
        return NotImplemented


Loglevel = Literal["debug", "info", "warning", "error"]

LOGLEVELS: Tuple[Loglevel, ...] = ("debug", "info", "warning", "error")


def typeguard_loglevel(loglevel: object) -> TypeGuard[Loglevel]:
    return loglevel in LOGLEVELS


QUANT_LOG_LEVEL: Mapping[Loglevel, int] = {
    "debug": 10,
    "info": 20,
    "warning": 30,
    "error": 40,
}

LEVEL_COLORS: Mapping[Loglevel, Optional[RGB]] = {
    "debug": (0x80, 0x80, 0x80),
    "info": None,
    "warning": (0x9F, 0x60, 0x00),
    "error": (0xD8, 0x00, 0x0C),
}


class IWriter:
    loglevel: Loglevel

    def __init__(self, loglevel: Loglevel):
        if not typeguard_loglevel(loglevel):
            raise ValueError(f"Invalid loglevel {loglevel!r}")

        self.loglevel = loglevel

    @abc.abstractmethod
    def _write(self, *args: str, level: Loglevel):
        ...

    def enabled(self, level: Loglevel) -> bool:
        return QUANT_LOG_LEVEL[self.loglevel] <= QUANT_LOG_LEVEL[level]

    def write(self, *args: str, level: Loglevel):
        if self.enabled(level):
            self._write(*args, level=level)

    def debug(self, *args: str):
        self.write(*args, level="debug")

    def info(self, *args: str):
        self.write(*args, level="info")

    def warning(self, *args: str):
        self.write(*args, level="warning")

    def error(self, *args: str):
        self.write(*args, level="error")


class WritersWrapper(IWriter):
    def __init__(self, writers: Sequence[IWriter]):
        super().__init__("debug")
        self.writers = list(writers)

    def _write(self, *args: str, level: Loglevel):
        for w in self.writers:
            w.write(*args, level=level)


@runtime_checkable
class WritableProtocol(Protocol):
    def write(self, __t: str) -> Any:
        ...


class TextWriter(IWriter):
    def __init__(self, writable: WritableProtocol, loglevel: Loglevel):
        super().__init__(loglevel)
        self.writable = writable

    def _write(self, *args: str, level: Loglevel):
        self.writable.write("".join(map(str, args)) + "\n")


class ColorTextWriter(IWriter):
    def __init__(self, writable: WritableProtocol, loglevel: Loglevel):
        super().__init__(loglevel)
        self.writable = writable

    def _write(self, *args: str, level: Loglevel):
        default = LEVEL_COLORS[level]
        pieces = [
            x if isinstance(x, RichStr) else RichStr(x, default) for x in args
        ]
        self.writable.write(create_color_str(pieces) + "\n")


class LoggerWriter(IWriter):
    def __init__(self, logger: Logger):
        super().__init__("debug")
        self.logger = logger

    def _write(self, *args: str, level: Loglevel):
        msg = "".join(map(str, args))
        {
            "debug": self.logger.debug,
            "info": self.logger.info,
            "warning": self.logger.warning,
            "error": self.logger.error,
        }[level](msg)


class TextFileWriterOpenOnDemand(IWriter):
    def __init__(self, loglevel: Loglevel, fname: StrOrPath):
        super().__init__(loglevel)
        os.makedirs(Path(fname).parent, exist_ok=True)
        self.fname = fname

    def _write(self, *args: str, level: Loglevel):
        with open(self.fname, "a") as f:
            f.write(f"[{level}] " + "".join(map(str, args)) + "\n")


def create_color_str(sl: Sequence[str]) -> str:
    res: List[str] = []
    last: Optional[RGB] = None

    for s in sl:
        color = s.color if isinstance(s, RichStr) else None

        if color != last:
            last = color
            if color is None:
                res.append("\x1b[39m")
            else:
                res.append(f"\x1b[38;5;{_comp_8bit_term_color(*color)}m")

        res.append(str(s))

    res.append("\x1b[39m")
    return "".join(res)


def _comp_8bit_term_color(r: int, g: int, b: int) -> int:
    r, g, b = (x * 6 // 256 for x in (r, g, b))
    return 16 + r * 36 + g * 6 + b


def create_logwriter(f: object, loglevel: Loglevel) -> IWriter:
    """
    Args:
        f (str|PathLike|Logger|WritableProtocol): logging destination
    """
    if isinstance(f, (str, os.PathLike)):
        return TextFileWriterOpenOnDemand(loglevel, f)  # pyright: ignore

    if isinstance(f, Logger):
        return LoggerWriter(f)

    if isinstance(f, WritableProtocol):
        _isatty = getattr(f, "isatty", None)
        if callable(_isatty) and _isatty():
            return ColorTextWriter(f, loglevel)

        return TextWriter(f, loglevel)

    raise TypeError(
        "Logging target must be either str (file name), os.PathLike, "
        f"logging.Logger, or an object with `write` method. Given {f}"
    )


def create_default_logwriter(loglevel: Loglevel) -> IWriter:
    if sys.stderr.isatty():
        return ColorTextWriter(sys.stderr, loglevel)
    else:
        return TextWriter(sys.stderr, loglevel)


def create_cli_logwriter(
    loglevel: Loglevel, logfiles: Sequence[StrOrPath] = ()
) -> IWriter:
    writers = [create_default_logwriter(loglevel)]
    writers.extend(create_logwriter(f, loglevel) for f in logfiles)
    return writers[0] if len(writers) == 1 else WritersWrapper(writers)


def writer_or_default(writer: Optional[IWriter]) -> IWriter:
    return create_default_logwriter("warning") if writer is None else writer
