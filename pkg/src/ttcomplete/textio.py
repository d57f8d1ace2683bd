"""Plain text formats.

Tensor file::

    shape 2 2 2
    rank 1 1            (optional)
    dense               (optional, followed by N_d reals in column-major order)
    1.0 2.0 ...

Pattern file::

    shape 3 3 3
    rank 2 2
    1 1 1               (one observed 1-based index per line)
    pivot 2 3 1         (optional explicit pivots)

Values file::

    value 1 1 1 0.25

Blank lines and text after ``#`` are ignored.
"""
from __future__ import annotations

import os
import tempfile
from os import PathLike
from pathlib import Path
from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np
from typing_extensions import TypeAlias

from .tensor.dense import DenseTensor
from .tensor.shape import RankVector, Shape

StrOrPath: TypeAlias = "Union[str, PathLike[str]]"

Index = Tuple[int, ...]


class FormatError(ValueError):
    def __init__(self, fname: str, lineno: int, msg: str):
        super().__init__(f"{fname}:{lineno}: {msg}")
        self.fname = fname
        self.lineno = lineno


def _lines(path: StrOrPath) -> List[Tuple[int, List[str]]]:
    res: List[Tuple[int, List[str]]] = []
    with open(path) as f:
        for lineno, line in enumerate(f, 1):
            tokens = line.split("#", 1)[0].split()
            if tokens:
                res.append((lineno, tokens))
    return res


def _ints(fname: str, lineno: int, tokens: Sequence[str]) -> Tuple[int, ...]:
    try:
        return tuple(int(t) for t in tokens)
    except ValueError as e:
        raise FormatError(fname, lineno, f"expected integers: {e}") from e


class TensorFile(NamedTuple):
    shape: Shape
    rank: Optional[RankVector]
    tensor: Optional[DenseTensor]


class PatternFile(NamedTuple):
    shape: Shape
    rank: Optional[RankVector]
    observed: Tuple[Index, ...]
    pivots: Tuple[Index, ...]


def _header(
    fname: str, lines: List[Tuple[int, List[str]]]
) -> Tuple[Shape, Optional[RankVector], int]:
    if not lines or lines[0][1][0] != "shape":
        raise FormatError(fname, lines[0][0] if lines else 1, "missing shape")

    lineno, tokens = lines[0]
    try:
        shape = Shape(_ints(fname, lineno, tokens[1:]))
    except (TypeError, ValueError) as e:
        raise FormatError(fname, lineno, str(e)) from e

    if len(lines) > 1 and lines[1][1][0] == "rank":
        lineno, tokens = lines[1]
        try:
            rank = RankVector(_ints(fname, lineno, tokens[1:]))
        except (TypeError, ValueError) as e:
            raise FormatError(fname, lineno, str(e)) from e
        return shape, rank, 2

    return shape, None, 1


def read_tensor(path: StrOrPath) -> TensorFile:
    fname = os.fspath(path)
    lines = _lines(path)
    shape, rank, pos = _header(fname, lines)

    if pos == len(lines):
        return TensorFile(shape, rank, None)

    lineno, tokens = lines[pos]
    if tokens != ["dense"]:
        raise FormatError(fname, lineno, f"expected 'dense', got {tokens}")

    try:
        vals = [float(t) for _, ts in lines[pos + 1 :] for t in ts]
    except ValueError as e:
        raise FormatError(fname, lineno, f"invalid real: {e}") from e

    if len(vals) != shape.size:
        raise FormatError(
            fname, lineno, f"expected {shape.size} values, got {len(vals)}"
        )

    return TensorFile(shape, rank, DenseTensor(shape, vals))


def format_tensor(t: DenseTensor, rank: Optional[RankVector] = None) -> str:
    out = ["shape " + " ".join(map(str, t.shape))]
    if rank is not None:
        out.append("rank " + " ".join(map(str, rank)))
    out.append("dense")
    out.extend(repr(float(v)) for v in t.values)
    return "\n".join(out) + "\n"


def read_pattern(path: StrOrPath) -> PatternFile:
    fname = os.fspath(path)
    lines = _lines(path)
    shape, rank, pos = _header(fname, lines)

    observed: List[Index] = []
    pivots: List[Index] = []
    seen: Dict[Index, int] = {}

    for lineno, tokens in lines[pos:]:
        is_pivot = tokens[0] == "pivot"
        idx = _ints(fname, lineno, tokens[1:] if is_pivot else tokens)

        if len(idx) != shape.order or not all(
            1 <= x <= n for x, n in zip(idx, shape)
        ):
            raise FormatError(fname, lineno, f"index {idx} outside {shape}")

        if is_pivot:
            pivots.append(idx)
        elif idx in seen:
            raise FormatError(
                fname, lineno, f"duplicate index {idx} (line {seen[idx]})"
            )
        else:
            seen[idx] = lineno
            observed.append(idx)

    return PatternFile(shape, rank, tuple(observed), tuple(pivots))


def format_pattern(
    shape: Shape,
    observed: Sequence[Index],
    rank: Optional[RankVector] = None,
    pivots: Sequence[Index] = (),
) -> str:
    out = ["shape " + " ".join(map(str, shape))]
    if rank is not None:
        out.append("rank " + " ".join(map(str, rank)))
    out.extend(" ".join(map(str, idx)) for idx in observed)
    out.extend("pivot " + " ".join(map(str, idx)) for idx in pivots)
    return "\n".join(out) + "\n"


def read_values(path: StrOrPath) -> Dict[Index, float]:
    fname = os.fspath(path)
    res: Dict[Index, float] = {}

    for lineno, tokens in _lines(path):
        if tokens[0] != "value" or len(tokens) < 3:
            raise FormatError(fname, lineno, "expected 'value x1 ... xd v'")

        idx = _ints(fname, lineno, tokens[1:-1])
        try:
            v = float(tokens[-1])
        except ValueError as e:
            raise FormatError(fname, lineno, f"invalid real: {e}") from e

        if not np.isfinite(v):
            raise FormatError(fname, lineno, f"non-finite value {v}")
        if idx in res:
            raise FormatError(fname, lineno, f"duplicate index {idx}")

        res[idx] = v

    return res


def write_atomic(path: StrOrPath, text: str) -> None:
    """Write via a temporary file in the same directory and rename."""
    dst = Path(path)
    dst.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=dst.parent, prefix=f".{dst.name}.")
    try:
        with os.fdopen(fd, "w", newline="") as f:
            f.write(text)
        os.replace(tmp, dst)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
