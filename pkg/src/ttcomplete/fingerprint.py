"""Deterministic text form and digest of run configurations.

The digest goes into report headers so that two outputs can be matched to
the configuration that produced them.
"""
from __future__ import annotations

import os
from hashlib import sha256
from numbers import Complex
from typing import Callable, Iterable, List, Mapping, Optional, Set, Tuple

import numpy as np


def stringify(
    nest: object, default: Optional[Callable[[object], object]] = None
) -> str:
    def _default(o: object):
        raise TypeError(f"Cannot stringify object of type {type(o)}")

    dst: List[str] = []
    _stringify(nest, dst, set(), default or _default)
    return "".join(dst)


def digest(nest: object) -> str:
    return sha256(stringify(nest).encode("utf8")).hexdigest()


def _stringify(
    nest: object,
    dst: List[str],
    visited: Set[int],
    default: Callable[[object], object],
) -> None:
    if isinstance(nest, np.ndarray):
        _stringify(nest.tolist(), dst, visited, default)
    elif isinstance(nest, (tuple, list)):
        _enter(nest, visited)
        dst.append("(" if isinstance(nest, tuple) else "[")
        for v in nest:  # pyright: ignore [reportUnknownVariableType]
            _stringify(v, dst, visited, default)
            dst.append(",")
        dst.append(")" if isinstance(nest, tuple) else "]")
        visited.discard(id(nest))
    elif isinstance(nest, (set, frozenset)):
        _enter(nest, visited)
        keys = _sorted_keys(nest, visited, default)  # pyright: ignore
        dst.append("{")
        dst.append(",".join(s for s, _ in keys))
        dst.append("}")
        visited.discard(id(nest))
    elif isinstance(nest, Mapping):
        _enter(nest, visited)
        keys = _sorted_keys(nest, visited, default)  # pyright: ignore
        dst.append("{")
        for s, k in keys:
            dst.append(s)
            dst.append(":")
            _stringify(nest[k], dst, visited, default)
            dst.append(",")
        dst.append("}")
        visited.discard(id(nest))
    else:
        _stringify_atom(nest, dst, visited, default)


def _enter(nest: object, visited: Set[int]):
    if id(nest) in visited:
        raise ValueError("Cannot stringify a cyclic structure")
    visited.add(id(nest))


def _sorted_keys(
    keys: Iterable[object],
    visited: Set[int],
    default: Callable[[object], object],
) -> List[Tuple[str, object]]:
    res: List[Tuple[str, object]] = []
    for k in keys:
        s: List[str] = []
        _stringify(k, s, visited, default)
        res.append(("".join(s), k))
    res.sort(key=lambda x: x[0])
    return res


def _stringify_atom(
    atom: object,
    dst: List[str],
    visited: Set[int],
    default: Callable[[object], object],
):
    if atom is None or isinstance(atom, (bool, str)):
        dst.append(repr(atom))
    elif isinstance(atom, np.generic):
        dst.append(repr(atom.item()))
    elif isinstance(atom, Complex):
        dst.append(repr(atom))
    elif isinstance(atom, os.PathLike):
        dst.append(f"Path({os.fspath(atom)!r})")  # pyright: ignore
    else:
        _stringify(default(atom), dst, visited, default)
