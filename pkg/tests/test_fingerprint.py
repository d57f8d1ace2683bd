from pathlib import Path

import numpy as np
import pytest

from ttcomplete.fingerprint import digest, stringify


@pytest.mark.parametrize(
    "nest,text",
    [
        (1, "1"),
        ("a", "'a'"),
        (None, "None"),
        ((1, [2.5, True]), "(1,[2.5,True,],)"),
        ({"b": 1, "a": 2}, "{'a':2,'b':1,}"),
        ({3, 1, 2}, "{1,2,3}"),
        (Path("x"), "Path('x')"),
        (np.int64(3), "3"),
        (np.array([[1, 2], [3, 4]]), "[[1,2,],[3,4,],]"),
    ],
)
def test_stringify(nest: object, text: str):
    assert stringify(nest) == text


def test_order_independent():
    assert digest({"a": 1, "b": (2, 3)}) == digest({"b": (2, 3), "a": 1})
    assert digest({"a": 1}) != digest({"a": 2})
    assert len(digest(0)) == 64


def test_cyclic():
    a: list = [1]
    a.append(a)
    with pytest.raises(ValueError):
        stringify(a)

    # shared but acyclic
    b = [1]
    assert stringify((b, b)) == "([1,],[1,],)"


def test_default():
    class Opaque:
        pass

    with pytest.raises(TypeError):
        stringify(Opaque())

    assert stringify([Opaque()], default=lambda o: "opaque") == "['opaque',]"
