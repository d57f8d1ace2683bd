"""Dense tensors and the index bijections between tensors and matrices.

All reshapes use column-major ordering: the first listed index varies
fastest. This fixes

- the flat position of U(x_1, ..., x_d),
- the row index of an unfolding (x_1, ..., x_i) and its column index
  (x_{i+1}, ..., x_d),
- the column index of a matricization (x_1, .., x_{i-1}, x_{i+1}, .., x_d).

Indices passed to and returned from the public API are 1-based.
"""
from __future__ import annotations

from typing import Sequence, Tuple

import numpy as np
import numpy.typing as npt

from .shape import Shape, as_shape

FloatArray = npt.NDArray[np.float64]


class DenseTensor:
    __slots__ = ["_shape", "_values"]

    _shape: Shape
    _values: FloatArray

    def __init__(self, shape: Shape | Sequence[int], values: npt.ArrayLike):
        shape = as_shape(shape)
        flat = np.array(values, dtype=np.float64).reshape(-1)

        if flat.size != shape.size:
            raise ValueError(
                f"Expected {shape.size} values for {shape}, got {flat.size}"
            )

        flat.setflags(write=False)
        self._shape = shape
        self._values = flat

    @classmethod
    def from_array(cls, arr: npt.ArrayLike) -> DenseTensor:
        a = np.asarray(arr, dtype=np.float64)
        return cls(Shape(a.shape), a.reshape(-1, order="F"))

    @classmethod
    def zeros(cls, shape: Shape | Sequence[int]) -> DenseTensor:
        shape = as_shape(shape)
        return cls(shape, np.zeros(shape.size))

    @property
    def shape(self) -> Shape:
        return self._shape

    @property
    def values(self) -> FloatArray:
        """Flat read-only values in column-major order."""
        return self._values

    @property
    def array(self) -> FloatArray:
        return self._values.reshape(self._shape.dims, order="F")

    def flat_position(self, index: Sequence[int]) -> int:
        _check_index(self._shape, index)
        zero = tuple(x - 1 for x in index)
        return int(np.ravel_multi_index(zero, self._shape.dims, order="F"))

    def __getitem__(self, index: Sequence[int]) -> float:
        return float(self._values[self.flat_position(index)])

    def norm(self) -> float:
        return float(np.linalg.norm(self._values))

    def relative_distance(self, other: DenseTensor) -> float:
        if other.shape != self._shape:
            raise ValueError(f"Shape mismatch: {self._shape} vs {other.shape}")

        scale = max(self.norm(), other.norm())
        diff = float(np.linalg.norm(self._values - other.values))
        return diff / scale if scale > 0 else diff

    def __repr__(self) -> str:
        return f"DenseTensor({self._shape})"


def _check_index(shape: Shape, index: Sequence[int]):
    if len(index) != shape.order:
        raise IndexError(f"Index {tuple(index)} does not match {shape}")
    for x, n in zip(index, shape):
        if not 1 <= x <= n:
            raise IndexError(f"Index {tuple(index)} out of range for {shape}")


def _check_unfold_axis(shape: Shape, i: int):
    if not 1 <= i <= shape.order - 1:
        raise IndexError(
            f"Unfolding axis must be in [1, {shape.order - 1}]. Given {i}"
        )


def _check_mode(shape: Shape, i: int):
    if not 1 <= i <= shape.order:
        raise IndexError(f"Mode must be in [1, {shape.order}]. Given {i}")


def unfold(t: DenseTensor, i: int) -> FloatArray:
    """The i-th unfolding, an N_i x N̄_i matrix."""
    _check_unfold_axis(t.shape, i)
    return t.values.reshape(t.shape.head(i), t.shape.tail(i), order="F")


def refold(
    mat: npt.ArrayLike, i: int, shape: Shape | Sequence[int]
) -> DenseTensor:
    shape = as_shape(shape)
    _check_unfold_axis(shape, i)
    m = np.asarray(mat, dtype=np.float64)

    if m.shape != (shape.head(i), shape.tail(i)):
        raise ValueError(f"Matrix of shape {m.shape} is not unfolding {i}")

    return DenseTensor(shape, m.reshape(-1, order="F"))


def matricize(t: DenseTensor, i: int) -> FloatArray:
    """The i-th matricization: mode-i fibers as rows."""
    _check_mode(t.shape, i)
    moved = np.moveaxis(t.array, i - 1, 0)
    return moved.reshape(t.shape[i - 1], -1, order="F")


def dematricize(
    mat: npt.ArrayLike, i: int, shape: Shape | Sequence[int]
) -> DenseTensor:
    shape = as_shape(shape)
    _check_mode(shape, i)
    m = np.asarray(mat, dtype=np.float64)
    n_i = shape[i - 1]

    if m.shape != (n_i, shape.size // n_i):
        raise ValueError(f"Matrix of shape {m.shape} is not matricization {i}")

    rest: Tuple[int, ...] = shape.dims[: i - 1] + shape.dims[i:]
    moved = m.reshape((n_i, *rest), order="F")
    return DenseTensor.from_array(np.moveaxis(moved, 0, i - 1))
