from __future__ import annotations

from typing import (
    Collection,
    Dict,
    Iterable,
    Iterator,
    List,
    Optional,
    Sequence,
    Tuple,
)

import numpy as np
import numpy.typing as npt

from ..tensor.shape import Shape, as_shape

Index = Tuple[int, ...]


class SamplingPattern:
    """Observed multi-indices Ω over a shape.

    Indices are 1-based and kept sorted lexicographically
    (x_1 most significant).
    """

    __slots__ = ["_shape", "_observed", "_lookup"]

    _shape: Shape
    _observed: Tuple[Index, ...]
    _lookup: frozenset[Index]

    def __init__(
        self,
        shape: Shape | Sequence[int],
        observed: Iterable[Sequence[int]],
    ):
        shape = as_shape(shape)
        idxs = [tuple(int(x) for x in idx) for idx in observed]

        for idx in idxs:
            if len(idx) != shape.order or not all(
                1 <= x <= n for x, n in zip(idx, shape)
            ):
                raise ValueError(f"Index {idx} out of range for {shape}")

        lookup = frozenset(idxs)
        if len(lookup) != len(idxs):
            raise ValueError("Sampling pattern contains duplicate indices")

        self._shape = shape
        self._observed = tuple(sorted(idxs))
        self._lookup = lookup

    @classmethod
    def from_mask(cls, mask: npt.ArrayLike) -> SamplingPattern:
        m = np.asarray(mask, dtype=bool)
        pos = np.argwhere(m) + 1
        return cls(Shape(m.shape), (tuple(int(x) for x in p) for p in pos))

    @property
    def shape(self) -> Shape:
        return self._shape

    @property
    def observed(self) -> Tuple[Index, ...]:
        return self._observed

    def __len__(self) -> int:
        return len(self._observed)

    def __iter__(self) -> Iterator[Index]:
        return iter(self._observed)

    def __contains__(self, index: object) -> bool:
        return index in self._lookup

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, SamplingPattern)
            and other._shape == self._shape
            and other._observed == self._observed
        )

    def __hash__(self) -> int:
        return hash((self._shape, self._observed))

    def __repr__(self) -> str:
        return f"SamplingPattern({self._shape}, {len(self)} observed)"

    def mask(self) -> npt.NDArray[np.bool_]:
        m = np.zeros(self._shape.dims, dtype=bool)
        for idx in self._observed:
            m[tuple(x - 1 for x in idx)] = True
        return m

    def count_in(self, box: Sequence[Optional[Collection[int]]]) -> int:
        """N_Ω(Y) for the axis-aligned subtensor Y.

        `box` holds, per mode, the allowed coordinates or None for the
        whole mode.
        """
        if len(box) != self._shape.order:
            raise ValueError(f"Box {box} does not match {self._shape}")

        sets = [None if b is None else set(b) for b in box]
        return sum(
            1
            for idx in self._observed
            if all(s is None or x in s for x, s in zip(idx, sets))
        )

    def by_slice(self) -> Dict[int, List[Index]]:
        """Observed indices grouped by the last coordinate, in order."""
        res: Dict[int, List[Index]] = {
            s: [] for s in range(1, self._shape[-1] + 1)
        }
        for idx in self._observed:
            res[idx[-1]].append(idx)
        return res

    def slice_counts(self) -> Tuple[int, ...]:
        return tuple(len(v) for v in self.by_slice().values())


def random_pattern(
    shape: Shape | Sequence[int], p: float, seed: int | np.random.SeedSequence
) -> SamplingPattern:
    """Every cell observed independently with probability p."""
    if not 0 <= p <= 1:
        raise ValueError(f"Probability must be in [0, 1]. Given {p}")

    shape = as_shape(shape)
    rng = np.random.default_rng(seed)
    return SamplingPattern.from_mask(rng.random(shape.dims) < p)
