from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterator, Sequence

import numpy as np

from ..errors import ParameterError


def check_dimensions(n: int, d: int, m: int | None = None) -> None:
    if n < 1:
        raise ParameterError(f"n must be positive, got {n}")
    if d < 1 or d > n:
        raise ParameterError(f"d must satisfy 1 <= d <= n, got d={d}, n={n}")
    if m is not None and (m < 1 or m > n):
        raise ParameterError(f"m must satisfy 1 <= m <= n, got m={m}, n={n}")


@dataclass(frozen=True)
class RowVector:
    """A 0/1 row of length n stored by the sorted indices of its ones."""

    n: int
    support: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ParameterError(f"n must be positive, got {self.n}")
        if any(b <= a for a, b in zip(self.support, self.support[1:])):
            raise ParameterError("support must be strictly increasing")
        if self.support and (self.support[0] < 0 or self.support[-1] >= self.n):
            raise ParameterError(f"support indices must lie in [0, {self.n})")

    @property
    def d(self) -> int:
        return len(self.support)

    def to_dense(self) -> np.ndarray:
        row = np.zeros(self.n, dtype=np.float64)
        row[list(self.support)] = 1.0
        return row


@dataclass(frozen=True, eq=False)
class CombMatrix:
    """An m x n 0/1 matrix whose rows all contain exactly d ones."""

    n: int
    d: int
    supports: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        supports = np.array(self.supports, dtype=np.int64, copy=True)
        if supports.ndim != 2 or supports.shape[1] != self.d:
            raise ParameterError(
                f"supports must have shape (m, {self.d}), got {supports.shape}"
            )
        check_dimensions(self.n, self.d, supports.shape[0])
        if supports.size and (supports.min() < 0 or supports.max() >= self.n):
            raise ParameterError(f"support indices must lie in [0, {self.n})")
        if self.d > 1 and np.any(np.diff(supports, axis=1) <= 0):
            raise ParameterError("each row support must be strictly increasing")
        supports.setflags(write=False)
        object.__setattr__(self, "supports", supports)

    @classmethod
    def from_rows(cls, n: int, rows: Sequence[Sequence[int]]) -> "CombMatrix":
        ordered = [sorted(int(i) for i in row) for row in rows]
        if not ordered:
            raise ParameterError("a matrix needs at least one row")
        d = len(ordered[0])
        if any(len(row) != d for row in ordered):
            raise ParameterError("every row must contain the same number of ones")
        return cls(n=n, d=d, supports=np.array(ordered, dtype=np.int64))

    @classmethod
    def from_dense(cls, dense: np.ndarray | Sequence[Sequence[int]]) -> "CombMatrix":
        array = np.asarray(dense)
        if array.ndim != 2:
            raise ParameterError("dense matrix must be two-dimensional")
        if not np.isin(array, (0, 1)).all():
            raise ParameterError("entries must be 0 or 1")
        rows = [np.flatnonzero(row).tolist() for row in array]
        return cls.from_rows(array.shape[1], rows)

    @property
    def m(self) -> int:
        return int(self.supports.shape[0])

    @property
    def is_square(self) -> bool:
        return self.m == self.n

    @property
    def rows(self) -> list[RowVector]:
        return [RowVector(self.n, tuple(int(i) for i in row)) for row in self.supports]

    @cached_property
    def dense(self) -> np.ndarray:
        array = np.zeros((self.m, self.n), dtype=np.float64)
        np.put_along_axis(array, self.supports, 1.0, axis=1)
        array.setflags(write=False)
        return array

    def to_dense(self) -> np.ndarray:
        return self.dense.copy()

    def to_int(self) -> np.ndarray:
        return self.dense.astype(np.int64)

    def row_sums(self) -> np.ndarray:
        return np.full(self.m, self.d, dtype=np.int64)

    def column_sums(self) -> np.ndarray:
        return np.bincount(self.supports.ravel(), minlength=self.n).astype(np.int64)

    def has_zero_column(self) -> bool:
        return bool((self.column_sums() == 0).any())

    def has_duplicate_rows(self) -> bool:
        return len({row.tobytes() for row in self.supports}) < self.m

    def to_text(self) -> str:
        return "\n".join(
            "".join("1" if value else "0" for value in row) for row in self.dense
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CombMatrix):
            return NotImplemented
        return (
            self.n == other.n
            and self.d == other.d
            and np.array_equal(self.supports, other.supports)
        )

    def __hash__(self) -> int:
        return hash((self.n, self.d, self.supports.tobytes()))


class MatrixSource(ABC):
    """Indexed collection of weighted matrices drawn from one grid point."""

    m: int
    n: int
    d: int

    @abstractmethod
    def __len__(self) -> int:
        """Number of matrices the source yields."""

    @abstractmethod
    def draw(self, index: int) -> CombMatrix:
        """Return the matrix at position ``index``; pure in the index."""

    @property
    @abstractmethod
    def exact(self) -> bool:
        """True when the source enumerates the whole model with uniform weights."""

    def weight(self, index: int) -> float:
        return 1.0 / len(self)

    def __iter__(self) -> Iterator[CombMatrix]:
        for index in range(len(self)):
            yield self.draw(index)
