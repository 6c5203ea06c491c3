from __future__ import annotations

import itertools
from math import comb
from typing import Iterator

import numpy as np

from ..errors import CapacityError
from .base import CombMatrix, MatrixSource, RowVector, check_dimensions

ROW_BUDGET = 10**6
MATRIX_BUDGET = 10**7


def row_count(n: int, d: int) -> int:
    return comb(n, d)


def matrix_count(m: int, n: int, d: int) -> int:
    return comb(n, d) ** m


def support_table(n: int, d: int, budget: int = ROW_BUDGET) -> np.ndarray:
    check_dimensions(n, d)
    count = row_count(n, d)
    if count > budget:
        raise CapacityError(f"C({n},{d}) = {count} rows exceeds the budget {budget}")
    return np.array(list(itertools.combinations(range(n), d)), dtype=np.int64)


def enumerate_rows(n: int, d: int) -> list[RowVector]:
    """All C(n, d) rows in lexicographic support order."""
    return [RowVector(n, tuple(int(i) for i in row)) for row in support_table(n, d)]


def enumerate_matrices(
    m: int, n: int, d: int, budget: int = MATRIX_BUDGET
) -> Iterator[CombMatrix]:
    """Yield every m x n matrix of the model once, in lexicographic row order."""
    source = EnumeratedSource(m, n, d, budget=budget)
    for index in range(len(source)):
        yield source.draw(index)


class EnumeratedSource(MatrixSource):
    """The whole model at one (m, n, d), each matrix with weight 1 / C(n, d)^m.

    Index ``i`` is decoded as an m-digit mixed-radix number whose digits select
    rows from the lexicographic support table, matching ``itertools.product``.
    """

    def __init__(self, m: int, n: int, d: int, budget: int = MATRIX_BUDGET) -> None:
        check_dimensions(n, d, m)
        total = matrix_count(m, n, d)
        if total > budget:
            raise CapacityError(
                f"C({n},{d})^{m} = {total} matrices exceeds the budget {budget}"
            )
        self.m = m
        self.n = n
        self.d = d
        self.table = support_table(n, d)
        self.total = total

    def __len__(self) -> int:
        return self.total

    @property
    def exact(self) -> bool:
        return True

    def digits(self, index: int) -> list[int]:
        if not 0 <= index < self.total:
            raise IndexError(index)
        base = len(self.table)
        out = [0] * self.m
        for position in range(self.m - 1, -1, -1):
            index, out[position] = divmod(index, base)
        return out

    def draw(self, index: int) -> CombMatrix:
        return CombMatrix(n=self.n, d=self.d, supports=self.table[self.digits(index)])
