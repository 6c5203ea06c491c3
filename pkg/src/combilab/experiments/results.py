from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Optional

import numpy as np
import pandas as pd

from ..errors import FitError

TABLE_COLUMNS = ["point", "m", "n", "d", "trials", "stat", "mean", "median", "stderr"]


@dataclass(frozen=True)
class FitResult:
    slope: float
    intercept: float
    r_squared: float
    points: int

    def predict(self, x: float) -> float:
        return math.exp(self.intercept) * x**self.slope

    def to_dict(self) -> dict[str, Any]:
        return {
            "slope": self.slope,
            "intercept": self.intercept,
            "r_squared": self.r_squared,
            "points": self.points,
        }


class TableBuilder:
    """Accumulates (grid point, statistic) rows for a StudyResult."""

    def __init__(self) -> None:
        self.rows: list[dict[str, Any]] = []

    def add(
        self,
        point: int,
        m: int,
        n: int,
        d: int,
        trials: int,
        stat: str,
        mean: float,
        median: float,
        stderr: float,
    ) -> None:
        self.rows.append(
            {
                "point": point,
                "m": m,
                "n": n,
                "d": d,
                "trials": trials,
                "stat": stat,
                "mean": float(mean),
                "median": float(median),
                "stderr": float(stderr),
            }
        )

    def frame(self) -> pd.DataFrame:
        table = pd.DataFrame(self.rows, columns=TABLE_COLUMNS)
        return table.sort_values(["point", "stat"], kind="mergesort").reset_index(
            drop=True
        )


@dataclass
class StudyResult:
    study: str
    table: pd.DataFrame
    metadata: dict[str, Any] = field(default_factory=dict)
    fit: Optional[FitResult] = None
    fit_error: Optional[str] = None
    headline: Optional[str] = None
    reference: Optional[str] = None

    def stats(self) -> list[str]:
        return sorted(self.table["stat"].unique().tolist())

    def stat_frame(self, stat: str) -> pd.DataFrame:
        return self.table[self.table["stat"] == stat].sort_values("point")

    def column(self, stat: str, column: str = "mean") -> np.ndarray:
        return self.stat_frame(stat)[column].to_numpy(dtype=np.float64)

    def value(self, point: int, stat: str, column: str = "mean") -> float:
        frame = self.table
        match = frame[(frame["point"] == point) & (frame["stat"] == stat)]
        if match.empty:
            raise KeyError(f"no statistic '{stat}' at point {point}")
        return float(match.iloc[0][column])

    def require_fit(self) -> FitResult:
        if self.fit is None:
            raise FitError(self.fit_error or f"{self.study} has no fit")
        return self.fit
