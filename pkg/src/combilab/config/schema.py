from __future__ import annotations

import math
from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

SCHEMA_VERSION = 1

DRule = Literal["fixed", "pn", "power", "cuberoot", "logn", "5logn"]


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


class GridPoint(_Strict):
    n: int = Field(ge=1)
    m: Optional[int] = None
    d_rule: DRule = "pn"
    k: Optional[int] = None
    p: Optional[float] = None
    a: Optional[float] = None
    c: Optional[int] = None

    @model_validator(mode="after")
    def check_rule_parameters(self) -> "GridPoint":
        needed = {"fixed": "k", "pn": "p", "power": "a", "logn": "c"}.get(self.d_rule)
        if needed is not None and getattr(self, needed) is None:
            raise ValueError(f"d_rule '{self.d_rule}' requires field '{needed}'")
        return self

    @property
    def d(self) -> int:
        n = self.n
        if self.d_rule == "fixed":
            return int(self.k or 0)
        if self.d_rule == "pn":
            return int(math.floor((self.p or 0.0) * n + 1e-9))
        if self.d_rule == "power":
            return int(math.floor(n ** (self.a or 0.0) + 1e-9))
        if self.d_rule == "cuberoot":
            return int(math.floor(n ** (1.0 / 3.0) + 1e-9))
        if self.d_rule == "logn":
            return int(self.c or 0) * int(math.floor(math.log(n)))
        return 5 * int(math.floor(math.log(n)))

    @property
    def rows(self) -> int:
        return self.m if self.m is not None else self.n

    @property
    def p_effective(self) -> float:
        return self.d / self.n

    def label(self) -> str:
        return f"m{self.rows}_n{self.n}_d{self.d}"


class AlmostConstSettings(_Strict):
    delta: float = Field(default=0.05, gt=0.0, lt=1.0)
    rho: float = Field(default=0.05, gt=0.0, lt=1.0)


class ClcdSettings(_Strict):
    gamma: Optional[float] = Field(default=None, gt=0.0, lt=1.0)
    mu: float = Field(default=0.1, gt=0.0)
    theta_max_factor: float = Field(default=4.0, gt=0.0)
    grid_fraction: float = Field(default=1e-3, gt=0.0, le=1.0)


class OutputSettings(_Strict):
    out_dir: str = "reports/runs"


class ExperimentConfig(_Strict):
    schema_version: int = SCHEMA_VERSION
    grid: list[GridPoint] = Field(min_length=1)
    trials: int = Field(default=200, ge=1)
    seed: int = Field(default=0, ge=0, lt=2**64)
    epsilons: list[float] = Field(default_factory=lambda: [0.25, 0.5, 1.0, 2.0])
    direction_scale: float = Field(default=0.05, gt=0.0)
    opnorm_t: list[float] = Field(default_factory=lambda: [1.0, 2.0, 3.0])
    almost_constant: AlmostConstSettings = Field(default_factory=AlmostConstSettings)
    clcd: ClcdSettings = Field(default_factory=ClcdSettings)
    cons_vectors: int = Field(default=8, ge=1)
    exact: bool = False
    exact_budget: int = Field(default=10**5, ge=1, le=10**7)
    spectrum_method: Literal["auto", "svd", "inverse"] = "auto"
    certificate_check_rate: float = Field(default=0.01, ge=0.0, le=1.0)
    crosscheck_rate: float = Field(default=0.02, ge=0.0, le=1.0)
    decomposition_max_n: int = Field(default=32, ge=2)
    sparse_constant: float = Field(default=2.0, gt=0.0)
    sparse_margin: float = Field(default=0.1, ge=0.0)
    workers: Optional[int] = Field(default=None, ge=1)
    output: OutputSettings = Field(default_factory=OutputSettings)

    @field_validator("schema_version")
    @classmethod
    def check_version(cls, value: int) -> int:
        if value != SCHEMA_VERSION:
            raise ValueError(f"unsupported schema_version {value}, expected 1")
        return value

    @field_validator("epsilons", "opnorm_t")
    @classmethod
    def check_positive(cls, value: list[float]) -> list[float]:
        if any(item <= 0 for item in value):
            raise ValueError("values must be positive")
        return value

    @model_validator(mode="after")
    def check_grid(self) -> "ExperimentConfig":
        for index, point in enumerate(self.grid):
            d = point.d
            if not 1 <= d <= point.n:
                raise ValueError(
                    f"grid[{index}].d_rule: derived d={d} violates "
                    f"1 <= d <= n={point.n}"
                )
            if not 1 <= point.rows <= point.n:
                raise ValueError(
                    f"grid[{index}].m: m={point.rows} violates 1 <= m <= n={point.n}"
                )
        return self

    def points(self) -> list[tuple[int, int, int]]:
        return [(point.rows, point.n, point.d) for point in self.grid]
