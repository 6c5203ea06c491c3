"""Closed-form right-hand sides of the small-ball inequalities."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any

from ..errors import ParameterError


@dataclass(frozen=True)
class SmallBallBound:
    value: float

    @property
    def clamped(self) -> float:
        return min(1.0, self.value)

    def to_dict(self) -> dict[str, Any]:
        return {"value": self.value, "clamped": self.clamped}


def small_ball_rhs_general(
    eps: float, gamma: float, b: float, d: int, n: int, clcd: float, alpha: float
) -> SmallBallBound:
    """eps/(gamma b) + sqrt(n/d) / (gamma b CLCD) + 2 exp(-4 alpha^2 d / n^2)."""
    if b <= 0:
        raise ParameterError(f"b must be positive, got {b}")
    if not 0.0 < gamma < 1.0:
        raise ParameterError(f"gamma must lie in (0, 1), got {gamma}")
    if clcd <= 0:
        raise ParameterError(f"CLCD must be positive, got {clcd}")
    if eps < 0 or alpha <= 0 or d < 1 or n < d:
        raise ParameterError("need eps >= 0, alpha > 0 and 1 <= d <= n")
    scale = 1.0 / (gamma * b)
    value = (
        eps * scale
        + scale * math.sqrt(n / d) / clcd
        + 2.0 * math.exp(-4.0 * alpha**2 * d / n**2)
    )
    return SmallBallBound(value)


def small_ball_rhs(
    eps: float, gamma: float, delta: float, rho: float, d: int, mu_const: float
) -> SmallBallBound:
    """Specialization to non-almost-constant unit vectors.

    4 sqrt(2) eps / (gamma delta rho) + 28 sqrt(2) / (gamma delta^{3/2} rho sqrt(d))
    + 2 exp(-4 mu^2 d), valid for 0 < gamma < delta rho / 12.
    """
    if not (0.0 < delta < 1.0 and 0.0 < rho < 1.0):
        raise ParameterError("delta and rho must lie in (0, 1)")
    if not 0.0 < gamma < delta * rho / 12.0:
        raise ParameterError(
            f"gamma must lie in (0, delta*rho/12) = (0, {delta * rho / 12.0}), "
            f"got {gamma}"
        )
    if eps < 0 or d < 1 or mu_const <= 0:
        raise ParameterError("need eps >= 0, d >= 1 and mu > 0")
    root2 = math.sqrt(2.0)
    value = (
        4.0 * root2 * eps / (gamma * delta * rho)
        + 28.0 * root2 / (gamma * delta**1.5 * rho * math.sqrt(d))
        + 2.0 * math.exp(-4.0 * mu_const**2 * d)
    )
    return SmallBallBound(value)
