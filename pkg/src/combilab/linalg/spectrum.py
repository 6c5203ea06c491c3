from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Literal

import numpy as np
import scipy.linalg
from loguru import logger
from scipy.sparse.linalg import ArpackError, ArpackNoConvergence, LinearOperator, eigsh

from ..sampling.base import CombMatrix
from .modular import is_singular_exact

SpectrumMethod = Literal["auto", "svd", "inverse"]

INVERSE_ITERATION_MIN_N = 512
ARPACK_MIN_N = 3
CROSSCHECK_TOLERANCE = 1e-6


@dataclass(frozen=True)
class SpectralSummary:
    s1: float
    sn: float
    kappa: float
    centered_opnorm: float
    exactly_singular: bool
    method: str = "svd"

    def to_dict(self) -> dict[str, Any]:
        return {
            "s1": self.s1,
            "sn": self.sn,
            "kappa": "inf" if math.isinf(self.kappa) else self.kappa,
            "centered_opnorm": self.centered_opnorm,
            "exactly_singular": self.exactly_singular,
            "method": self.method,
        }


def centered(matrix: CombMatrix) -> np.ndarray:
    """M - E M, where every entry of E M equals d/n."""
    return matrix.dense - matrix.d / matrix.n


def centered_opnorm(matrix: CombMatrix) -> float:
    return float(scipy.linalg.svdvals(centered(matrix))[0])


def restricted_opnorm(matrix: CombMatrix) -> float:
    """Operator norm of M composed with the projector onto {x : sum x_i = 0}."""
    n = matrix.n
    projector = np.eye(n) - np.full((n, n), 1.0 / n)
    return float(scipy.linalg.svdvals(matrix.dense @ projector)[0])


def row_sum_identity_holds(matrix: CombMatrix) -> bool:
    """M 1 = d 1, checked in integer arithmetic."""
    image = matrix.to_int() @ np.ones(matrix.n, dtype=np.int64)
    return bool(np.all(image == matrix.d))


def _extreme_by_svd(dense: np.ndarray) -> tuple[float, float]:
    values = scipy.linalg.svdvals(dense)
    return float(values[0]), float(values[-1])


def _extreme_by_inverse_iteration(dense: np.ndarray) -> tuple[float, float]:
    n = dense.shape[0]
    gram = LinearOperator(
        (n, n), matvec=lambda x: dense.T @ (dense @ x), dtype=np.float64
    )
    # fixed start vector: ARPACK otherwise draws one from shared global state
    start = np.random.default_rng(n).standard_normal(n)
    largest = eigsh(
        gram, k=1, which="LA", tol=1e-12, v0=start, return_eigenvectors=False
    )
    factor = scipy.linalg.lu_factor(dense, check_finite=False)

    def inverse_gram(x: np.ndarray) -> np.ndarray:
        # (M^T M)^{-1} x = M^{-1} (M^{-T} x)
        return scipy.linalg.lu_solve(
            factor, scipy.linalg.lu_solve(factor, x, trans=1)
        )

    operator = LinearOperator((n, n), matvec=inverse_gram, dtype=np.float64)
    top = eigsh(
        operator, k=1, which="LA", tol=1e-12, v0=start, return_eigenvectors=False
    )
    return math.sqrt(float(largest[0])), 1.0 / math.sqrt(float(top[0]))


def spectrum(matrix: CombMatrix, method: SpectrumMethod = "auto") -> SpectralSummary:
    """Extreme singular values, condition number and centered norm of one matrix.

    An exactly singular matrix reports ``sn = 0`` and ``kappa = inf``. The
    inverse-iteration path is only taken for square invertible inputs with
    n >= 3 and falls back to a dense SVD when ARPACK does not converge.
    """
    dense = matrix.dense
    singular = is_singular_exact(matrix)
    chosen = method
    if method == "auto":
        chosen = (
            "inverse"
            if matrix.is_square and matrix.n > INVERSE_ITERATION_MIN_N
            else "svd"
        )
    if chosen == "inverse" and (
        singular or not matrix.is_square or matrix.n < ARPACK_MIN_N
    ):
        chosen = "svd"

    if chosen == "inverse":
        try:
            s1, sn = _extreme_by_inverse_iteration(dense)
        except (ArpackNoConvergence, ArpackError, scipy.linalg.LinAlgError) as exc:
            logger.warning("Inverse iteration failed ({}); using dense SVD", exc)
            chosen = "svd"
            s1, sn = _extreme_by_svd(dense)
    else:
        s1, sn = _extreme_by_svd(dense)

    if singular:
        sn = 0.0
        kappa = math.inf
    else:
        kappa = s1 / max(sn, np.finfo(np.float64).tiny)
    return SpectralSummary(
        s1=s1,
        sn=sn,
        kappa=kappa,
        centered_opnorm=centered_opnorm(matrix),
        exactly_singular=singular,
        method=chosen,
    )


def crosscheck_sn(matrix: CombMatrix, summary: SpectralSummary) -> float:
    """Relative gap between ``summary.sn`` and the dense SVD value."""
    _, reference = _extreme_by_svd(matrix.dense)
    if summary.exactly_singular:
        return 0.0
    gap = abs(summary.sn - reference) / max(reference, np.finfo(np.float64).tiny)
    if gap > CROSSCHECK_TOLERANCE:
        logger.warning(
            "Inverse iteration s_n={} disagrees with SVD s_n={} (relative gap {:.2e})",
            summary.sn,
            reference,
            gap,
        )
    return gap
