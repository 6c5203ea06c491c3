"""Constructive upper bound on the smallest singular value.

For any nonzero x, s_n(M) <= ||x|| / ||(M^T)^{-1} x||. Taking x to be the part
of the first row orthogonal to the remaining rows keeps ||x|| small, and the
image norm decomposes over the biorthogonal system of the remaining rows.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np
import scipy.linalg

from ..errors import ParameterError, RankError, SingularityError
from ..sampling.base import CombMatrix
from .modular import is_singular_exact
from .subspace import dist_to_span, orthonormal_basis, project_onto_span

RESIDUAL_TOLERANCE = 1e-8


@dataclass(frozen=True)
class UpperBoundCertificate:
    x: np.ndarray = field(repr=False)
    x_norm: float
    image_norm: float
    bound: float

    def to_dict(self) -> dict[str, Any]:
        return {
            "x": [float(v) for v in self.x],
            "x_norm": self.x_norm,
            "image_norm": self.image_norm,
            "bound": self.bound,
        }


def _require_invertible(matrix: CombMatrix) -> None:
    if not matrix.is_square:
        raise ParameterError(f"need a square matrix, got {matrix.m}x{matrix.n}")
    if is_singular_exact(matrix):
        raise SingularityError("matrix is exactly singular")


def ratio_bound(matrix: CombMatrix, x: np.ndarray) -> tuple[float, float]:
    """``(||x||, ||(M^T)^{-1} x||)`` for an arbitrary test vector x."""
    vector = np.asarray(x, dtype=np.float64)
    image = scipy.linalg.solve(matrix.dense.T, vector)
    return float(np.linalg.norm(vector)), float(np.linalg.norm(image))


def witness_certificate(matrix: CombMatrix) -> UpperBoundCertificate:
    _require_invertible(matrix)
    rows = matrix.dense
    _, x, _ = project_onto_span(rows[0], rows[1:])
    x_norm, image_norm = ratio_bound(matrix, x)
    return UpperBoundCertificate(
        x=x, x_norm=x_norm, image_norm=image_norm, bound=x_norm / image_norm
    )


@dataclass
class DecompositionReport:
    biorthogonality: float
    dual_norm: float
    image_identity: float
    a: list[float]
    b: list[float]
    tolerance: float = RESIDUAL_TOLERANCE

    @property
    def max_residual(self) -> float:
        return max(self.biorthogonality, self.dual_norm, self.image_identity)

    @property
    def passed(self) -> bool:
        return self.max_residual < self.tolerance

    def to_dict(self) -> dict[str, Any]:
        return {
            "biorthogonality": self.biorthogonality,
            "dual_norm": self.dual_norm,
            "image_identity": self.image_identity,
            "a": self.a,
            "b": self.b,
            "passed": self.passed,
        }


def decomposition_check(matrix: CombMatrix) -> DecompositionReport:
    """Residuals of the biorthogonal decomposition behind the certificate.

    Rows are numbered from 1 as X_1..X_n; H_1 = span{X_2..X_n} and
    H_{1,k} drops X_k as well. Y_k = P_1 (M^{-1} e_k) for k >= 2.
    """
    _require_invertible(matrix)
    n = matrix.n
    if n < 2:
        raise ParameterError("decomposition needs n >= 2")
    rows = matrix.dense
    inverse = scipy.linalg.inv(rows)
    basis = orthonormal_basis(rows[1:], n)
    # columns 2..n of M^{-1}, projected onto H_1; row j of Y is Y_{j+2}
    Y = (basis @ (basis.T @ inverse[:, 1:])).T

    a: list[float] = []
    b: list[float] = []
    dual_norm = 0.0
    for offset in range(n - 1):
        k = offset + 2
        others = np.delete(rows, [0, k - 1], axis=0)
        if orthonormal_basis(others, n).shape[1] != n - 2:
            raise RankError(f"span of rows other than 1 and {k} is degenerate", k=k)
        b_k = dist_to_span(rows[k - 1], others)
        y_norm = float(np.linalg.norm(Y[offset]))
        b.append(b_k)
        a.append(abs(float(rows[0] @ Y[offset])) / y_norm)
        dual_norm = max(dual_norm, abs(y_norm * b_k - 1.0))

    gram = rows[1:] @ Y.T
    biorthogonality = float(np.abs(gram - np.eye(n - 1)).max())

    _, x, _ = project_onto_span(rows[0], rows[1:])
    image = scipy.linalg.solve(rows.T, x)
    lhs = float(image @ image)
    rhs = 1.0 + float(np.sum((Y @ rows[0]) ** 2))
    image_identity = abs(lhs - rhs) / max(1.0, abs(rhs))
    return DecompositionReport(
        biorthogonality=biorthogonality,
        dual_norm=dual_norm,
        image_identity=image_identity,
        a=a,
        b=b,
    )
