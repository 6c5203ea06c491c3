from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.linalg

from ..errors import ParameterError, SingularityError

RANK_TOLERANCE = 1e-12
DUAL_CONDITION_FLOOR = 1e-10


def _as_vectors(vectors: np.ndarray | Sequence[np.ndarray], n: int) -> np.ndarray:
    array = np.asarray(vectors, dtype=np.float64)
    if array.size == 0:
        return np.zeros((0, n))
    if array.ndim == 1:
        array = array[None, :]
    if array.ndim != 2 or array.shape[1] != n:
        raise ParameterError(
            f"spanning vectors must have dimension {n}, got shape {array.shape}"
        )
    return array


def orthonormal_basis(
    vectors: np.ndarray | Sequence[np.ndarray], n: int | None = None
) -> np.ndarray:
    """Orthonormal basis (as columns) of span(vectors) from a column-pivoted QR.

    Pivots with ``|R_ii| <= 1e-12 * largest column norm`` are treated as
    dependent, so near-degenerate collections lose the offending directions.
    """
    rows = np.asarray(vectors, dtype=np.float64)
    dim = n if n is not None else rows.shape[-1]
    rows = _as_vectors(rows, dim)
    if rows.shape[0] == 0:
        return np.zeros((dim, 0))
    columns = rows.T
    largest = float(np.linalg.norm(columns, axis=0).max())
    if largest == 0.0:
        return np.zeros((dim, 0))
    q, r, _ = scipy.linalg.qr(columns, mode="economic", pivoting=True)
    diagonal = np.abs(np.diag(r))
    rank = int(np.count_nonzero(diagonal > RANK_TOLERANCE * largest))
    return q[:, :rank]


def project_onto_span(
    v: np.ndarray, vectors: np.ndarray | Sequence[np.ndarray]
) -> tuple[np.ndarray, np.ndarray, int]:
    """Return ``(projection, residual, rank)`` of ``v`` against span(vectors)."""
    vector = np.asarray(v, dtype=np.float64)
    if vector.ndim != 1:
        raise ParameterError("v must be one-dimensional")
    basis = orthonormal_basis(vectors, vector.shape[0])
    projection = basis @ (basis.T @ vector)
    return projection, vector - projection, int(basis.shape[1])


def dist_to_span(v: np.ndarray, vectors: np.ndarray | Sequence[np.ndarray]) -> float:
    """Euclidean distance from ``v`` to span(vectors); 0 when ``v`` lies in it."""
    vector = np.asarray(v, dtype=np.float64)
    _, residual, _ = project_onto_span(vector, vectors)
    distance = float(np.linalg.norm(residual))
    if distance <= RANK_TOLERANCE * max(1.0, float(np.linalg.norm(vector))):
        return 0.0
    return distance


@dataclass(frozen=True)
class BiorthPair:
    """Paired families with <E_i, F_j> = delta_ij; row k of each array is vector k."""

    E: np.ndarray
    F: np.ndarray

    def gram(self) -> np.ndarray:
        return self.E @ self.F.T

    def biorthogonality_residual(self) -> float:
        return float(np.abs(self.gram() - np.eye(self.E.shape[0])).max())

    def dual_norm_residual(self) -> float:
        """max_k | ||F_k|| * dist(E_k, span{E_i : i != k}) - 1 |."""
        count = self.E.shape[0]
        worst = 0.0
        for k in range(count):
            others = np.delete(self.E, k, axis=0)
            distance = (
                dist_to_span(self.E[k], others)
                if others.shape[0]
                else float(np.linalg.norm(self.E[k]))
            )
            worst = max(worst, abs(float(np.linalg.norm(self.F[k])) * distance - 1.0))
        return worst


def biorthogonal_duals(vectors: np.ndarray | Sequence[np.ndarray]) -> BiorthPair:
    """Dual family F of a basis E: columns of the inverse transpose of [E_1 ... E_n]."""
    E = np.asarray(vectors, dtype=np.float64)
    if E.ndim != 2 or E.shape[0] != E.shape[1]:
        raise ParameterError(f"need n vectors of dimension n, got shape {E.shape}")
    columns = E.T
    singular_values = scipy.linalg.svdvals(columns)
    if singular_values[-1] <= DUAL_CONDITION_FLOOR * singular_values[0]:
        raise SingularityError("vectors are numerically linearly dependent")
    # (A^T)^{-1} = A^{-T}; its k-th column is F_k, i.e. row k of A^{-1}
    F = scipy.linalg.inv(columns)
    return BiorthPair(E=E.copy(), F=F)
