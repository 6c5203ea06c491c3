"""Row and matrix generation for the fixed-row-sum 0/1 model."""

from .base import CombMatrix, MatrixSource, RowVector, check_dimensions
from .enumerate import (
    EnumeratedSource,
    enumerate_matrices,
    enumerate_rows,
    matrix_count,
    row_count,
)
from .loaders import build_source, point_seed
from .random_rows import (
    SampledSource,
    rows_dot,
    sample_matrix,
    sample_row,
    sample_supports_batch,
)
from .seeds import SeedSpec, as_generator

__all__ = [
    "CombMatrix",
    "EnumeratedSource",
    "MatrixSource",
    "RowVector",
    "SampledSource",
    "SeedSpec",
    "as_generator",
    "build_source",
    "check_dimensions",
    "enumerate_matrices",
    "enumerate_rows",
    "matrix_count",
    "point_seed",
    "row_count",
    "rows_dot",
    "sample_matrix",
    "sample_row",
    "sample_supports_batch",
]
