"""Dense linear algebra on combinatorial matrices."""

from .certificate import (
    DecompositionReport,
    UpperBoundCertificate,
    decomposition_check,
    ratio_bound,
    witness_certificate,
)
from .modular import is_singular_exact, rank_mod_p
from .spectrum import (
    SpectralSummary,
    centered_opnorm,
    crosscheck_sn,
    restricted_opnorm,
    row_sum_identity_holds,
    spectrum,
)
from .subspace import (
    BiorthPair,
    biorthogonal_duals,
    dist_to_span,
    orthonormal_basis,
    project_onto_span,
)

__all__ = [
    "BiorthPair",
    "DecompositionReport",
    "SpectralSummary",
    "UpperBoundCertificate",
    "biorthogonal_duals",
    "centered_opnorm",
    "crosscheck_sn",
    "decomposition_check",
    "dist_to_span",
    "is_singular_exact",
    "orthonormal_basis",
    "project_onto_span",
    "rank_mod_p",
    "ratio_bound",
    "restricted_opnorm",
    "row_sum_identity_holds",
    "spectrum",
    "witness_certificate",
]
