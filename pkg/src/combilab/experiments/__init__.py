from .engine import THREADS_ENV, TrialEngine, resolve_workers
from .metrics import fit_loglog, rate, summarize
from .results import TABLE_COLUMNS, FitResult, StudyResult, TableBuilder
from .studies import (
    STUDIES,
    PointRun,
    run_certificate_study,
    run_condition_study,
    run_cons_invertibility_study,
    run_opnorm_study,
    run_scaling_study,
    run_singularity_study,
    run_sparse_study,
    run_tail_study,
    sparse_regime,
    sqrt_d_over_n,
    tail_thresholds,
)

__all__ = [
    "STUDIES",
    "TABLE_COLUMNS",
    "THREADS_ENV",
    "FitResult",
    "PointRun",
    "StudyResult",
    "TableBuilder",
    "TrialEngine",
    "fit_loglog",
    "rate",
    "resolve_workers",
    "run_certificate_study",
    "run_condition_study",
    "run_cons_invertibility_study",
    "run_opnorm_study",
    "run_scaling_study",
    "run_singularity_study",
    "run_sparse_study",
    "run_tail_study",
    "sparse_regime",
    "sqrt_d_over_n",
    "summarize",
    "tail_thresholds",
]
