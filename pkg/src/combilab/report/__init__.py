from .builder import (
    ReportBuilder,
    emit_csv,
    emit_json,
    to_native,
    write_study_outputs,
)
from .svg import emit_svg_loglog, loglog_figure

__all__ = [
    "ReportBuilder",
    "emit_csv",
    "emit_json",
    "emit_svg_loglog",
    "loglog_figure",
    "to_native",
    "write_study_outputs",
]
