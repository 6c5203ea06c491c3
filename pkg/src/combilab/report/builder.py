from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Any, Dict, Optional

import numpy as np
from loguru import logger

from ..errors import EmissionError
from ..experiments.results import StudyResult
from .svg import emit_svg_loglog

CSV_COLUMNS = ["n", "d", "trials", "stat", "mean", "median", "stderr"]
FLOAT_FORMAT = "%.12g"


def to_native(value: Any) -> Any:
    """JSON-safe copy: numpy scalars unwrapped, inf as "inf", NaN as null."""
    if isinstance(value, (np.generic, np.bool_)):
        return to_native(value.item())
    if isinstance(value, dict):
        return {str(k): to_native(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_native(v) for v in value]
    if isinstance(value, float):
        if math.isnan(value):
            return None
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
    return value


def emit_csv(result: StudyResult) -> str:
    """CSV text with one row per (grid point, statistic), grid order first."""
    frame = result.table[CSV_COLUMNS]
    return frame.to_csv(
        index=False, float_format=FLOAT_FORMAT, na_rep="nan", lineterminator="\n"
    )


def emit_json(result: StudyResult) -> str:
    rows = result.table.to_dict(orient="records")
    document = {
        "study": result.study,
        "headline": result.headline,
        "reference": result.reference,
        "metadata": result.metadata,
        "fit": result.fit.to_dict() if result.fit is not None else None,
        "fit_error": result.fit_error,
        "rows": rows,
    }
    return json.dumps(to_native(document), sort_keys=True, indent=2, allow_nan=False)


class ReportBuilder:
    """Writes the CSV, JSON and SVG artifacts of one study."""

    def __init__(self, result: StudyResult) -> None:
        self.result = result

    def build_summary(self) -> Dict[str, Any]:
        result = self.result
        summary: Dict[str, Any] = {
            "study": result.study,
            "points": int(result.table["point"].nunique()),
            "stats": len(result.stats()),
        }
        if result.fit is not None:
            summary["slope"] = result.fit.slope
            summary["r_squared"] = result.fit.r_squared
        return summary

    def to_csv(self, path: str | Path) -> Path:
        return _write(path, emit_csv(self.result))

    def to_json(self, path: str | Path) -> Path:
        return _write(path, emit_json(self.result))

    def to_svg(self, path: str | Path) -> Optional[Path]:
        result = self.result
        if result.headline is None:
            logger.warning("{}: no headline statistic, skipping SVG", result.study)
            return None
        try:
            text = emit_svg_loglog(result, result.fit)
        except EmissionError as exc:
            logger.warning("{}: skipping SVG ({})", result.study, exc)
            return None
        return _write(path, text)


def _write(path: str | Path, text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
    return path


def write_study_outputs(result: StudyResult, out_dir: str | Path) -> dict[str, Path]:
    """Write ``<study>.csv``, ``<study>.json`` and, when plottable, ``<study>.svg``."""
    out_dir = Path(out_dir)
    builder = ReportBuilder(result)
    written = {
        "csv": builder.to_csv(out_dir / f"{result.study}.csv"),
        "json": builder.to_json(out_dir / f"{result.study}.json"),
    }
    svg = builder.to_svg(out_dir / f"{result.study}.svg")
    if svg is not None:
        written["svg"] = svg
    for kind, path in written.items():
        logger.info("Saved {} {} to {}", result.study, kind, path)
    return written
