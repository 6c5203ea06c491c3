"""Log-log SVG figures for study results.

The figure plots the headline statistic against n, one marker per grid point
with +-stderr whiskers, a dashed reference curve proportional to sqrt(d)/n and
the fitted power law. Every artist carries a gid (``marker-<i>``,
``whisker-<i>``, ``reference``, ``fit``) which the SVG backend writes as the id
of the enclosing group.
"""

from __future__ import annotations

import io
from typing import Optional

import matplotlib
import numpy as np
from matplotlib.axis import Axis
from matplotlib.figure import Figure
from matplotlib.ticker import LogFormatterSciNotation, LogLocator, NullFormatter

from ..errors import EmissionError
from ..experiments.results import FitResult, StudyResult

FIGSIZE = (6.4, 4.8)
MARKER_COLOR = "#d62728"
FIT_COLOR = "#1f77b4"
REFERENCE_COLOR = "#888888"
MINOR_SUBS = (2.0, 5.0)

SVG_RC = {
    "svg.fonttype": "none",
    "path.simplify": False,
}


def _fit_abscissa(result: StudyResult, n: np.ndarray, d: np.ndarray) -> np.ndarray:
    if result.reference == "sqrt_d_over_n":
        return np.sqrt(d) / n
    return n.astype(np.float64)


def _set_log_ticks(axis: Axis) -> None:
    axis.set_major_locator(LogLocator(base=10.0, subs=(1.0,)))
    axis.set_minor_locator(LogLocator(base=10.0, subs=MINOR_SUBS))
    axis.set_major_formatter(LogFormatterSciNotation(base=10.0))
    axis.set_minor_formatter(NullFormatter())


def loglog_figure(
    result: StudyResult,
    fit: Optional[FitResult] = None,
    reference_label: str = "sqrt(d)/n",
    stat: Optional[str] = None,
) -> Figure:
    """Build the log-log figure of ``stat`` (default: the headline statistic)."""
    stat = stat or result.headline
    if stat is None:
        raise EmissionError(f"{result.study} has no statistic to plot")
    frame = result.stat_frame(stat)
    frame = frame[np.isfinite(frame["mean"]) & (frame["mean"] > 0)]
    if frame.empty:
        raise EmissionError(f"no positive means for '{stat}'", stat=stat)
    frame = frame.sort_values(["n", "point"], kind="mergesort")
    n = frame["n"].to_numpy(dtype=np.float64)
    d = frame["d"].to_numpy(dtype=np.float64)
    mean = frame["mean"].to_numpy(dtype=np.float64)
    stderr = np.nan_to_num(frame["stderr"].to_numpy(dtype=np.float64))

    figure = Figure(figsize=FIGSIZE)
    ax = figure.add_subplot()
    ax.set_xscale("log")
    ax.set_yscale("log")
    _set_log_ticks(ax.xaxis)
    _set_log_ticks(ax.yaxis)

    if result.reference is not None:
        shape = np.sqrt(d) / n
        scale = float(np.exp(np.mean(np.log(mean / shape))))
        ax.plot(
            n,
            scale * shape,
            linestyle="--",
            color=REFERENCE_COLOR,
            gid="reference",
        )
        ax.annotate(
            f"dashed: proportional to {reference_label}",
            xy=(0.97, 0.95),
            xycoords="axes fraction",
            ha="right",
        )
    if fit is not None:
        fitted = np.array([fit.predict(x) for x in _fit_abscissa(result, n, d)])
        ax.plot(n, fitted, color=FIT_COLOR, gid="fit")
        ax.annotate(
            f"slope = {fit.slope:.3f}, r2 = {fit.r_squared:.3f}",
            xy=(0.03, 0.05),
            xycoords="axes fraction",
            gid="annotation",
        )

    lows = mean - stderr
    lows = np.where(lows > 0, lows, mean)
    for index, (x, value, low, error) in enumerate(zip(n, mean, lows, stderr)):
        ax.plot(
            [x, x],
            [low, value + error],
            color=MARKER_COLOR,
            linewidth=1.0,
            gid=f"whisker-{index}",
        )
        ax.plot(
            [x],
            [value],
            marker="o",
            markersize=5,
            linestyle="none",
            color=MARKER_COLOR,
            gid=f"marker-{index}",
        )

    ax.set_xlabel("n")
    ax.set_ylabel(stat)
    ax.set_title(f"{result.study}: mean {stat} +- stderr")
    return figure


def emit_svg_loglog(
    result: StudyResult,
    fit: Optional[FitResult] = None,
    reference_label: str = "sqrt(d)/n",
    stat: Optional[str] = None,
) -> str:
    """Render the log-log figure as standalone SVG text.

    Output is byte-stable for a given result: the id salt is the study seed and
    the date metadata is dropped.
    """
    salt = f"{result.study}-{result.metadata.get('seed', 0)}"
    with matplotlib.rc_context({**SVG_RC, "svg.hashsalt": salt}):
        figure = loglog_figure(result, fit, reference_label, stat)
        buffer = io.BytesIO()
        figure.savefig(buffer, format="svg", metadata={"Date": None})
    return buffer.getvalue().decode("utf-8")
