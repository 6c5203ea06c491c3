from __future__ import annotations

import json
import math
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from combilab.errors import EmissionError
from combilab.experiments import StudyResult, TableBuilder, fit_loglog
from combilab.report import (
    ReportBuilder,
    emit_csv,
    emit_json,
    emit_svg_loglog,
    loglog_figure,
    to_native,
    write_study_outputs,
)

SVG = "{http://www.w3.org/2000/svg}"
NS = (16, 32, 64, 128)
D = 4


def _result(scale: float = 3.0) -> StudyResult:
    builder = TableBuilder()
    points = []
    for index, n in enumerate(NS):
        mean = scale * math.sqrt(D) / n
        builder.add(index, n, n, D, 100, "sn", mean, mean, 0.1 * mean)
        builder.add(index, n, n, D, 100, "kappa", math.inf, math.inf, math.nan)
        points.append((math.sqrt(D) / n, mean))
    fit = fit_loglog(points) if scale > 0 else None
    return StudyResult(
        study="scaling",
        table=builder.frame(),
        metadata={"seed": 0, "trials": 100},
        fit=fit,
        headline="sn",
        reference="sqrt_d_over_n",
    )


def _parse(text: str) -> ET.Element:
    return ET.fromstring(text.encode("utf-8"))


def _group(root: ET.Element, gid: str) -> ET.Element:
    return next(node for node in root.iter(f"{SVG}g") if node.get("id") == gid)


def _groups(root: ET.Element, prefix: str) -> list[ET.Element]:
    return [
        node
        for node in root.iter(f"{SVG}g")
        if (node.get("id") or "").startswith(prefix)
    ]


def _marker_xy(group: ET.Element) -> tuple[float, float]:
    use = next(group.iter(f"{SVG}use"))
    return float(use.get("x")), float(use.get("y"))


def _path_vertices(group: ET.Element) -> list[tuple[float, float]]:
    tokens = next(group.iter(f"{SVG}path")).get("d").split()
    numbers = [float(token) for token in tokens if token not in {"M", "L"}]
    return list(zip(numbers[0::2], numbers[1::2]))


def test_csv_has_header_and_one_row_per_point_and_stat():
    lines = emit_csv(_result()).splitlines()
    assert lines[0] == "n,d,trials,stat,mean,median,stderr"
    assert len(lines) == 1 + 2 * len(NS)
    assert lines[1].startswith("16,4,100,kappa,inf,inf,nan")
    assert lines[2].startswith("16,4,100,sn,0.375,0.375,")


def test_json_encodes_infinity_and_fit():
    document = json.loads(emit_json(_result()))
    assert document["study"] == "scaling"
    assert document["fit"]["slope"] == pytest.approx(1.0)
    kappa = [row for row in document["rows"] if row["stat"] == "kappa"]
    assert kappa[0]["mean"] == "inf"
    assert kappa[0]["stderr"] is None


def test_svg_structure():
    text = emit_svg_loglog(_result(), _result().fit)
    assert text.startswith("<?xml")
    root = _parse(text)
    assert root.tag == f"{SVG}svg"
    assert len(_groups(root, "marker-")) == len(NS)
    assert len(_groups(root, "whisker-")) == len(NS)
    lines = [node.get("id") for node in root.iter(f"{SVG}g")]
    assert lines.count("reference") == 1
    assert lines.count("fit") == 1
    assert "slope = 1.000" in text
    assert "xlink:href=\"http" not in text


def test_svg_is_byte_stable():
    first = emit_svg_loglog(_result(), _result().fit)
    assert emit_svg_loglog(_result(), _result().fit) == first


def test_reference_curve_passes_through_exact_markers():
    root = _parse(emit_svg_loglog(_result(), _result().fit))
    reference = _path_vertices(_group(root, "reference"))
    markers = [_marker_xy(group) for group in _groups(root, "marker-")]
    assert len(reference) == len(markers)
    for (x, y), (cx, cy) in zip(reference, markers):
        assert abs(x - cx) <= 0.5
        assert abs(y - cy) <= 0.5


def test_markers_follow_grid_order():
    root = _parse(emit_svg_loglog(_result()))
    points = [_marker_xy(group) for group in _groups(root, "marker-")]
    xs = [x for x, _ in points]
    heights = [y for _, y in points]
    assert xs == sorted(xs)
    # s_n falls with n, so screen y grows left to right
    assert heights == sorted(heights)
    ids = [node.get("id") for node in root.iter(f"{SVG}g")]
    assert "fit" not in ids
    assert "reference" in ids


def test_svg_without_positive_values_raises():
    result = _result(scale=0.0)
    with pytest.raises(EmissionError) as info:
        emit_svg_loglog(result)
    assert info.value.stat == "sn"
    assert ReportBuilder(result).to_svg("unused.svg") is None


def test_figure_uses_log_axes():
    figure = loglog_figure(_result(), _result().fit)
    (ax,) = figure.axes
    assert ax.get_xscale() == "log"
    assert ax.get_yscale() == "log"
    gids = [line.get_gid() for line in ax.get_lines()]
    assert gids[:2] == ["reference", "fit"]
    assert gids.count("marker-3") == 1


def test_write_study_outputs(tmp_path):
    written = write_study_outputs(_result(), tmp_path / "out")
    assert set(written) == {"csv", "json", "svg"}
    for path in written.values():
        assert path.exists()
    summary = ReportBuilder(_result()).build_summary()
    assert summary == {
        "study": "scaling",
        "points": 4,
        "stats": 2,
        "slope": pytest.approx(1.0),
        "r_squared": pytest.approx(1.0),
    }


def test_to_native_unwraps_numpy_and_encodes_non_finite_values():
    value = {
        "rate": np.float64(0.25),
        "count": np.int64(3),
        "ok": np.bool_(True),
        "bounds": (np.inf, -np.inf, float("nan")),
        7: [np.float32(0.5)],
    }
    assert to_native(value) == {
        "rate": 0.25,
        "count": 3,
        "ok": True,
        "bounds": ["inf", "-inf", None],
        "7": [0.5],
    }
    json.dumps(to_native(value), allow_nan=False)
