from __future__ import annotations

import json

from combilab.config import load_preset
from combilab.research import CheckResult, VerificationReport


def test_small_scale_suite_passes(tmp_path):
    report = VerificationReport(load_preset("tiny_exact"), scale=0.01)
    result = report.run()
    assert result["passed"] is True
    for block in (
        "certificate",
        "decomposition",
        "slice_concentration",
        "averaging_inequality",
        "chebyshev_tails",
        "small_ball",
        "clcd",
        "dual_norms",
        "singularity",
        "moments",
    ):
        assert block in result
    assert result["singularity"]["n3_d2"]["primary"] == 7 / 9
    assert result["moments"]["x_n3_d2"]["note"] == "upper_bound"
    assert result["clcd"]["difference_norm_n16"]["passed"] is True

    path = report.write(tmp_path / "verification.json")
    written = json.loads(path.read_text(encoding="utf-8"))
    assert written["passed"] is True
    assert written["metadata"]["scale"] == 0.01


def test_check_result_serializes_infinity():
    payload = CheckResult(float("inf"), None, 0.0, float("nan"), True).to_dict()
    assert payload["primary"] == "inf"
    assert payload["difference"] is None
    assert payload["passed"] is True
