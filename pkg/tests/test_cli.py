from __future__ import annotations

import json

import pytest

from combilab.cli import STUDY_COMMANDS, main, parse_args


def _tiny_config(tmp_path, **extra):
    document = {
        "grid": [
            {"n": 2, "d_rule": "fixed", "k": 1},
            {"n": 3, "d_rule": "fixed", "k": 1},
        ],
        "trials": 10,
        "exact": True,
        "output": {"out_dir": str(tmp_path / "out")},
        **extra,
    }
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(document), encoding="utf-8")
    return path


def test_sample_prints_a_matrix(capsys):
    assert main(["sample", "--n", "5", "--d", "2", "--seed", "3"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert len(lines) == 5
    assert all(len(line) == 5 and line.count("1") == 2 for line in lines)


def test_spectrum_reports_json(capsys):
    assert main(["spectrum", "--n", "6", "--d", "3", "--method", "svd"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["spectrum"]["method"] == "svd"
    assert payload["spectrum"]["s1"] == pytest.approx(3.0, rel=0.5)


def test_clcd_hand_vector(capsys):
    argv = ["clcd", "--vector", "0,1", "--gamma", "0.1", "--alpha", "10"]
    assert main(argv + ["--theta-max-factor", "2.83"]) == 0
    estimate = json.loads(capsys.readouterr().out)
    assert estimate["n"] == 2
    assert estimate["lower"] <= 10 / 11 <= estimate["upper"]


def test_clcd_vector_file_emits_one_line_per_vector(tmp_path, capsys):
    path = tmp_path / "vectors.txt"
    path.write_text("0 1\n\n1 1 1\n", encoding="utf-8")
    argv = ["clcd", "--vector-file", str(path), "--gamma", "0.1", "--alpha", "10"]
    assert main(argv + ["--theta-max", "4", "--step", "0.001"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert len(lines) == 2
    hand, constant = (json.loads(line) for line in lines)
    assert hand["lower"] <= 10 / 11 <= hand["upper"]
    assert hand["resolution"] == pytest.approx(0.001)
    assert constant["n"] == 3
    assert constant["lower"] == constant["upper"] == "inf"


def test_clcd_vector_file_with_bad_line_exits_with_parameter_code(tmp_path, capsys):
    path = tmp_path / "vectors.txt"
    path.write_text("0 1\n0 one\n", encoding="utf-8")
    assert main(["clcd", "--vector-file", str(path), "--gamma", "0.1"]) == 2
    assert capsys.readouterr().out == ""


def test_moments_check_exit_code(capsys):
    assert main(["moments-check", "--n", "3", "--d", "2", "--exact"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["relation"] == "upper_bound"
    assert report["exact"] is True
    assert report["passed"] is True


def test_moments_check_monte_carlo(capsys):
    argv = ["moments-check", "--n", "3", "--d", "2", "--mc", "2000", "--seed", "4"]
    assert main(argv) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["exact"] is False
    with pytest.raises(SystemExit):
        parse_args(["moments-check", "--n", "3", "--d", "2", "--exact", "--mc", "5"])


def test_bad_config_exits_with_parameter_code(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"grid": []}', encoding="utf-8")
    assert main(["scaling-study", "--config", str(path)]) == 2


def test_undecodable_config_exits_with_parameter_code(tmp_path):
    path = tmp_path / "bad.json"
    path.write_bytes(b'{"seed": 1, "\xff": 2}')
    assert main(["scaling-study", "--config", str(path)]) == 2


def test_exact_budget_overrun_exits_with_capacity_code(tmp_path):
    path = _tiny_config(tmp_path, grid=[{"n": 8, "d_rule": "fixed", "k": 4}])
    assert main(["singularity-study", "--config", str(path)]) == 3


def test_study_writes_artifacts(tmp_path):
    path = _tiny_config(tmp_path)
    assert main(["singularity-study", "--config", str(path)]) == 0
    out = tmp_path / "out"
    assert (out / "singularity.csv").exists()
    document = json.loads((out / "singularity.json").read_text(encoding="utf-8"))
    rates = [row["mean"] for row in document["rows"] if row["stat"] == "singular_rate"]
    assert rates == pytest.approx([0.5, 7 / 9])


def test_every_study_has_a_command():
    assert set(STUDY_COMMANDS.values()) == {
        "scaling",
        "tail",
        "condition",
        "opnorm",
        "singularity",
        "cons",
        "certificate",
        "sparse",
    }
    args = parse_args(["tail-study", "--preset", "tiny_exact", "--trials", "5"])
    assert args.trials == 5
    with pytest.raises(SystemExit):
        parse_args(["tail-study", "--preset", "missing"])
