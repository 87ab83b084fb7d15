import csv
import io
import json

import pytest

from holderlab.bounds import invert_h
from holderlab.cli import main
from holderlab.config import config


@pytest.fixture(autouse=True)
def restore_config(monkeypatch):
    monkeypatch.setattr(config, "WORKERS", config.WORKERS)
    monkeypatch.setattr(config, "CACHE_DIR", config.CACHE_DIR)


def run_json(capsys, argv):
    assert main(argv) == 0
    return json.loads(capsys.readouterr().out)


def run_csv(capsys, argv):
    assert main(argv) == 0
    return list(csv.DictReader(io.StringIO(capsys.readouterr().out)))


def test_cross_build(capsys) -> None:
    record = run_json(capsys, ["cross", "build", "--m", "3"])
    assert record["p"] == 44
    assert len(record["squares"]) == 44


def test_cross_type_census(capsys) -> None:
    argv = ["cross", "classify", "--m", "4", "--L", "16", "--counts"]
    counts = run_json(capsys, argv)
    assert counts["t1"] == 4
    assert counts["t3"] == 184


def test_cross_transition(capsys) -> None:
    argv = ["cross", "transition", "--m", "4", "--L", "16", "--alpha", "0.9"]
    record = run_json(capsys, argv)
    assert record["phase"] == "thick"
    assert record["d_star_lower"] > 0.25


def test_cross_threshold(capsys) -> None:
    record = run_json(capsys, ["cross", "threshold"])
    assert abs(record["threshold"] - 9.0) <= 1e-9


def test_cross_phi_digits_and_sections(capsys) -> None:
    record = run_json(capsys, ["cross", "phi", "--m", "2", "--x", "(2)"])
    assert record["value"] == "1"
    argv = ["cross", "phi", "--m", "3", "--sections", "0.3", "--levels", "4"]
    record = run_json(capsys, argv)
    assert record["section_counts"] == [2, 4, 8, 16]


def test_cross_audit_with_xcoord(capsys) -> None:
    argv = ["cross", "audit", "--trials", "3", "--depth", "2", "--xcoord", "0.3"]
    reports = run_json(capsys, argv)
    assert [r["passed"] for r in reports] == [True, True]


def test_cross_audit_output_is_independent_of_workers(tmp_path) -> None:
    outputs = []
    for workers in ("1", "3"):
        path = tmp_path / f"audit_{workers}.jsonl"
        argv = ["cross", "audit", "--trials", "4", "--depth", "2"]
        argv += ["--workers", workers, "--format", "jsonl", "--output", str(path)]
        assert main(argv) == 0
        outputs.append(path.read_bytes())
    assert outputs[0] == outputs[1]


def test_cross_approx(capsys) -> None:
    reports = run_json(capsys, ["cross", "approx", "--m", "2", "--n", "1"])
    assert all(r["passed"] for r in reports)


def test_bounds_invert(capsys) -> None:
    argv = ["bounds", "invert", "--kind", "upper_witness", "--alpha", "0.5"]
    record = run_json(capsys, argv)
    assert record["t"] == invert_h("upper_witness", 0.5)
    assert 0 < record["t"] < 0.5


def test_bounds_curve_csv(capsys) -> None:
    rows = run_csv(capsys, ["bounds", "curve", "--steps", "5"])
    assert len(rows) == 5
    assert "alpha" in rows[0]


def test_bounds_curve_rejects_bad_grid() -> None:
    with pytest.raises(SystemExit) as exc:
        main(["bounds", "curve", "--alpha-min", "0.5", "--alpha-max", "0.2"])
    assert exc.value.code == 2


def test_sier_scheme_histogram(capsys) -> None:
    payload = run_json(capsys, ["sier", "scheme", "--depth", "3", "--histogram"])
    assert payload[0]["total"] == 147
    assert payload[0]["matches"]


def test_sier_levelset_fronts(capsys) -> None:
    rows = run_csv(capsys, ["sier", "levelset", "--depth", "3", "--r", "0.4"])
    sizes = {int(row["n"]): int(row["front_size"]) for row in rows}
    assert sizes[0] == 1
    assert sizes[1] == 2


def test_sier_levelset_from_yaml(tmp_path, capsys) -> None:
    spec = tmp_path / "field.yaml"
    spec.write_text("kind: affine\na: 1.0\nb: 0.0\n")
    argv = ["sier", "levelset", "--fn", str(spec), "--depth", "2", "--r", "0.4"]
    rows = run_csv(capsys, argv)
    assert {int(row["n"]): int(row["front_size"]) for row in rows}[1] == 2


def test_sier_cover_suite(capsys) -> None:
    argv = ["sier", "verify", "--suite", "cover", "--trials", "200"]
    reports = run_json(capsys, argv)
    assert len(reports) == 2
    assert all(r["passed"] for r in reports)


def test_phi_eval_and_build(capsys) -> None:
    result = run_json(capsys, ["phi", "eval", "--blocks", "333"])
    assert result["interval"] == ["6/7", "7/7"]
    argv = ["phi", "build", "--kstar", "3", "--w", "1", "--alpha", "0.5"]
    cert = run_json(capsys, argv)
    assert cert["size"] == 7


def test_phi_build_reports_failed_hypothesis() -> None:
    assert main(["phi", "build", "--kstar", "3", "--w", "1", "--alpha", "0.9"]) == 1


def test_library_errors_exit_with_two() -> None:
    assert main(["cross", "build", "--m", "1"]) == 2
