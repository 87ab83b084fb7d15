import json

from holderlab.export import format_cell, render, stream_jsonl, to_csv, write_output
from holderlab.models import AuditReport


def test_cells_are_deterministic() -> None:
    assert format_cell(0.1) == "0.10000000000000001"
    assert format_cell(True) == "true"
    assert format_cell(None) == ""
    assert format_cell([1, 2]) == "[1,2]"


def test_csv_header_follows_first_record() -> None:
    assert to_csv([{"a": 1, "b": 0.5}, {"a": 2, "b": None}]) == "a,b\n1,0.5\n2,\n"
    assert to_csv([]) == ""


def test_models_render_as_json_lines() -> None:
    report = AuditReport(name="cover", passed=True, checked=3, violations=0)
    line = render(report, "jsonl")
    assert line.count("\n") == 1
    assert json.loads(line)["name"] == "cover"


def test_write_output_uses_lf(tmp_path) -> None:
    path = tmp_path / "out" / "rows.csv"
    write_output([{"x": 1}, {"x": 2}], "csv", str(path))
    data = path.read_bytes()
    assert data == b"x\n1\n2\n"


def test_write_output_to_stdout(capsys) -> None:
    write_output({"x": 1}, "json")
    assert json.loads(capsys.readouterr().out) == {"x": 1}


def test_stream_jsonl_counts_records(tmp_path) -> None:
    path = tmp_path / "rows.jsonl"
    count = stream_jsonl(({"k": k} for k in range(5)), str(path))
    assert count == 5
    lines = path.read_text().splitlines()
    assert [json.loads(line)["k"] for line in lines] == list(range(5))
