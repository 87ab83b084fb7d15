"""Deterministic CSV, JSON lines and JSON output."""

from __future__ import annotations

import csv
import io
import json
import logging
import os
import sys
from typing import Any, Dict, Iterable, List, Literal, Optional, Union

from pydantic import BaseModel

logger = logging.getLogger(__name__)

Format = Literal["csv", "jsonl", "json"]
Record = Union[BaseModel, Dict[str, Any]]


def as_dict(record: Record) -> Dict[str, Any]:
    if isinstance(record, BaseModel):
        return record.model_dump(mode="json")
    return dict(record)


def format_cell(value: Any) -> str:
    """CSV cell text; floats keep 17 significant digits."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.17g}"
    if isinstance(value, (list, dict)):
        return json.dumps(value, separators=(",", ":"))
    return str(value)


def to_csv(records: Iterable[Record]) -> str:
    rows = [as_dict(r) for r in records]
    buf = io.StringIO()
    if not rows:
        return ""
    writer = csv.writer(buf, lineterminator="\n")
    header = list(rows[0].keys())
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_cell(row.get(key)) for key in header])
    return buf.getvalue()


def to_jsonl(records: Iterable[Record]) -> str:
    return "".join(json.dumps(as_dict(r)) + "\n" for r in records)


def to_json(payload: Union[Record, List[Record]]) -> str:
    if isinstance(payload, list):
        data: Any = [as_dict(r) for r in payload]
    else:
        data = as_dict(payload)
    return json.dumps(data, indent=2) + "\n"


def render(payload: Union[Record, List[Record]], fmt: Format) -> str:
    records = payload if isinstance(payload, list) else [payload]
    if fmt == "csv":
        return to_csv(records)
    if fmt == "jsonl":
        return to_jsonl(records)
    return to_json(payload)


def write_output(
    payload: Union[Record, List[Record]], fmt: Format, path: Optional[str] = None
) -> None:
    """Write to ``path`` (LF line endings) or to stdout."""
    text = render(payload, fmt)
    if path is None:
        sys.stdout.write(text)
        return
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    logger.info(f"Wrote {fmt} output to {path}")


def stream_jsonl(records: Iterable[Record], path: str) -> int:
    """Append-free streaming write of JSON lines; returns the record count."""
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    count = 0
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for record in records:
            fh.write(json.dumps(as_dict(record)) + "\n")
            count += 1
    logger.info(f"Streamed {count} records to {path}")
    return count
