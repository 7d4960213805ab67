"""Log and metrics serialization.

JSONL: one LogRecord object per line, keys in a fixed order, floats in
shortest round-trip form, so identical runs produce byte-identical files.
CSV: vector fields flattened with fixed suffixes; the column order is
frozen and documented in the README.
"""

from __future__ import annotations

import csv
import json
from dataclasses import asdict
from pathlib import Path

from .loop import FIELD_ORDER, LogRecord

VECTOR_SUFFIXES = {
    "f_c": ("fx", "fz", "my", "mz"),
    "e_f": ("fx", "fz", "my", "mz"),
    "offset": ("x", "z", "theta", "psi"),
    "x_r": ("x", "z", "theta", "psi"),
    "x_a": ("x", "z", "theta", "psi"),
    "q_ref": ("1", "2", "3", "4"),
    "q_cmd": ("1", "2", "3", "4"),
    "q_meas": ("1", "2", "3", "4"),
    "x_meas": ("x", "z", "theta", "psi"),
    "x_true": ("x", "z", "theta", "psi"),
    "delta_steps": ("1", "2", "3", "4"),
    "u": ("1", "2", "3", "4"),
}


def record_to_dict(record: LogRecord) -> dict:
    data = asdict(record)
    return {key: data[key] for key in FIELD_ORDER}


def write_jsonl(records, path: str | Path):
    path = Path(path)
    with path.open("w") as fh:
        for rec in records:
            fh.write(json.dumps(record_to_dict(rec)) + "\n")


def read_jsonl(path: str | Path) -> list[LogRecord]:
    records = []
    with Path(path).open() as fh:
        for line in fh:
            line = line.strip()
            if line:
                records.append(LogRecord(**json.loads(line)))
    return records


def csv_columns() -> list[str]:
    columns = []
    for field in FIELD_ORDER:
        if field in VECTOR_SUFFIXES:
            columns.extend(f"{field}_{s}" for s in VECTOR_SUFFIXES[field])
        else:
            columns.append(field)
    return columns


def write_csv(records, path: str | Path):
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(csv_columns())
        for rec in records:
            data = record_to_dict(rec)
            row = []
            for field in FIELD_ORDER:
                value = data[field]
                if field in VECTOR_SUFFIXES:
                    row.extend("" if v is None else repr(v) for v in value)
                elif field == "events":
                    row.append(";".join(value))
                elif isinstance(value, float):
                    row.append(repr(value))
                else:
                    row.append(value)
            writer.writerow(row)


def write_metrics(report: dict, path: str | Path):
    Path(path).write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")
