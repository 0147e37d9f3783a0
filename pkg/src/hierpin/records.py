"""Flat result records and their CSV / JSON serialisation.

Floats are written with 17 significant digits so every value round-trips
exactly. CSV uses a header row, commas and LF line endings. JSON is an array
of flat objects with the same keys.
"""

import csv
import enum
import io
import json
import math
import os
from pathlib import Path

OUTPUT_DIR_ENV = "HIERPIN_OUTPUT_DIR"


def format_value(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    if value is None:
        return ""
    if isinstance(value, enum.Enum):
        return str(value.value)
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return format(value, ".17g")
    return str(value)


def _json_value(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    if value is None:
        return "null"
    if isinstance(value, enum.Enum):
        return json.dumps(value.value)
    if isinstance(value, float):
        if not math.isfinite(value):
            # JSON has no inf/nan literal
            return json.dumps(format_value(value))
        return format(value, ".17g")
    if isinstance(value, int):
        return str(value)
    return json.dumps(str(value))


def columns_of(records):
    cols = []
    for rec in records:
        for key in rec:
            if key not in cols:
                cols.append(key)
    return cols


def csv_text(records, columns=None):
    columns = columns_of(records) if columns is None else columns
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for rec in records:
        writer.writerow([format_value(rec.get(c)) for c in columns])
    return buf.getvalue()


def json_text(records):
    if not records:
        return "[]\n"
    rows = []
    for rec in records:
        body = ", ".join(f"{json.dumps(k)}: {_json_value(v)}" for k, v in rec.items())
        rows.append("  {" + body + "}")
    return "[\n" + ",\n".join(rows) + "\n]\n"


def resolve_path(path):
    path = Path(path)
    base = os.environ.get(OUTPUT_DIR_ENV)
    if base and not path.is_absolute():
        path = Path(base) / path
    return path


def _write(text, path):
    path = resolve_path(path)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    return path


def export_csv(records, path, columns=None):
    return _write(csv_text(records, columns), path)


def export_json(records, path):
    return _write(json_text(records), path)


def parse_csv_value(text):
    """Inverse of ``format_value`` for numbers and booleans; other text is returned as is."""
    if text in ("true", "false"):
        return text == "true"
    if text == "":
        return None
    for conv in (int, float):
        try:
            return conv(text)
        except ValueError:
            pass
    return text


def read_csv(path):
    with open(path, encoding="utf-8", newline="") as fh:
        return [{k: parse_csv_value(v) for k, v in row.items()} for row in csv.DictReader(fh)]
