"""CSV and JSON output of sweep rows, plus the matching readers."""

from __future__ import annotations

import csv
import io
import json
import math
import os
import tempfile

VECTOR_SEP = ";"


class ExportError(OSError):
    """The output file could not be written."""


def format_float(x: float) -> str:
    """17 significant digits: enough to round-trip any double exactly."""
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return "%.17g" % x


def format_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return format_float(value)
    if isinstance(value, (list, tuple)):
        return VECTOR_SEP.join(format_cell(v) for v in value)
    return str(value)


def _columns(rows, columns):
    if columns is not None:
        return list(columns)
    cols: list[str] = []
    for row in rows:
        for key in row:
            if key not in cols:
                cols.append(key)
    if "error" in cols:
        cols.remove("error")
        cols.append("error")
    return cols


def to_csv(rows, columns=None) -> str:
    cols = _columns(rows, columns)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(cols)
    for row in rows:
        writer.writerow([format_cell(row.get(c)) for c in cols])
    return buf.getvalue()


def to_json(rows, columns=None) -> str:
    # numbers are written through format_cell so JSON and CSV carry the same digits
    cols = _columns(rows, columns)
    parts = []
    for row in rows:
        fields = []
        for c in cols:
            v = row.get(c)
            if v is None:
                text = "null"
            elif isinstance(v, bool):
                text = json.dumps(v)
            elif isinstance(v, (int, float)) and math.isfinite(v):
                text = format_cell(v)
            elif isinstance(v, float):
                text = json.dumps(format_float(v))
            else:
                text = json.dumps(format_cell(v), ensure_ascii=False)
            fields.append(f"{json.dumps(c)}: {text}")
        parts.append("  {" + ", ".join(fields) + "}")
    return "[\n" + ",\n".join(parts) + "\n]\n" if parts else "[]\n"


def export(rows, fmt: str, path, columns=None) -> None:
    """Write ``rows`` to ``path`` as ``csv`` or ``json`` (UTF-8, LF line endings).

    The file is written to a temporary sibling and moved into place, so a
    failure never leaves a partial file behind.
    """
    rows = list(rows)
    if not rows:
        raise ValueError("nothing to export: no rows")
    if fmt == "csv":
        text = to_csv(rows, columns)
    elif fmt == "json":
        text = to_json(rows, columns)
    else:
        raise ValueError(f"unknown format {fmt!r} (choose csv or json)")
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    tmp = None
    try:
        fd, tmp = tempfile.mkstemp(prefix=".partial-", dir=directory)
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        # mkstemp creates 0600 files; give the result the usual umask-based mode
        umask = os.umask(0)
        os.umask(umask)
        os.chmod(tmp, 0o666 & ~umask)
        os.replace(tmp, path)
        tmp = None
    except OSError as exc:
        raise ExportError(exc.errno, f"cannot write {path}: {exc.strerror or exc}") from exc
    finally:
        if tmp is not None and os.path.exists(tmp):
            os.remove(tmp)


def _parse_cell(text: str):
    if text == "":
        return None
    if VECTOR_SEP in text:
        items = [_parse_cell(t) for t in text.split(VECTOR_SEP)]
        if all(isinstance(i, (int, float)) for i in items):
            return [float(i) for i in items]
        return text
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return text


def read_csv(path) -> list[dict]:
    """Rows written by :func:`export` as CSV, with numbers parsed back."""
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        return [{k: ("" if k == "error" and v == "" else _parse_cell(v)) for k, v in row.items()}
                for row in reader]


def read_json(path) -> list[dict]:
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    out = []
    for row in data:
        out.append({k: (_parse_cell(v) if isinstance(v, str) and k != "error" else v)
                    for k, v in row.items()})
    return out


def read(path, fmt: str | None = None) -> list[dict]:
    fmt = fmt or os.path.splitext(os.fspath(path))[1].lstrip(".").lower()
    if fmt == "csv":
        return read_csv(path)
    if fmt == "json":
        return read_json(path)
    raise ValueError(f"unknown format {fmt!r}")
