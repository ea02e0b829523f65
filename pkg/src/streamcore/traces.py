"""Trace files.

CSV: header ``time,<stream>,...``; one row per time point starting at 0 with
no gaps; an empty cell means the stream has no value at that time.

JSON lines: ``{"time": n, "values": {"stream": v, ...}}`` per time point;
streams missing from ``values`` (or ``null``) are absent.
"""

from __future__ import annotations

import csv
import io
import json
import re

from .model import INT_MAX, INT_MIN, StreamTrace

_INT_RE = re.compile(r"-?[0-9]+\Z")


class TraceFormatError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


def _cell(text: str, line: int, column: str):
    if text == "":
        return None
    if not _INT_RE.match(text):
        raise TraceFormatError(f"column '{column}': not an integer: {text!r}", line)
    value = int(text)
    if not INT_MIN <= value <= INT_MAX:
        raise TraceFormatError(f"column '{column}': {text} is out of 64-bit range", line)
    return value


def read_csv(text: str) -> StreamTrace:
    rows = list(csv.reader(io.StringIO(text, newline="")))
    if not rows:
        raise TraceFormatError("empty trace file (a header line is required)", 1)
    header = rows[0]
    if not header or header[0] != "time":
        raise TraceFormatError("first column must be 'time'", 1)
    names = header[1:]
    if len(set(names)) != len(names):
        raise TraceFormatError("duplicate column names", 1)
    for name in names:
        if not re.match(r"[a-zA-Z_][a-zA-Z0-9_]*\Z", name):
            raise TraceFormatError(f"invalid stream name {name!r}", 1)
    columns = {name: [] for name in names}
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise TraceFormatError(f"expected {len(header)} cells, found {len(row)}", lineno)
        expected_time = lineno - 2
        if row[0] != str(expected_time):
            raise TraceFormatError(f"expected time {expected_time}, found {row[0]!r}", lineno)
        for name, text in zip(names, row[1:]):
            columns[name].append(_cell(text, lineno, name))
    return StreamTrace(columns, len(rows) - 1)


def write_csv(trace: StreamTrace) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    names = list(trace.columns)
    writer.writerow(["time"] + names)
    for n in range(trace.horizon):
        writer.writerow([n] + ["" if trace[name][n] is None else trace[name][n] for name in names])
    return buf.getvalue()


def read_jsonl(text: str, streams=()) -> StreamTrace:
    """Parse JSON lines; ``streams`` are columns to include even if they never appear."""
    names = list(streams)
    records = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise TraceFormatError(f"invalid JSON: {exc.msg}", lineno) from None
        if not isinstance(obj, dict) or "time" not in obj or not isinstance(obj.get("values", {}), dict):
            raise TraceFormatError('expected {"time": n, "values": {...}}', lineno)
        if obj["time"] != len(records) or isinstance(obj["time"], bool):
            raise TraceFormatError(f"expected time {len(records)}, found {obj['time']!r}", lineno)
        values = obj.get("values", {})
        for name, v in values.items():
            if v is not None and (type(v) is not int or not INT_MIN <= v <= INT_MAX):
                raise TraceFormatError(f"'{name}': not a 64-bit integer: {v!r}", lineno)
            if name not in names:
                names.append(name)
        records.append(values)
    columns = {name: [rec.get(name) for rec in records] for name in names}
    return StreamTrace(columns, len(records))


def write_jsonl(trace: StreamTrace) -> str:
    lines = []
    for n in range(trace.horizon):
        values = {name: col[n] for name, col in trace.columns.items() if col[n] is not None}
        lines.append(json.dumps({"time": n, "values": values}, separators=(",", ":")))
    return "".join(line + "\n" for line in lines)


def read_trace(text: str, fmt: str = "csv", streams=()) -> StreamTrace:
    if fmt == "csv":
        return read_csv(text)
    if fmt == "jsonl":
        return read_jsonl(text, streams)
    raise ValueError(f"unknown trace format {fmt!r}")


def write_trace(trace: StreamTrace, fmt: str = "csv") -> str:
    if fmt == "csv":
        return write_csv(trace)
    if fmt == "jsonl":
        return write_jsonl(trace)
    raise ValueError(f"unknown trace format {fmt!r}")
