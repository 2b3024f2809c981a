"""Deterministic CSV / JSON tables with a provenance header."""
import json
import math

import numpy as np


def _cell(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))  # shortest round-trip form
    if isinstance(v, complex):
        return repr(v)
    if v is None:
        return ""
    return str(v)


def _json_value(v):
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if math.isfinite(v) else None
    if isinstance(v, complex):
        return [_json_value(v.real), _json_value(v.imag)]
    return v


class Table:
    """Column-ordered result table plus the metadata echoed into the header."""

    def __init__(self, command, columns, rows, echo, version, notes=()):
        self.command = command
        self.columns = list(columns)
        self.rows = [list(r) for r in rows]
        self.echo = list(echo)
        self.version = version
        self.notes = list(notes)
        for r in self.rows:
            if len(r) != len(self.columns):
                raise ValueError("row length does not match the column schema")

    def to_csv(self):
        head = [f"# tool: iontdvp {self.version}", f"# command: {self.command}"]
        head += [f"# config: {k}={_cell(v)}" for k, v in self.echo]
        head += [f"# note: {n}" for n in self.notes]
        head.append("# columns: " + ",".join(self.columns))
        body = [",".join(self.columns)] + [",".join(_cell(v) for v in r) for r in self.rows]
        return "\n".join(head + body) + "\n"

    def to_json(self):
        doc = {
            "tool": "iontdvp",
            "version": self.version,
            "command": self.command,
            "config": {k: _json_value(v) for k, v in self.echo},
            "notes": self.notes,
            "columns": self.columns,
            "rows": [[_json_value(v) for v in r] for r in self.rows],
        }
        return json.dumps(doc, indent=1, allow_nan=False) + "\n"

    def render(self, fmt):
        if fmt == "csv":
            return self.to_csv()
        if fmt == "json":
            return self.to_json()
        raise ValueError(f"unknown format {fmt!r}")


def read_csv(text):
    """Parse a table written by :meth:`Table.to_csv` into ``(meta, columns, rows)``."""
    meta, lines = {}, []
    for line in text.splitlines():
        if line.startswith("# "):
            key, _, val = line[2:].partition(": ")
            meta.setdefault(key, []).append(val)
        elif line:
            lines.append(line.split(","))
    return meta, lines[0], lines[1:]
