"""Reading and writing function files.

JSON files hold ``{"breakpoints": [[x, y], ...], "phase": bool}``; CSV files
hold an ``x,y`` header and one breakpoint per row.  Floats are written with
``repr`` (shortest round-trip form), so a write/read cycle is bit-exact.
"""

from __future__ import annotations

import csv
import io
import json
import math
from typing import Union

from .plfn import PhaseFunction, PLFunction

__all__ = ["MalformedInput", "dumps_function", "loads_function", "read_function", "write_function", "format_float"]


class MalformedInput(ValueError):
    """A function file that cannot be parsed into a valid PL function."""


def format_float(v: float) -> str:
    """Shortest round-trip text, with ``inf``/``-inf``/``nan`` sentinels."""
    if math.isnan(v):
        return "nan"
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return repr(float(v))


def _build(points, phase: bool):
    try:
        pts = [(float(p[0]), float(p[1])) for p in points]
        f = PLFunction.from_points(pts)
        return PhaseFunction(f) if phase else f
    except (TypeError, ValueError, IndexError) as exc:
        raise MalformedInput(str(exc)) from exc


def dumps_function(f: Union[PLFunction, PhaseFunction], fmt: str = "json") -> str:
    phase = isinstance(f, PhaseFunction)
    base = f.base if phase else f
    if fmt == "json":
        pts = ", ".join(f"[{format_float(x)}, {format_float(y)}]" for x, y in base.points)
        return f'{{"breakpoints": [{pts}], "phase": {"true" if phase else "false"}}}\n'
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["x", "y"])
        for x, y in base.points:
            w.writerow([format_float(x), format_float(y)])
        return buf.getvalue()
    raise ValueError(f"unknown format {fmt!r}")


def loads_function(text: str, fmt: str = "json", phase=None):
    """Parse a function; ``phase`` overrides the file's own flag when given."""
    if fmt == "json":
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise MalformedInput(f"invalid JSON: {exc}") from exc
        if not isinstance(obj, dict) or "breakpoints" not in obj:
            raise MalformedInput("expected an object with a 'breakpoints' list")
        unknown = set(obj) - {"breakpoints", "phase"}
        if unknown:
            raise MalformedInput(f"unknown fields: {sorted(unknown)}")
        is_phase = bool(obj.get("phase", False)) if phase is None else phase
        return _build(obj["breakpoints"], is_phase)
    if fmt == "csv":
        rows = list(csv.reader(io.StringIO(text)))
        if not rows or [c.strip().lower() for c in rows[0]] != ["x", "y"]:
            raise MalformedInput("CSV must start with an 'x,y' header")
        body = [r for r in rows[1:] if r]
        if any(len(r) != 2 for r in body):
            raise MalformedInput("every CSV row needs exactly two columns")
        return _build(body, bool(phase))
    raise ValueError(f"unknown format {fmt!r}")


def _fmt_for(path: str) -> str:
    return "csv" if path.lower().endswith(".csv") else "json"


def read_function(path: str, phase=None):
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise MalformedInput(f"cannot read {path}: {exc}") from exc
    return loads_function(text, _fmt_for(path), phase)


def write_function(f, path: str) -> None:
    with open(path, "w") as fh:
        fh.write(dumps_function(f, _fmt_for(path)))
