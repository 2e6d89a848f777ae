"""Report envelopes and dataset writers.

Every run is described by a :class:`RunConfig`.  Outputs are either CSV
(RFC 4180 quoting, metadata on leading ``#`` lines) or line-delimited JSON
whose first line is the envelope.  Exact rationals are written as
``"num/den"``; floats appear only under keys ending in ``_approx`` or inside
``{"approx": ..., "error": ...}`` objects.  Nothing time-dependent is written,
so equal configs give equal bytes.
"""

from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from . import __version__
from .arith import fmt_rational

TOOL = "intrinsic-lab"
FORMATS = ("text", "csv", "jsonl")


@dataclass(frozen=True)
class RunConfig:
    command: str
    params: dict = field(default_factory=dict)
    seed: int = 0
    budget: int = 0
    fmt: str = "jsonl"
    output: str | None = None
    precision: Fraction = Fraction(1, 2**64)
    workers: int = 1

    def to_json(self) -> dict:
        # output path and worker count do not change the result bytes
        return {
            "command": self.command,
            "params": jsonable(self.params),
            "seed": self.seed,
            "budget": self.budget,
            "format": self.fmt,
            "precision": fmt_rational(self.precision),
        }


def jsonable(value):
    """Recursively turn Fractions into "num/den" strings and tuples into lists."""
    if isinstance(value, Fraction):
        return fmt_rational(value)
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    return value


def approx(value: float, error=None) -> dict:
    """A float result with its error bound ("num/den") or None when only empirical."""
    return {"approx": float(value), "error": None if error is None else fmt_rational(Fraction(error))}


def decimal(x: Fraction | int | float, digits: int = 12) -> str:
    return f"{float(x):.{digits}g}"


def envelope(config: RunConfig, chart: str | None, payload: dict) -> dict:
    return {
        "record": "envelope",
        "tool": TOOL,
        "version": __version__,
        "chart": chart,
        "config": config.to_json(),
        "result": jsonable(payload),
    }


def dumps(record: dict) -> str:
    return json.dumps(record, sort_keys=True, ensure_ascii=False)


def render_jsonl(env: dict, records: Iterable[dict] = ()) -> str:
    lines = [dumps(env)] + [dumps(jsonable(r)) for r in records]
    return "\n".join(lines) + "\n"


def render_csv(env: dict, columns: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    for key in ("tool", "version", "chart", "config", "result"):
        buf.write(f"# {key}: {json.dumps(env[key], sort_keys=True, ensure_ascii=False)}\r\n")
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([fmt_rational(c) if isinstance(c, Fraction) else c for c in row])
    return buf.getvalue()


def render_text(env: dict, lines: Iterable[str] = ()) -> str:
    out = list(lines)
    if not out:
        for key, value in env["result"].items():
            out.append(f"{key}: {json.dumps(value, sort_keys=True) if isinstance(value, (dict, list)) else value}")
    return "\n".join(out) + "\n"


def write_output(text: str, path: str | None, stdout) -> None:
    """Write all of ``text`` or nothing: files are replaced atomically."""
    if path is None or path == "-":
        stdout.write(text)
        stdout.flush()
        return
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def error_record(code: int, exc: BaseException) -> str:
    rec = {"record": "error", "exit_code": code, "type": type(exc).__name__, "message": str(exc)}
    for attr in ("needed", "budget", "player", "detail"):
        if hasattr(exc, attr):
            rec[attr] = jsonable(getattr(exc, attr))
    failure = getattr(exc, "failure", None)
    if failure is not None and hasattr(failure, "to_json"):
        rec["failure"] = failure.to_json()
    return dumps(rec) + "\n"
