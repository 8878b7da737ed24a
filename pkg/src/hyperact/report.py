"""Canonical, bit-stable report serialization."""
from __future__ import annotations

import csv
import hashlib
import io
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

import numpy as np

from . import __version__


def canonical(obj: Any) -> Any:
    """Integers and rationals become decimal strings; containers become lists and string-keyed dicts."""
    if obj is None or isinstance(obj, (bool, str)):
        return obj
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, float):
        return repr(obj)
    if isinstance(obj, dict):
        return {str(k): canonical(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [canonical(x) for x in obj]
    if hasattr(obj, "as_dict"):
        return canonical(obj.as_dict())
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj: Any) -> str:
    return json.dumps(canonical(obj), sort_keys=True, indent=1, ensure_ascii=True) + "\n"


def fingerprint(payload: Any) -> str:
    blob = json.dumps(canonical(payload), sort_keys=True, separators=(",", ":"), ensure_ascii=True)
    return hashlib.sha256(blob.encode()).hexdigest()


@dataclass
class Report:
    subcommand: str
    config: dict
    results: Any
    rows: list | None = None             # tabular view for csv output
    columns: list[str] = field(default_factory=list)
    timing: float | None = None

    def as_dict(self) -> dict:
        out = {"tool": "hyperact", "version": __version__, "subcommand": self.subcommand,
               "config": self.config, "results": self.results,
               "fingerprint": fingerprint({"config": self.config, "results": self.results})}
        if self.timing is not None:
            out["timing_seconds"] = f"{self.timing:.3f}"
        return out

    def render(self, fmt: str) -> str:
        if fmt == "json":
            return dumps(self.as_dict())
        if fmt == "csv":
            if self.rows is None:
                raise ValueError(f"{self.subcommand} has no tabular output; use --format json")
            buf = io.StringIO()
            w = csv.writer(buf, lineterminator="\n")
            w.writerow(self.columns)
            for row in self.rows:
                w.writerow([canonical(x) for x in row])
            return buf.getvalue()
        raise ValueError(f"unknown format {fmt!r}")
