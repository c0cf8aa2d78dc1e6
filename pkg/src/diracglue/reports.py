"""Machine-readable reports: one JSON object or one CSV table per check.

JSON reports follow the schema ``{check, paper_ref, params, pass, margin,
rows}``.  Non-finite numbers are written as ``null`` so the output stays
valid JSON.  CSV tables always have a header row and write floats as
``%.17e``.  Nothing time- or host-dependent is written, so identical
inputs give byte-identical files.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

__all__ = ["Report", "clean", "format_value", "write_csv", "csv_text"]


def clean(x):
    """Convert numpy scalars and containers to JSON-ready Python objects."""
    if isinstance(x, dict):
        return {str(k): clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [clean(v) for v in x]
    if isinstance(x, np.ndarray):
        return [clean(v) for v in x.tolist()]
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else None
    return x


def format_value(x) -> str:
    """CSV cell: floats in full precision scientific notation."""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return "%.17e" % float(x)
    if x is None:
        return ""
    return str(x)


def csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([format_value(v) for v in r])
    return buf.getvalue()


def write_csv(path, header, rows) -> Path:
    path = Path(path)
    path.write_text(csv_text(header, rows))
    return path


@dataclass
class Report:
    """Outcome of one check.

    Attributes:
        check: subcommand / check name.
        paper_ref: the inequality or statement being checked.
        params: fully resolved parameters.
        passed: overall verdict.
        margin: smallest slack over all rows (positive when every row holds).
        rows: list of flat dicts with identical keys.
        status: ``ok``, ``fail`` or ``hypothesis``; selects the exit code.
    """

    check: str
    paper_ref: str
    params: dict
    passed: bool
    margin: float
    rows: list = field(default_factory=list)
    status: str = ""

    def __post_init__(self):
        if not self.status:
            self.status = "ok" if self.passed else "fail"

    def to_dict(self) -> dict:
        return {"check": self.check, "paper_ref": self.paper_ref,
                "params": clean(self.params), "pass": bool(self.passed),
                "margin": clean(float(self.margin)), "rows": clean(self.rows)}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, allow_nan=False) + "\n"

    def header(self) -> list[str]:
        keys: list[str] = []
        for r in self.rows:
            for k in r:
                if k not in keys:
                    keys.append(k)
        return keys

    def to_csv(self) -> str:
        keys = self.header()
        return csv_text(keys, [[r.get(k) for k in keys] for r in self.rows])

    def write(self, out_dir, fmt: str = "json") -> Path:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        if fmt == "json":
            path = out / f"{self.check}.json"
            path.write_text(self.to_json())
        elif fmt == "csv":
            path = out / f"{self.check}.csv"
            path.write_text(self.to_csv())
        else:
            raise ValueError("format must be 'json' or 'csv'")
        return path

    @property
    def exit_code(self) -> int:
        return {"ok": 0, "fail": 1, "hypothesis": 3}[self.status]
