"""Comparison reports: the cross-validation artifact written by the CLI.

CSV files use '.' decimals, LF line endings, a mandatory header row, and
repr-formatted floats (shortest string that parses back to the same
double), so parsing an emitted file reproduces the in-memory report
exactly.  JSON carries the same full-precision convention.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

from .errors import DomainError

METHODS = ("quadrature", "sum", "montecarlo", "asymptotic")


@dataclass(frozen=True)
class ReportRow:
    quantity: str
    method: str
    value: float
    err_est: float

    def __post_init__(self):
        if self.method not in METHODS:
            raise DomainError(f"method must be one of {METHODS}, got {self.method}")
        if not self.err_est >= 0.0:
            raise DomainError("err_est must be >= 0")


@dataclass
class ComparisonReport:
    rows: list
    config: dict = field(default_factory=dict)
    seed: int | None = None
    wall_time_s: float = 0.0

    def add(self, quantity, method, value, err_est=0.0):
        self.rows.append(ReportRow(quantity, method, float(value), float(err_est)))

    def to_csv_text(self) -> str:
        lines = ["# config: " + json.dumps(self.config, sort_keys=True),
                 f"# seed: {self.seed}",
                 f"# wall_time_s: {self.wall_time_s!r}",
                 "quantity,method,value,err_est"]
        for r in self.rows:
            lines.append(f"{r.quantity},{r.method},{r.value!r},{r.err_est!r}")
        return "\n".join(lines) + "\n"

    def to_json_text(self) -> str:
        payload = {
            "config": self.config,
            "seed": self.seed,
            "wall_time_s": repr(self.wall_time_s),
            "rows": [{"quantity": r.quantity, "method": r.method,
                      "value": repr(r.value), "err_est": repr(r.err_est)}
                     for r in self.rows],
        }
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"

    def write(self, path, fmt: str) -> None:
        text = self.to_csv_text() if fmt == "csv" else self.to_json_text()
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)

    @classmethod
    def from_csv_text(cls, text: str) -> "ComparisonReport":
        config = {}
        seed = None
        wall = 0.0
        rows = []
        header_seen = False
        for line in text.splitlines():
            if not line:
                continue
            if line.startswith("# config: "):
                config = json.loads(line[len("# config: "):])
            elif line.startswith("# seed: "):
                raw = line[len("# seed: "):]
                seed = None if raw == "None" else int(raw)
            elif line.startswith("# wall_time_s: "):
                wall = float(line[len("# wall_time_s: "):])
            elif not header_seen:
                if line != "quantity,method,value,err_est":
                    raise DomainError(f"unexpected CSV header: {line!r}")
                header_seen = True
            else:
                quantity, method, value, err = line.split(",")
                rows.append(ReportRow(quantity, method, float(value), float(err)))
        return cls(rows=rows, config=config, seed=seed, wall_time_s=wall)

    @classmethod
    def from_json_text(cls, text: str) -> "ComparisonReport":
        payload = json.loads(text)
        rows = [ReportRow(r["quantity"], r["method"], float(r["value"]),
                          float(r["err_est"])) for r in payload["rows"]]
        return cls(rows=rows, config=payload["config"], seed=payload["seed"],
                   wall_time_s=float(payload["wall_time_s"]))
