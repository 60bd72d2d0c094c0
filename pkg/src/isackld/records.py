"""Tabular experiment records and their CSV/JSON serialization.

One record is one sweep sample. Columns are stable; fields a given command
does not produce are left empty in CSV and null in JSON. Floats are written
with full repr precision so reruns are byte-identical.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, fields

CSV_COLUMNS = [
    "source", "eta1", "eta2", "kld_c_bits", "kld_r_nats",
    "sensing_objective", "comm_objective", "correlation_r",
    "ber", "ser", "pd", "pfa_empirical", "n_trials", "seed",
]


@dataclass
class TradeoffRecord:
    """One Pareto-sweep sample: weights, KLD pair, link/detection rates."""

    source: str = ""
    eta1: float | None = None
    eta2: float | None = None
    kld_c_bits: float | None = None
    kld_r_nats: float | None = None
    sensing_objective: float | None = None
    comm_objective: float | None = None
    correlation_r: float | None = None
    ber: float | None = None
    ser: float | None = None
    pd: float | None = None
    pfa_empirical: float | None = None
    n_trials: int | None = None
    seed: int | None = None

    def __post_init__(self):
        for name in ("ber", "ser", "pd"):
            val = getattr(self, name)
            if val is not None and not 0.0 <= val <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1]")
        for name in ("kld_c_bits", "kld_r_nats"):
            val = getattr(self, name)
            if val is not None and val < -1e-12:
                raise ValueError(f"{name} must be nonnegative")

    def to_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(float(value))
    return str(value)


def write_records_csv(records, path) -> None:
    """Write records as UTF-8 CSV with LF line endings and stable columns."""
    with open(path, "w", newline="\n", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for rec in records:
            d = rec.to_dict()
            writer.writerow([_cell(d[c]) for c in CSV_COLUMNS])


def write_records_json(records, path) -> None:
    """Write records as a JSON array of objects."""
    with open(path, "w", newline="\n", encoding="utf-8") as f:
        json.dump([rec.to_dict() for rec in records], f, indent=2)
        f.write("\n")


def write_records(records, path, fmt: str) -> None:
    if fmt == "csv":
        write_records_csv(records, path)
    elif fmt == "json":
        write_records_json(records, path)
    else:
        raise ValueError(f"unknown output format: {fmt!r}")
