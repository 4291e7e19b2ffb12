"""Plot job description and CSV schema validation.

plotkit consumes only the CSV files the dualgraph CLI emits; it never
recomputes statistics.  The four plot kinds and the columns they require:

* ``st_scatter``   — ln(spanning tree count) vs vertex count; needs n, ln_st.
* ``st_curves``    — spanning-tree constant vs size, one curve per model;
                     needs model, n, st_constant.
* ``split_loglog`` — splittability estimates on log-log axes, optionally with
                     a fitted line; needs n, p_hat (rows with empty p_hat are
                     trial-cap exhaustions and are skipped with a warning).
* ``model_compare``— average spanning-tree constant vs average degree, one
                     labeled point per model; needs model, avg_degree,
                     avg_st_constant.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

KINDS = ("st_scatter", "st_curves", "split_loglog", "model_compare")

REQUIRED_COLUMNS = {
    "st_scatter": ("n", "ln_st"),
    "st_curves": ("model", "n", "st_constant"),
    "split_loglog": ("n", "p_hat"),
    "model_compare": ("model", "avg_degree", "avg_st_constant"),
}

FIT_COLUMNS = ("x", "y", "slope", "intercept", "r_squared", "n_points")


class SchemaError(ValueError):
    """An input CSV does not carry the columns its plot kind needs."""


@dataclass(frozen=True)
class PlotJob:
    kind: str
    inputs: Tuple[str, ...]
    output: str
    fit: Optional[str] = None  # fit CSV for the overlay line

    def __post_init__(self):
        if self.kind not in KINDS:
            raise SchemaError(f"unknown plot kind {self.kind!r}; expected {KINDS}")
        if not self.inputs:
            raise SchemaError("plot job needs at least one input CSV")
        suffix = Path(self.output).suffix.lower()
        if suffix not in (".png", ".pdf", ".svg"):
            raise SchemaError(
                f"output must be .png, .pdf, or .svg, got {suffix or '(none)'}"
            )

    @property
    def overlay_fit(self) -> bool:
        return self.fit is not None


def read_table(path, required) -> List[dict]:
    """Rows of a CSV, validating the header against ``required`` columns."""
    path = Path(path)
    if not path.exists():
        raise SchemaError(f"input CSV not found: {path}")
    with open(path, "r", encoding="utf-8", newline="") as f:
        reader = csv.DictReader(f)
        fields = reader.fieldnames or []
        missing = [c for c in required if c not in fields]
        if missing:
            raise SchemaError(
                f"{path}: missing columns {missing}; has {sorted(fields)}"
            )
        return [dict(row) for row in reader]


def read_fit(path) -> dict:
    rows = read_table(path, FIT_COLUMNS)
    if not rows:
        raise SchemaError(f"{path}: fit CSV has no rows")
    row = rows[0]
    return {
        "x": row["x"],
        "y": row["y"],
        "slope": float(row["slope"]),
        "intercept": float(row["intercept"]),
        "r_squared": float(row["r_squared"]),
    }
