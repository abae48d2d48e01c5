"""Figure descriptions and the CSV tables behind them.

A FigureSpec names the input CSV files, one of the known figure kinds,
the output image path, and a few presentation knobs.  Rendering never
recomputes any physics; these tables are the whole input.

Every kind expects one fixed column set, matching what the simulation
CLI writes for the corresponding subcommand.  Input files may open with
``#`` comment lines (the producer records its version and configuration
there); those are skipped.  A header that does not match the kind's
schema raises SchemaError carrying the exact column difference, and a
schema-valid file with zero data rows raises EmptyTableError rather
than letting an empty image through.

Column order in the file does not matter; cells are read by name.
Numeric cells are converted to float, the few text columns (model,
criterion, scenario, method) stay strings.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass


class SchemaError(ValueError):
    """Input columns do not match the figure kind."""

    def __init__(self, path, kind, missing, unexpected):
        self.path = str(path)
        self.kind = kind
        self.missing = tuple(missing)
        self.unexpected = tuple(unexpected)
        parts = [f"{self.path}: columns do not match kind {kind!r}"]
        if self.missing:
            parts.append("missing: " + ", ".join(self.missing))
        if self.unexpected:
            parts.append("unexpected: " + ", ".join(self.unexpected))
        super().__init__("; ".join(parts))


class EmptyTableError(ValueError):
    """A schema-valid input file carried no data rows."""


# One column set per figure kind.  fig1 and pf46 read minimum-segment
# sweeps of the nearest-neighbour chain (pf46 being the higher-order
# sweep, typically orders 4 and 6); fig2 adds the interaction-exponent
# column of the long-range sweeps.  The remaining kinds read the
# error-versus-time, Haar-slack, and spread-versus-size tables.
SCHEMAS = {
    "fig1": ("model", "n", "p", "t", "eps", "criterion", "instance",
             "inst_seed", "r_min", "error_at_r_min", "samples", "seed"),
    "fig2": ("model", "alpha", "n", "p", "t", "eps", "criterion",
             "instance", "inst_seed", "r_min", "error_at_r_min",
             "samples", "seed"),
    "pf46": ("model", "n", "p", "t", "eps", "criterion", "instance",
             "inst_seed", "r_min", "error_at_r_min", "samples", "seed"),
    "error_vs_t": ("model", "n", "p", "r", "t", "mean_sqrt_s",
                   "std_sqrt_s", "samples", "seed"),
    "haar_d": ("scenario", "d", "d_value", "method", "samples", "std_err",
               "cauchy", "mean_sqrt", "seed"),
    "sd_scaling": ("model", "n", "p", "t", "eps", "r_emp", "mean_sqrt_s",
                   "sd_sqrt_s", "samples", "seed"),
}

KINDS = tuple(SCHEMAS)

_TEXT_COLUMNS = frozenset({"model", "criterion", "scenario", "method"})


@dataclass(frozen=True)
class FigureSpec:
    """What to draw: inputs, kind, output path, presentation knobs.

    fit_min_n is the smallest size (register width n, or dimension d
    for the Haar figure) admitted into extrapolation fits; sizes below
    it are still plotted, just not fitted.  fits=False suppresses the
    extrapolation lines and their caption entirely.
    """

    csv_paths: tuple[str, ...]
    kind: str
    out_path: str
    title: str | None = None
    legend_loc: str = "best"
    fit_min_n: int = 6
    fits: bool = True

    def __post_init__(self):
        if self.kind not in SCHEMAS:
            raise ValueError(f"unknown figure kind {self.kind!r}; expected "
                             "one of " + ", ".join(KINDS))
        if not self.csv_paths:
            raise ValueError("FigureSpec needs at least one CSV path")
        object.__setattr__(self, "csv_paths", tuple(self.csv_paths))


def _convert(column: str, cell: str):
    if column in _TEXT_COLUMNS:
        return cell
    return float(cell)


def read_table(path, kind: str) -> list[dict]:
    """Read one CSV file and check it against the kind's schema.

    Returns the data rows as dicts keyed by column name, numeric cells
    already converted.  Raises SchemaError on a column mismatch and
    EmptyTableError when the file holds a header but no rows.
    """
    expected = SCHEMAS[kind]
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.reader(line for line in handle
                            if not line.startswith("#"))
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(path, kind, expected, ()) from None
        missing = [c for c in expected if c not in header]
        unexpected = [c for c in header if c not in expected]
        if missing or unexpected:
            raise SchemaError(path, kind, missing, unexpected)
        rows = [{col: _convert(col, cell)
                 for col, cell in zip(header, row)}
                for row in reader if row]
    if not rows:
        raise EmptyTableError(f"{path}: no data rows for kind {kind!r}")
    return rows


def load_rows(spec: FigureSpec) -> list[dict]:
    """All data rows of the spec's input files, concatenated in order."""
    rows: list[dict] = []
    for path in spec.csv_paths:
        rows.extend(read_table(path, spec.kind))
    return rows
