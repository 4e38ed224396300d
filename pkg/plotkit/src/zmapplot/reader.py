"""CSV artifact reading and schema validation.

The sweep tool writes comment lines starting with ``#``, then a header
row, then data rows. This module parses that layout into a small
column-addressable table and checks the header against the column set
each figure kind requires. Values stay strings until a figure asks
for them as floats; blank or unparseable entries become NaN so that
downstream plotting masks them instead of interpolating.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from math import nan

import numpy as np

from .errors import SchemaMismatch

__all__ = ["KIND_COLUMNS", "Table", "read_table"]

# required header per figure kind, matching the sweep tool's output
KIND_COLUMNS = {
    "spin-map": ("theta", "phi", "method", "channel", "p_G", "resonant_flag"),
    "spin-osc": ("species", "theta", "f_hz", "phi_raw", "p_G"),
    "band-sweep": ("k", "theta", "phi", "residual", "p_G", "gap_min_ev", "status"),
    "bias-sweep": ("eps0", "P_total", "skipped_k_count"),
}


@dataclass(frozen=True)
class Table:
    """Rows of one artifact, addressable by column name.

    ``rows[i][j]`` is the raw string for column ``columns[j]``; column
    order follows the file, which may differ from the canonical order.
    """

    path: str
    columns: tuple[str, ...]
    rows: tuple[tuple[str, ...], ...]

    def __len__(self) -> int:
        return len(self.rows)

    def column(self, name: str) -> list[str]:
        """Raw strings of one column, in row order."""
        j = self.columns.index(name)
        return [r[j] for r in self.rows]

    def floats(self, name: str) -> np.ndarray:
        """One column as floats; blanks and junk become NaN."""
        out = np.empty(len(self.rows), dtype=float)
        for i, raw in enumerate(self.column(name)):
            try:
                out[i] = float(raw)
            except ValueError:
                out[i] = nan
        return out


def read_table(path: str, kind: str) -> Table:
    """Parse one artifact file and validate it against ``kind``.

    Raises SchemaMismatch naming the missing (or unexpected) columns
    when the header does not carry exactly the kind's column set. A
    file with a valid header and no data rows is returned as an empty
    table; figures render it as an annotated empty plot.
    """
    if kind not in KIND_COLUMNS:
        raise ValueError(f"unknown figure kind {kind!r}")
    with open(path, "r", encoding="utf-8", newline="") as fh:
        records = [
            row for row in csv.reader(fh)
            if row and not row[0].lstrip().startswith("#")
        ]
    if not records:
        raise SchemaMismatch(f"{path}: no header row found")
    header = tuple(c.strip() for c in records[0])
    required = KIND_COLUMNS[kind]
    missing = [c for c in required if c not in header]
    if missing:
        raise SchemaMismatch(
            f"{path}: missing column(s) {', '.join(missing)} required for kind {kind!r}"
        )
    unexpected = [c for c in header if c not in required]
    if unexpected:
        raise SchemaMismatch(
            f"{path}: unexpected column(s) {', '.join(unexpected)} for kind {kind!r}"
        )
    width = len(header)
    bad = [i for i, r in enumerate(records[1:], start=2) if len(r) != width]
    if bad:
        raise SchemaMismatch(f"{path}: row {bad[0]} has the wrong field count")
    rows = tuple(tuple(f.strip() for f in r) for r in records[1:])
    return Table(path=path, columns=header, rows=rows)
