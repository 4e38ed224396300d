"""Deterministic serialization of sweep results.

CSV layout: ``#``-prefixed metadata lines (tool version, the resolved
config echo, and one timestamp line), then the header row, then data
rows.  JSON-lines layout: a metadata object, a ``generated`` timestamp
object on its own line, then one object per row.  In both formats the
timestamp is the only nondeterministic line, so artifacts from
identical configs are byte-identical apart from it.

Floats are serialized with ``repr``, the shortest representation that
round-trips to the same double.
"""

from __future__ import annotations

import csv
import io
import json
import os
from dataclasses import dataclass
from datetime import datetime, timezone

import numpy as np

__all__ = ["SweepArtifact", "format_value", "render_artifact", "write_artifact"]


@dataclass(frozen=True)
class SweepArtifact:
    """Rows plus the metadata needed to reproduce them."""

    experiment: str
    columns: tuple[str, ...]
    rows: list[tuple]
    config_echo: list[tuple[str, str]]
    version: str


def format_value(v) -> str:
    """Canonical text form of one cell value (CSV flavor)."""
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return str(v)


def _json_value(v):
    if v is None or isinstance(v, str):
        return v
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (float, np.floating)):
        return float(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    return str(v)


def _timestamp() -> str:
    return datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def render_artifact(art: SweepArtifact, fmt: str, timestamp: str | None = None) -> str:
    """Serialize to a string; ``timestamp=None`` stamps the current time.

    Passing a fixed ``timestamp`` makes the output fully deterministic,
    which the tests use to compare artifacts byte for byte.
    """
    ts = _timestamp() if timestamp is None else timestamp
    if fmt == "csv":
        buf = io.StringIO()
        buf.write(f"# zmap-lab {art.version}\n")
        buf.write(f"# generated: {ts}\n")
        for key, value in art.config_echo:
            buf.write(f"# config: {key} = {value}\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(art.columns)
        for row in art.rows:
            writer.writerow([format_value(v) for v in row])
        return buf.getvalue()
    if fmt == "jsonl":
        lines = [
            json.dumps({
                "meta": {
                    "tool": "zmap-lab",
                    "version": art.version,
                    "config": dict(art.config_echo),
                },
            }, sort_keys=True),
            json.dumps({"generated": ts}),
        ]
        for row in art.rows:
            lines.append(json.dumps(
                {c: _json_value(v) for c, v in zip(art.columns, row)}))
        return "\n".join(lines) + "\n"
    raise ValueError(f"unknown format {fmt!r}")


def write_artifact(art: SweepArtifact, path: str, fmt: str) -> str:
    """Write the artifact to ``path``, creating parent directories."""
    text = render_artifact(art, fmt)
    parent = os.path.dirname(path)
    if parent:
        os.makedirs(parent, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    return path
