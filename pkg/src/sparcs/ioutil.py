"""Small text-format helpers shared by dataset and report writers.

All artifacts are plain text with '\n' newlines and floats printed by
Python's shortest round-trip repr, so a rerun with the same inputs produces
byte-identical files.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

__all__ = ["format_float", "write_csv"]


def format_float(v) -> str:
    """Shortest decimal string that round-trips to the same float64."""
    return repr(float(v))


def format_cell(v) -> str:
    if isinstance(v, str):
        return v
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(v)
    return format_float(v)


def write_csv(path, header: list[str], rows, comments: list[str] | None = None) -> None:
    """Write a CSV with optional leading '#' comment lines.

    Row cells may be ints (written verbatim) or floats (round-trip repr).
    """
    lines = []
    for c in comments or []:
        lines.append(f"# {c}")
    lines.append(",".join(header))
    for row in rows:
        lines.append(",".join(format_cell(v) for v in row))
    Path(path).write_text("\n".join(lines) + "\n", encoding="ascii")
