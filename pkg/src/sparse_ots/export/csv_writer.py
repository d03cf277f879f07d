"""Plain CSV output with marker rows.

Marker rows start with ``#`` so any CSV reader configured to skip comments sees only data.
"""
from __future__ import annotations

import csv
import io
import math
import sys
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, TextIO

MARKER_PREFIX = "#"


@dataclass(frozen=True)
class Marker:
    """A grid point that produced no data, with the reason."""

    reason: str
    point: dict[str, Any] = field(default_factory=dict)

    def render(self) -> str:
        where = ",".join(f"{k}={format_value(v)}" for k, v in self.point.items())
        if not where:
            return f"{MARKER_PREFIX} {self.reason}"
        return f"{MARKER_PREFIX} {where}: {self.reason}"


Row = Mapping[str, Any] | Marker


def format_value(value: Any) -> str:
    """Stable text for one cell."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return format(value, ".12g")
    if hasattr(value, "value"):
        return str(value.value)
    return str(value)


def render_csv(header: Sequence[str], rows: Iterable[Row]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        if isinstance(row, Marker):
            buffer.write(row.render().replace("\n", " ") + "\n")
        else:
            writer.writerow([format_value(row.get(name)) for name in header])
    return buffer.getvalue()


def write_csv(target: Path | TextIO | None, header: Sequence[str], rows: Iterable[Row]) -> None:
    """Write to a file path, an open stream, or stdout when ``target`` is None."""
    text = render_csv(header, rows)
    if isinstance(target, Path):
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(text, encoding="utf-8")
    else:
        (target or sys.stdout).write(text)


def read_data_rows(path: Path) -> list[dict[str, str]]:
    """Data rows of a CSV written by :func:`write_csv`, markers dropped."""
    lines = [
        line
        for line in path.read_text(encoding="utf-8").splitlines()
        if not line.startswith(MARKER_PREFIX)
    ]
    return list(csv.DictReader(lines))
