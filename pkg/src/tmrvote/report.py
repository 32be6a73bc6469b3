"""Plain-text, CSV and markdown rendering of report tables."""

from __future__ import annotations

import csv
import io
from decimal import ROUND_HALF_UP, Decimal

FORMATS = ("text", "csv", "md")


def round_half_up(value: float, places: int = 2) -> str:
    """Decimal string of ``value`` rounded half-up, e.g. 0.125 -> '0.13'."""
    q = Decimal(1).scaleb(-places)
    return str(Decimal(str(value)).quantize(q, rounding=ROUND_HALF_UP))


def render_table(columns, rows, fmt: str = "text") -> str:
    rows = [[str(c) for c in row] for row in rows]
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(columns)
        writer.writerows(rows)
        return buf.getvalue()
    widths = [max([len(c)] + [len(r[i]) for r in rows]) for i, c in enumerate(columns)]
    numeric = [bool(rows) and all(_is_number(r[i]) for r in rows) for i in range(len(columns))]

    def cell(text, i):
        return text.rjust(widths[i]) if numeric[i] else text.ljust(widths[i])

    if fmt == "md":
        lines = ["| " + " | ".join(cell(c, i) for i, c in enumerate(columns)) + " |"]
        lines.append(
            "|" + "|".join(("-" * (w + 1) + ":") if numeric[i] else ("-" * (w + 2))
                           for i, w in enumerate(widths)) + "|"
        )
        lines += ["| " + " | ".join(cell(v, i) for i, v in enumerate(r)) + " |" for r in rows]
        return "\n".join(lines) + "\n"
    if fmt == "text":
        lines = ["  ".join(cell(c, i) for i, c in enumerate(columns)).rstrip()]
        lines.append("  ".join("-" * w for w in widths))
        lines += ["  ".join(cell(v, i) for i, v in enumerate(r)).rstrip() for r in rows]
        return "\n".join(lines) + "\n"
    raise ValueError(f"unknown format {fmt!r}; expected one of {', '.join(FORMATS)}")


def _is_number(text: str) -> bool:
    try:
        float(text)
    except ValueError:
        return False
    return True
