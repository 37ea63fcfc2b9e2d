"""Machine-readable report output: CSV and JSON with embedded run config.

Both formats are deterministic byte-for-byte given the same rows and config:
no timestamps, sorted config keys, fixed float formatting (12 significant
digits in CSV; JSON keeps native numbers, which round-trip exactly).

CSV layout: ``# key = value`` comment lines carrying the resolved config,
then the header row, then data rows; UTF-8, comma separators, LF endings.
JSON layout: one document {"schema_version": ..., "config": {...},
"rows": [...]}.
"""

from __future__ import annotations

import json
from pathlib import Path

SCHEMA_VERSION = 1


def format_value(value) -> str:
    """Fixed-width-free but deterministic cell rendering; floats get 12 digits."""
    if value is None:
        return "n/a"
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, float):
        return f"{value:.12g}"
    return str(value)


def rows_to_csv(rows: list[dict], fieldnames: list[str], config: dict) -> str:
    lines = [f"# {key} = {format_value(config[key])}" for key in sorted(config)]
    lines.append(",".join(fieldnames))
    for row in rows:
        lines.append(",".join(format_value(row.get(name)) for name in fieldnames))
    return "\n".join(lines) + "\n"


def rows_to_json(rows: list[dict], config: dict) -> str:
    doc = {"schema_version": SCHEMA_VERSION, "config": config, "rows": rows}
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def write_rows(
    path: str | Path, rows: list[dict], fieldnames: list[str], config: dict, fmt: str
) -> None:
    """Serialize rows to ``path`` in the requested format ("csv" or "json")."""
    if fmt == "csv":
        text = rows_to_csv(rows, fieldnames, config)
    elif fmt == "json":
        text = rows_to_json(rows, config)
    else:
        raise ValueError(f"unknown output format {fmt!r}")
    Path(path).write_text(text, encoding="utf-8", newline="\n")
