"""Deterministic CSV emission and reading."""

import csv
from collections.abc import Iterable, Sequence
from pathlib import Path

from ..errors import ArgumentError


def format_value(value) -> str:
    """17-significant-digit text for floats, plain text for everything else."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, ".17g")
    if hasattr(value, "item"):
        return format_value(value.item())
    return str(value)


def emit_csv(rows: Iterable[Sequence], path: str | Path, header: Sequence[str]) -> None:
    """Write a header row and the rows with reproducible formatting.

    Args:
        rows: homogeneous rows, each with one value per header column
        path: output file (parent directories are created)
        header: column names

    Raises:
        ArgumentError: a row has the wrong number of values
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        for n, row in enumerate(rows):
            row = list(row)
            if len(row) != len(header):
                raise ArgumentError(f"row {n} has {len(row)} values, expected {len(header)}")
            writer.writerow([format_value(v) for v in row])


def read_csv_rows(path: str | Path, required: Sequence[str] = ()) -> list[dict[str, str]]:
    """Read a headed CSV file into dictionaries.

    Raises:
        ArgumentError: a required column is missing
    """
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as f:
        reader = csv.DictReader(f)
        missing = [c for c in required if c not in (reader.fieldnames or [])]
        if missing:
            raise ArgumentError(f"{path}: missing columns {', '.join(missing)}")
        return list(reader)
