"""Geometry, CSV and path helpers."""

from .csvio import emit_csv, format_value, read_csv_rows
from .paths import resolve_path, write_manifest

__all__ = [
    "emit_csv",
    "format_value",
    "read_csv_rows",
    "resolve_path",
    "write_manifest",
]
