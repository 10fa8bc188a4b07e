"""Ingestion of delimited data files into typed in-memory columns.

Files are UTF-8 delimited text with a header row; empty fields are NULL.
Values that fail to parse under the declared type are counted and treated
as NULL rather than failing the load: enterprise extracts are messy and a
bad cell should not sink a whole table.

Columns are represented as numpy arrays aligned with the file rows:
float64 with NaN-nulls for the numeric class, datetime64[ns] with NaT for
the temporal class, and object arrays with None for text. Integer keys
survive the float64 representation exactly up to 2**53.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import pandas as pd

from .catalog import SchemaManifest, TableDecl, TypeTag
from .errors import DataAccessError

_TRUE = {"true", "t", "1", "yes", "y"}
_FALSE = {"false", "f", "0", "no", "n"}


@dataclass
class ColumnData:
    table: str
    column: str
    type_tag: TypeTag
    values: np.ndarray  # row-aligned, nulls encoded as NaN/NaT/None
    null_count: int = 0
    error_count: int = 0

    @property
    def row_count(self) -> int:
        return len(self.values)

    def null_mask(self) -> np.ndarray:
        if self.values.dtype.kind == "f":
            return np.isnan(self.values)
        if self.values.dtype.kind == "M":
            return np.isnat(self.values)
        return np.array([v is None for v in self.values], dtype=bool)

    def non_null(self) -> np.ndarray:
        return self.values[~self.null_mask()]


@dataclass
class TableData:
    name: str
    columns: dict[str, ColumnData] = field(default_factory=dict)
    row_count: int = 0

    @classmethod
    def from_arrays(cls, name: str, columns: dict[str, tuple[TypeTag, np.ndarray]]) -> "TableData":
        """Build a table directly from numpy arrays (used by generators and tests)."""
        table = cls(name=name)
        for col, (tag, arr) in columns.items():
            cd = ColumnData(table=name, column=col, type_tag=tag, values=arr)
            cd.null_count = int(cd.null_mask().sum())
            table.columns[col] = cd
            table.row_count = len(arr)
        return table


def _parse_column(raw: pd.Series, tag: TypeTag) -> tuple[np.ndarray, int, int]:
    """Parse a string series under a type tag. Returns (values, nulls, errors)."""
    empty = (raw == "").to_numpy()
    nulls = int(empty.sum())
    if tag == TypeTag.TEXT:
        vals = raw.to_numpy(dtype=object).copy()
        vals[empty] = None
        return vals, nulls, 0
    if tag in (TypeTag.DATE, TypeTag.TIMESTAMP):
        parsed = pd.to_datetime(raw.where(~empty), errors="coerce", format="mixed")
        out = parsed.to_numpy(dtype="datetime64[ns]")
        errors = int(np.isnat(out).sum()) - nulls
        return out, nulls, errors
    if tag == TypeTag.BOOLEAN:
        lowered = raw.str.lower()
        out = np.full(len(raw), np.nan)
        out[lowered.isin(_TRUE).to_numpy()] = 1.0
        out[lowered.isin(_FALSE).to_numpy()] = 0.0
        errors = int(np.isnan(out).sum()) - nulls
        return out, nulls, errors
    # numeric class
    parsed = pd.to_numeric(raw.where(~empty), errors="coerce")
    out = parsed.to_numpy(dtype=np.float64)
    if tag in (TypeTag.INTEGER_SIGNED, TypeTag.INTEGER_UNSIGNED):
        fractional = ~np.isnan(out) & (out != np.floor(out))
        out[fractional] = np.nan
    errors = int(np.isnan(out).sum()) - nulls
    return out, nulls, errors


def load_table(manifest: SchemaManifest, decl: TableDecl) -> TableData:
    """Read one table's delimited file into typed columns."""
    path = manifest.data_path(decl)
    if not path.exists():
        raise DataAccessError(f"data file for table {decl.name!r} not found: {path}")
    try:
        frame = pd.read_csv(
            path,
            sep=decl.delimiter,
            header=0,
            dtype=str,
            keep_default_na=False,
            encoding="utf-8",
        )
    except Exception as exc:  # pandas raises a zoo of parse errors
        raise DataAccessError(f"cannot read {path}: {exc}") from exc

    table = TableData(name=decl.name, row_count=len(frame))
    for col, tag in decl.columns:
        if col not in frame.columns:
            raise DataAccessError(f"table {decl.name!r}: column {col!r} missing from {path}")
        values, nulls, errors = _parse_column(frame[col].astype(str), tag)
        table.columns[col] = ColumnData(
            table=decl.name,
            column=col,
            type_tag=tag,
            values=values,
            null_count=nulls,
            error_count=errors,
        )
    return table


def load_all(manifest: SchemaManifest) -> dict[str, TableData]:
    return {t.name: load_table(manifest, t) for t in manifest.tables}


def file_digest(path: str | Path) -> str:
    """Content hash of a data file, used to key the stats cache."""
    h = hashlib.sha1()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()
