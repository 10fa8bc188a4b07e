"""Per-column statistics and cleaned value samples.

Counts and distinct counts feed the key-candidate filter; cleaned samples
feed inclusion-dependency containment checks. Distinct counts are exact
below a row threshold and sketch-based above it, since exact DISTINCT over
very large columns is the one operation that does not scale.

All randomness is derived from an explicit seed and all hot loops go
through joininfer.kernels, so results are identical across kernel
backends and across runs.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import kernels
from .catalog import TypeTag
from .data import ColumnData

DEFAULT_EXACT_THRESHOLD = 1_000_000
DEFAULT_PRECISION = 14  # registers = 2**14, relative standard error ~0.8%


@dataclass
class ColumnStats:
    table: str
    column: str
    count: int  # non-null rows
    distinct: int
    is_exact: bool
    type_tag: TypeTag
    row_count: int = 0
    null_count: int = 0
    error_count: int = 0

    def to_dict(self) -> dict:
        d = self.__dict__.copy()
        d["type_tag"] = self.type_tag.value
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ColumnStats":
        d = dict(d)
        d["type_tag"] = TypeTag(d["type_tag"])
        return cls(**d)


@dataclass
class CleanedSample:
    table: str
    column: str
    values: np.ndarray
    requested_size: int
    seed: int

    def __len__(self) -> int:
        return len(self.values)


class CardinalitySketch:
    """HyperLogLog-style distinct counter over 64-bit hashes."""

    def __init__(self, precision: int = DEFAULT_PRECISION):
        if not 4 <= precision <= 18:
            raise ValueError(f"precision must be in [4, 18], got {precision}")
        self.precision = precision
        self.registers = np.zeros(1 << precision, dtype=np.uint8)

    def add_hashes(self, hashes: np.ndarray) -> None:
        kernels.hll_update(self.registers, hashes, self.precision)

    def add_values(self, values: np.ndarray) -> None:
        self.add_hashes(hash_values(values))

    def estimate(self) -> int:
        m = float(len(self.registers))
        alpha = 0.7213 / (1.0 + 1.079 / m)
        raw = alpha * m * m / np.sum(np.exp2(-self.registers.astype(np.float64)))
        zeros = int(np.count_nonzero(self.registers == 0))
        if raw <= 2.5 * m and zeros > 0:
            raw = m * math.log(m / zeros)
        return int(round(raw))


def hash_values(values: np.ndarray) -> np.ndarray:
    """Deterministic 64-bit hashes for a homogeneous value array."""
    if values.dtype.kind == "f":
        # normalize -0.0 so it hashes like 0.0
        vals = values + 0.0
        integral = np.all(vals == np.floor(vals)) if len(vals) else True
        if integral and (len(vals) == 0 or np.all(np.abs(vals) < 2**62)):
            bits = vals.astype(np.int64).astype(np.uint64)
        else:
            bits = vals.view(np.uint64)
        return kernels.splitmix64(bits)
    if values.dtype.kind == "M":
        return kernels.splitmix64(values.astype("datetime64[ns]").view(np.int64).astype(np.uint64))
    if values.dtype.kind in "iu":
        return kernels.splitmix64(values.astype(np.int64).astype(np.uint64))
    return kernels.fnv1a64_many([str(v).encode("utf-8") for v in values])


def exact_distinct(values: np.ndarray) -> int:
    if values.dtype.kind == "O":
        return len(set(values.tolist()))
    return int(len(np.unique(values)))


def approx_distinct(values: np.ndarray, precision: int = DEFAULT_PRECISION) -> int:
    """Sketch-based distinct estimate; may overshoot the true count."""
    sketch = CardinalitySketch(precision)
    sketch.add_values(values)
    return sketch.estimate()


def profile_column(
    column: ColumnData,
    exact_threshold: int = DEFAULT_EXACT_THRESHOLD,
    precision: int = DEFAULT_PRECISION,
) -> ColumnStats:
    """Compute count and (exact or approximate) distinct for one column."""
    non_null = column.non_null()
    count = len(non_null)
    if count < exact_threshold:
        distinct = exact_distinct(non_null)
        is_exact = True
    else:
        distinct = approx_distinct(non_null, precision)
        is_exact = False
    return ColumnStats(
        table=column.table,
        column=column.column,
        count=count,
        distinct=distinct,
        is_exact=is_exact,
        type_tag=column.type_tag,
        row_count=column.row_count,
        null_count=column.null_count,
        error_count=column.error_count,
    )


def draw_sample(values: np.ndarray, size: int, seed: int) -> np.ndarray:
    """Uniform sample of min(size, len(values)) rows; deterministic in seed."""
    if size < 1:
        raise ValueError("sample size must be >= 1")
    idx = kernels.sample_indices(len(values), size, seed)
    return values[idx]


def _null_mask(values: np.ndarray) -> np.ndarray:
    if values.dtype.kind == "f":
        return np.isnan(values)
    if values.dtype.kind == "M":
        return np.isnat(values)
    return np.array([v is None or v == "" for v in values], dtype=bool)


def clean_sample(
    raw: np.ndarray,
    type_tag: TypeTag,
    numeric_fence: float = 1.5,
    string_fence: float = 0.0,
) -> np.ndarray:
    """Drop NULLs, empties, and outliers from a raw sample.

    Numerics use a Tukey fence of `numeric_fence` * IQR around [Q1, Q3];
    string lengths use a (by default strict) fence of `string_fence` * IQR.
    Unsigned integers additionally drop negatives before the fence is fit.
    """
    vals = raw[~_null_mask(raw)]
    if len(vals) == 0:
        return vals
    if type_tag == TypeTag.BOOLEAN:
        return vals
    if type_tag == TypeTag.TEXT:
        lengths = np.array([len(str(v)) for v in vals], dtype=np.float64)
        return vals[_iqr_keep(lengths, string_fence)]
    if type_tag in (TypeTag.DATE, TypeTag.TIMESTAMP):
        numeric = vals.astype("datetime64[ns]").view(np.int64).astype(np.float64)
        return vals[_iqr_keep(numeric, numeric_fence)]
    if type_tag == TypeTag.INTEGER_UNSIGNED:
        vals = vals[vals >= 0]
        if len(vals) == 0:
            return vals
    return vals[_iqr_keep(vals.astype(np.float64), numeric_fence)]


def _iqr_keep(numeric: np.ndarray, fence: float) -> np.ndarray:
    q1, q3 = np.percentile(numeric, [25, 75])
    iqr = q3 - q1
    lo, hi = q1 - fence * iqr, q3 + fence * iqr
    return (numeric >= lo) & (numeric <= hi)


def sample_column(
    column: ColumnData,
    size: int,
    seed: int,
    numeric_fence: float = 1.5,
    string_fence: float = 0.0,
) -> CleanedSample:
    """Draw and clean a sample for one column in a single pass."""
    raw = draw_sample(column.values, size, seed)
    cleaned = clean_sample(raw, column.type_tag, numeric_fence, string_fence)
    return CleanedSample(
        table=column.table,
        column=column.column,
        values=cleaned,
        requested_size=size,
        seed=seed,
    )


class StatsCache:
    """File-backed cache of column stats keyed by (table, column, data digest)."""

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self._entries: dict[str, dict] = {}
        if self.path.exists():
            self._entries = json.loads(self.path.read_text(encoding="utf-8"))

    @staticmethod
    def key(table: str, column: str, digest: str) -> str:
        return f"{table}|{column}|{digest}"

    def get(self, table: str, column: str, digest: str) -> ColumnStats | None:
        entry = self._entries.get(self.key(table, column, digest))
        return ColumnStats.from_dict(entry) if entry else None

    def put(self, stats: ColumnStats, digest: str) -> None:
        self._entries[self.key(stats.table, stats.column, digest)] = stats.to_dict()

    def save(self) -> None:
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self.path.write_text(
            json.dumps(self._entries, indent=2, sort_keys=True), encoding="utf-8"
        )
