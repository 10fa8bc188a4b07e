"""Schema manifest loading and declared-constraint bootstrap.

The manifest is a single JSON document describing the database: table
names, typed columns, data-file locators, and (optionally) declared
primary/foreign keys. Declared constraints are not trusted blindly; they
seed the inference pipeline and are re-scored like everything else, with
their origin recorded so the review service can display provenance.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Optional

from .errors import ManifestError


class TypeTag(str, Enum):
    INTEGER_SIGNED = "integer-signed"
    INTEGER_UNSIGNED = "integer-unsigned"
    DECIMAL = "decimal"
    TEXT = "text"
    DATE = "date"
    TIMESTAMP = "timestamp"
    BOOLEAN = "boolean"


# Compatibility classes: all numerics are mutually joinable, date and
# timestamp are mutually joinable, text and boolean only with themselves.
_COMPAT_CLASS = {
    TypeTag.INTEGER_SIGNED: "numeric",
    TypeTag.INTEGER_UNSIGNED: "numeric",
    TypeTag.DECIMAL: "numeric",
    TypeTag.TEXT: "text",
    TypeTag.DATE: "temporal",
    TypeTag.TIMESTAMP: "temporal",
    TypeTag.BOOLEAN: "boolean",
}


def compatible(a: TypeTag, b: TypeTag) -> bool:
    return _COMPAT_CLASS[a] == _COMPAT_CLASS[b]


@dataclass(frozen=True)
class ForeignKeyDecl:
    columns: tuple[str, ...]
    ref_table: str
    ref_columns: tuple[str, ...]


@dataclass
class TableDecl:
    name: str
    columns: list[tuple[str, TypeTag]]
    data_source: Optional[str] = None
    delimiter: str = ","
    declared_pk: Optional[list[str]] = None
    declared_fks: list[ForeignKeyDecl] = field(default_factory=list)

    def column_names(self) -> list[str]:
        return [c for c, _ in self.columns]

    def type_of(self, column: str) -> TypeTag:
        for c, t in self.columns:
            if c == column:
                return t
        raise KeyError(column)


@dataclass
class SchemaManifest:
    database_name: str
    tables: list[TableDecl]
    base_dir: Path = field(default_factory=Path)

    def table(self, name: str) -> TableDecl:
        for t in self.tables:
            if t.name == name:
                return t
        raise KeyError(name)

    def table_names(self) -> list[str]:
        return [t.name for t in self.tables]

    def data_path(self, table: TableDecl) -> Path:
        if table.data_source is None:
            raise ManifestError(f"table {table.name!r} has no data_source")
        p = Path(table.data_source)
        return p if p.is_absolute() else self.base_dir / p


def _parse_table(raw: dict) -> TableDecl:
    name = raw.get("name")
    if not name or not isinstance(name, str):
        raise ManifestError("table entry without a name")
    cols_raw = raw.get("columns") or []
    if not cols_raw:
        raise ManifestError(f"table {name!r} declares no columns")
    columns: list[tuple[str, TypeTag]] = []
    for c in cols_raw:
        try:
            columns.append((c["name"], TypeTag(c["type"])))
        except (KeyError, TypeError) as exc:
            raise ManifestError(f"table {name!r}: malformed column entry {c!r}") from exc
        except ValueError as exc:
            raise ManifestError(f"table {name!r}: unknown type for column {c.get('name')!r}") from exc
    fks = []
    for fk in raw.get("declared_fks") or []:
        try:
            fks.append(
                ForeignKeyDecl(
                    columns=tuple(fk["columns"]),
                    ref_table=fk["ref_table"],
                    ref_columns=tuple(fk["ref_columns"]),
                )
            )
        except (KeyError, TypeError) as exc:
            raise ManifestError(f"table {name!r}: malformed declared_fks entry {fk!r}") from exc
    return TableDecl(
        name=name,
        columns=columns,
        data_source=raw.get("data_source"),
        delimiter=raw.get("delimiter", ","),
        declared_pk=list(raw["declared_pk"]) if raw.get("declared_pk") else None,
        declared_fks=fks,
    )


def validate_manifest(manifest: SchemaManifest) -> None:
    if not manifest.tables:
        raise ManifestError("empty manifest: no tables declared")
    seen: set[str] = set()
    for t in manifest.tables:
        key = t.name.lower()
        if key in seen:
            raise ManifestError(f"duplicate table name {t.name!r} (case-insensitive)")
        seen.add(key)
        names = t.column_names()
        if len(set(names)) != len(names):
            dupes = sorted({n for n in names if names.count(n) > 1})
            raise ManifestError(f"table {t.name!r}: duplicate column names {dupes}")
        if t.declared_pk:
            for c in t.declared_pk:
                if c not in names:
                    raise ManifestError(
                        f"table {t.name!r}: declared_pk column {c!r} does not exist"
                    )
        for fk in t.declared_fks:
            for c in fk.columns:
                if c not in names:
                    raise ManifestError(
                        f"table {t.name!r}: declared_fk column {c!r} does not exist"
                    )
            try:
                remote = manifest.table(fk.ref_table)
            except KeyError:
                raise ManifestError(
                    f"table {t.name!r}: declared_fk references unknown table {fk.ref_table!r}"
                ) from None
            for c in fk.ref_columns:
                if c not in remote.column_names():
                    raise ManifestError(
                        f"table {t.name!r}: declared_fk references missing column "
                        f"{fk.ref_table}.{c}"
                    )
            if len(fk.columns) != len(fk.ref_columns):
                raise ManifestError(
                    f"table {t.name!r}: declared_fk column arity mismatch vs {fk.ref_table!r}"
                )


def load_manifest(path: str | Path) -> SchemaManifest:
    """Load and validate a schema manifest from a JSON file."""
    path = Path(path)
    if not path.exists():
        raise ManifestError(f"manifest file not found: {path}")
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ManifestError(f"manifest is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ManifestError("manifest root must be an object")
    manifest = SchemaManifest(
        database_name=raw.get("database_name", path.stem),
        tables=[_parse_table(t) for t in raw.get("tables", [])],
        base_dir=path.parent,
    )
    validate_manifest(manifest)
    return manifest


def bootstrap_constraints(
    manifest: SchemaManifest,
) -> tuple[list[tuple[str, str]], list[tuple[tuple[str, str], tuple[str, str]]]]:
    """Turn declared constraints into inference seeds.

    Returns (seed_pks, seed_inds) where seed_pks is a list of
    (table, column) for single-column declared PKs and seed_inds is a list
    of ((fk_table, fk_column), (pk_table, pk_column)) pairs expanded
    column-by-column from declared FKs. Composite PKs are not seeded here;
    they are registered as user-style composite keys by the pipeline.
    """
    seed_pks: list[tuple[str, str]] = []
    seed_inds: list[tuple[tuple[str, str], tuple[str, str]]] = []
    for t in manifest.tables:
        if t.declared_pk and len(t.declared_pk) == 1:
            seed_pks.append((t.name, t.declared_pk[0]))
        for fk in t.declared_fks:
            for local, remote in zip(fk.columns, fk.ref_columns):
                seed_inds.append(((t.name, local), (fk.ref_table, remote)))
    return seed_pks, seed_inds


def estimate_candidates(manifest: SchemaManifest) -> int:
    """Estimate the number of join-inference candidates for a schema.

    C(t, 2) * (d / t) for t tables carrying d dimension columns in total,
    rounded half-up so published benchmark figures reproduce exactly.
    """
    t = len(manifest.tables)
    if t < 2:
        return 0
    d = sum(len(tbl.columns) for tbl in manifest.tables)
    exact = math.comb(t, 2) * (d / t)
    return math.floor(exact + 0.5)
