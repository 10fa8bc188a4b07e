"""Join-predicate mining from SQL query logs.

The parser is deliberately relaxed: it understands enough of SELECT
syntax to pull out equality predicates between two columns (JOIN ... ON,
comma joins, WHERE), and classifies everything else - DDL, writes, grants,
noise - as skipped. It never raises on any input; totality is the
contract, not grammar coverage.

Mined predicates are bound against the catalog (aliases, then FROM-clause
lookup, then the semantic binding judge), validated by probing the
ingested data for at least one matching row pair, and consolidated with
the statistically inferred INDs.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .catalog import SchemaManifest, compatible
from .data import TableData
from .errors import UnresolvedBindingError
from .ind import FeatureVector, InclusionDependency, ind_score, contains_all
from .pk import PrimaryKeyDecision, has_suffix, normalize_name, seq_match
from .profiler import ColumnStats, draw_sample
from . import adjudicate
from .ind import SUFFIXES

log = logging.getLogger(__name__)

VALIDATION_PROBE_THRESHOLD = 1_000_000


@dataclass
class ColumnRef:
    qualifier: Optional[str]  # alias or table name as written, lowercased
    column: str
    table: Optional[str] = None  # filled in by bind()


@dataclass
class JoinEvidence:
    left: ColumnRef
    right: ColumnRef
    source_query_index: int
    qualified: bool
    validated: str = "unchecked"  # unchecked | valid | invalid | unresolved
    occurrence_count: int = 1
    reason: str = ""
    # per-statement context needed for binding
    from_tables: list[str] = field(default_factory=list)
    alias_map: dict[str, str] = field(default_factory=dict)

    def column_pair(self) -> Optional[tuple[tuple[str, str], tuple[str, str]]]:
        if self.left.table is None or self.right.table is None:
            return None
        return ((self.left.table, self.left.column), (self.right.table, self.right.column))


@dataclass
class ParseResult:
    evidence: list[JoinEvidence] = field(default_factory=list)
    skipped: int = 0
    skipped_positions: list[int] = field(default_factory=list)
    parsed: int = 0


_WRITE_KEYWORDS = {
    "create", "insert", "update", "delete", "drop", "alter", "truncate",
    "merge", "grant", "revoke", "set", "use", "copy", "vacuum", "analyze",
    "comment", "call", "begin", "commit", "rollback", "explain", "replace",
}

_RESERVED = {
    "on", "where", "join", "inner", "left", "right", "full", "outer",
    "cross", "group", "order", "having", "limit", "union", "select",
    "from", "as", "and", "or", "not", "null", "true", "false", "in",
    "is", "like", "between", "by", "using", "natural", "offset", "when",
    "then", "case", "end", "else", "distinct", "exists", "all", "any",
}

_IDENT = r"[A-Za-z_][A-Za-z0-9_]*"
_COLREF = rf"{_IDENT}(?:\.{_IDENT})?"
_EQ_PRED = re.compile(rf"(?<![\w.])({_COLREF})\s*=\s*({_COLREF})(?![\w.(])")
_TABLE_REF = re.compile(
    rf"\b(from|join)\s+({_IDENT}(?:\.{_IDENT})?)(?:\s+(?:as\s+)?({_IDENT}))?",
    re.IGNORECASE,
)
_COMMA_ITEM = re.compile(rf"^\s*({_IDENT}(?:\.{_IDENT})?)(?:\s+(?:as\s+)?({_IDENT}))?\s*$")


def split_statements(text: str) -> list[tuple[int, str]]:
    """Split on semicolons with string-literal and comment awareness.

    Falls back to one-statement-per-line when the log has no semicolons.
    Returns (position, statement) pairs, 0-indexed by statement order.
    """
    statements: list[str] = []
    buf: list[str] = []
    i, n = 0, len(text)
    in_single = in_double = in_line_comment = in_block_comment = False
    while i < n:
        ch = text[i]
        nxt = text[i + 1] if i + 1 < n else ""
        if in_line_comment:
            if ch == "\n":
                in_line_comment = False
            buf.append(ch)
        elif in_block_comment:
            if ch == "*" and nxt == "/":
                in_block_comment = False
                buf.append("*/")
                i += 2
                continue
            buf.append(ch)
        elif in_single:
            buf.append(ch)
            if ch == "'":
                if nxt == "'":
                    buf.append(nxt)
                    i += 2
                    continue
                in_single = False
        elif in_double:
            buf.append(ch)
            if ch == '"':
                in_double = False
        elif ch == "'":
            in_single = True
            buf.append(ch)
        elif ch == '"':
            in_double = True
            buf.append(ch)
        elif ch == "-" and nxt == "-":
            in_line_comment = True
            buf.append(ch)
        elif ch == "/" and nxt == "*":
            in_block_comment = True
            buf.append("/*")
            i += 2
            continue
        elif ch == ";":
            statements.append("".join(buf))
            buf = []
        else:
            buf.append(ch)
        i += 1
    statements.append("".join(buf))

    if len(statements) == 1 and "\n" in text:
        statements = text.splitlines()
    out = []
    for idx, stmt in enumerate(s for s in statements):
        if stmt.strip():
            out.append((idx, stmt))
    return out


def _strip_comments(stmt: str) -> str:
    stmt = re.sub(r"--[^\n]*", " ", stmt)
    stmt = re.sub(r"/\*.*?\*/", " ", stmt, flags=re.DOTALL)
    return stmt


def _strip_literals(stmt: str) -> str:
    # replace string literals with a token so their contents can't be
    # mistaken for identifiers or predicates
    return re.sub(r"'(?:[^']|'')*'", " __lit__ ", stmt)


def _first_keyword(stmt: str) -> str:
    m = re.match(r"\s*\(*\s*([A-Za-z]+)", stmt)
    return m.group(1).lower() if m else ""


def _extract_subqueries(stmt: str) -> tuple[str, list[str]]:
    """Replace one level of parenthesized SELECTs with placeholders."""
    subs: list[str] = []
    out: list[str] = []
    i, n = 0, len(stmt)
    while i < n:
        ch = stmt[i]
        if ch == "(":
            j = i + 1
            depth = 1
            while j < n and depth:
                if stmt[j] == "(":
                    depth += 1
                elif stmt[j] == ")":
                    depth -= 1
                j += 1
            inner = stmt[i + 1 : j - 1]
            if _first_keyword(inner) == "select":
                subs.append(inner)
                out.append(f" __subq{len(subs) - 1} ")
            else:
                out.append("(" + inner + ")")
            i = j
        else:
            out.append(ch)
            i += 1
    return "".join(out), subs


def _strip_ctes(stmt: str) -> str:
    """Drop WITH-clause bodies, leaving CTE names as opaque table names."""
    m = re.match(r"\s*with\s", stmt, re.IGNORECASE)
    if not m:
        return stmt
    # remove `name as ( ... )` bodies at the top level
    out = []
    i, n = 0, len(stmt)
    while i < n:
        if stmt[i] == "(":
            depth = 1
            j = i + 1
            while j < n and depth:
                if stmt[j] == "(":
                    depth += 1
                elif stmt[j] == ")":
                    depth -= 1
                j += 1
            i = j
        else:
            out.append(stmt[i])
            i += 1
    text = "".join(out)
    # keep everything from the main SELECT onward
    main = re.search(r"\bselect\b", text, re.IGNORECASE)
    return text[main.start():] if main else text


def _parse_select(stmt: str, index: int, depth: int = 0) -> list[JoinEvidence]:
    stmt = _strip_ctes(stmt)
    stmt, subqueries = _extract_subqueries(stmt)

    alias_map: dict[str, str] = {}
    from_tables: list[str] = []
    for m in _TABLE_REF.finditer(stmt):
        table = m.group(2).lower()
        alias = m.group(3)
        if table.startswith("__subq"):
            continue
        table = table.split(".")[-1]  # drop schema qualifier
        if table not in from_tables:
            from_tables.append(table)
        if alias and alias.lower() not in _RESERVED:
            alias_map[alias.lower()] = table
        alias_map.setdefault(table, table)
        # comma joins: scan the remainder of the FROM clause for more refs
        if m.group(1).lower() == "from":
            tail = stmt[m.end():]
            stop = re.search(
                r"\b(where|join|inner|left|right|full|cross|group|order|having|limit|union|on)\b",
                tail,
                re.IGNORECASE,
            )
            segment = tail[: stop.start()] if stop else tail
            for item in segment.split(","):
                cm = _COMMA_ITEM.match(item)
                if not cm:
                    continue
                t2 = cm.group(1).lower().split(".")[-1]
                a2 = cm.group(2)
                if t2 in _RESERVED or t2.startswith("__subq") or t2 == "__lit__":
                    continue
                if t2 not in from_tables:
                    from_tables.append(t2)
                if a2 and a2.lower() not in _RESERVED:
                    alias_map[a2.lower()] = t2
                alias_map.setdefault(t2, t2)

    evidence: list[JoinEvidence] = []
    for m in _EQ_PRED.finditer(stmt):
        refs = []
        ok = True
        for side in (m.group(1), m.group(2)):
            parts = side.split(".")
            name = parts[-1].lower()
            qualifier = parts[0].lower() if len(parts) == 2 else None
            if name in _RESERVED or name == "__lit__" or name.startswith("__subq"):
                ok = False
                break
            if qualifier and (qualifier in _RESERVED or qualifier.startswith("__subq")):
                ok = False
                break
            refs.append(ColumnRef(qualifier=qualifier, column=name))
        if not ok:
            continue
        evidence.append(
            JoinEvidence(
                left=refs[0],
                right=refs[1],
                source_query_index=index,
                qualified=all(r.qualifier is not None for r in refs),
                from_tables=list(from_tables),
                alias_map=dict(alias_map),
            )
        )

    if depth < 1:
        for sub in subqueries:
            evidence.extend(_parse_select(sub, index, depth + 1))
    return evidence


def parse_queries(statements: list[str] | str) -> ParseResult:
    """Extract join evidence from a query log; never raises.

    Accepts either a raw log text or a pre-split statement list. Skipped
    counts DDL/write/unparseable statements; evidence + skipped accounts
    for every statement.
    """
    if isinstance(statements, str):
        pairs = split_statements(statements)
    else:
        pairs = [(i, s) for i, s in enumerate(statements) if s and s.strip()]

    result = ParseResult()
    for index, stmt in pairs:
        try:
            clean = _strip_literals(_strip_comments(stmt))
            keyword = _first_keyword(clean)
            if keyword in ("select", "with"):
                result.evidence.extend(_parse_select(clean, index))
                result.parsed += 1
            else:
                result.skipped += 1
                result.skipped_positions.append(index)
        except Exception as exc:  # totality by contract
            log.debug("statement %d unparseable: %s", index, exc)
            result.skipped += 1
            result.skipped_positions.append(index)
    return result


def bind(
    evidence: list[JoinEvidence],
    manifest: SchemaManifest,
) -> list[JoinEvidence]:
    """Resolve evidence column refs to catalog tables, in place.

    Qualified refs go through the statement's alias map; unqualified refs
    are looked up in the FROM-clause tables first and ambiguity goes to
    the binding judge. Unresolvable refs mark the evidence unresolved but
    keep it for audit.
    """
    catalog_tables = {t.name.lower(): t for t in manifest.tables}

    def resolve(ref: ColumnRef, ev: JoinEvidence) -> Optional[str]:
        if ref.qualifier:
            table = ev.alias_map.get(ref.qualifier, ref.qualifier)
            decl = catalog_tables.get(table)
            if decl and ref.column in [c.lower() for c in decl.column_names()]:
                return decl.name
            return None
        holders = [
            catalog_tables[t].name
            for t in ev.from_tables
            if t in catalog_tables
            and ref.column in [c.lower() for c in catalog_tables[t].column_names()]
        ]
        if len(holders) == 1:
            return holders[0]
        if not holders:
            return None
        try:
            return adjudicate.judge_binding(ref.column, holders, ev.from_tables)
        except UnresolvedBindingError:
            return None

    for ev in evidence:
        left = resolve(ev.left, ev)
        right = resolve(ev.right, ev)
        if left is None or right is None:
            ev.validated = "unresolved"
            ev.reason = "column reference could not be bound to a catalog table"
        else:
            ev.left.table = left
            ev.right.table = right
    return evidence


def validate_join(
    ev: JoinEvidence,
    tables: dict[str, TableData],
    probe_threshold: int = VALIDATION_PROBE_THRESHOLD,
    seed: int = 0,
) -> str:
    """Check that the mined equi-join matches at least one row pair."""
    if ev.validated == "unresolved":
        return ev.validated
    pair = ev.column_pair()
    assert pair is not None
    (lt, lc), (rt, rc) = pair
    if lt == rt and lc == rc:
        ev.validated = "invalid"
        ev.reason = "self-equality predicate, not a join"
        return ev.validated
    left_col = tables[lt].columns[lc]
    right_col = tables[rt].columns[rc]
    if not compatible(left_col.type_tag, right_col.type_tag):
        ev.validated = "invalid"
        ev.reason = f"type-mismatch: {left_col.type_tag.value} vs {right_col.type_tag.value}"
        return ev.validated
    lv = left_col.non_null()
    rv = right_col.non_null()
    if len(lv) > probe_threshold:
        lv = draw_sample(lv, probe_threshold, seed)
    if len(rv) > probe_threshold:
        rv = draw_sample(rv, probe_threshold, seed)
    if len(lv) == 0 or len(rv) == 0:
        ev.validated = "invalid"
        ev.reason = "one side has no values"
        return ev.validated
    if lv.dtype.kind == "O" or rv.dtype.kind == "O":
        overlap = bool(set(lv.tolist()) & set(rv.tolist()))
    else:
        if lv.dtype.kind == "M" or rv.dtype.kind == "M":
            lv = lv.astype("datetime64[ns]")
            rv = rv.astype("datetime64[ns]")
        overlap = bool(np.isin(lv, rv).any())
    ev.validated = "valid" if overlap else "invalid"
    if not overlap:
        ev.reason = "equi-join over the two columns returns no rows"
    return ev.validated


def consolidate(
    inds: list[InclusionDependency],
    evidence: list[JoinEvidence],
    stats: dict[tuple[str, str], ColumnStats],
    decisions: dict[str, PrimaryKeyDecision],
) -> list[InclusionDependency]:
    """Merge validated evidence into the IND set.

    Evidence matching an existing IND (either orientation) bumps its
    occurrence support. Novel valid evidence becomes a history-derived IND
    whose key side is chosen from the key-candidate pools (falling back to
    the higher-distinct side) and whose score is its feature score computed
    post hoc. Idempotent up to occurrence counts.
    """
    by_pair: dict[frozenset, InclusionDependency] = {}
    for ind in inds:
        by_pair[frozenset((ind.fk, ind.pk))] = ind

    merged = list(inds)
    for ev in evidence:
        if ev.validated != "valid":
            continue
        pair = ev.column_pair()
        assert pair is not None
        key = frozenset(pair)
        existing = by_pair.get(key)
        if existing is not None:
            existing.occurrence_count += 1
            continue
        fk, pk = _orient(pair, stats, decisions)
        ind = InclusionDependency(
            fk=fk,
            pk=pk,
            origin="history",
            status="history-derived",
            occurrence_count=1,
        )
        ind.features = _posthoc_features(ind, merged, stats)
        ind.score = ind_score(ind.features)
        merged.append(ind)
        by_pair[key] = ind

    _reflag_multi_edges(merged)
    return merged


def _orient(
    pair: tuple[tuple[str, str], tuple[str, str]],
    stats: dict[tuple[str, str], ColumnStats],
    decisions: dict[str, PrimaryKeyDecision],
) -> tuple[tuple[str, str], tuple[str, str]]:
    a, b = pair
    a_in_pool = a[1] in decisions.get(a[0], PrimaryKeyDecision(a[0], None)).pool_columns()
    b_in_pool = b[1] in decisions.get(b[0], PrimaryKeyDecision(b[0], None)).pool_columns()
    if b_in_pool and not a_in_pool:
        return a, b
    if a_in_pool and not b_in_pool:
        return b, a
    a_distinct = stats[a].distinct if a in stats else 0
    b_distinct = stats[b].distinct if b in stats else 0
    return (a, b) if b_distinct >= a_distinct else (b, a)


def _posthoc_features(
    ind: InclusionDependency,
    existing: list[InclusionDependency],
    stats: dict[tuple[str, str], ColumnStats],
) -> FeatureVector:
    dep = 1 + sum(1 for other in existing if other.fk == ind.fk)
    refs = {}
    for other in existing:
        refs[other.pk] = refs.get(other.pk, 0) + 1
    refs[ind.pk] = refs.get(ind.pk, 0) + 1
    max_ref = max(refs.values())
    a_stats = stats.get(ind.fk)
    b_stats = stats.get(ind.pk)
    card = 0.0
    if a_stats and b_stats and b_stats.distinct:
        card = min(a_stats.distinct / b_stats.distinct, 1.0)
    a_name = normalize_name(ind.fk[1])
    b_name = normalize_name(ind.pk[1])
    return FeatureVector(
        card_ratio=card,
        mult_depend=1.0 / dep,
        mult_refs=refs[ind.pk] / max_ref,
        edit_distance=seq_match(a_name, b_name) / max(len(a_name), len(b_name), 1),
        typical_suffix=float(has_suffix(ind.fk[1], SUFFIXES)),
    )


def _reflag_multi_edges(inds: list[InclusionDependency]) -> None:
    active = [
        i
        for i in inds
        if i.status in ("adjudicated-accept", "confirmed", "history-derived", "user-defined")
    ]
    by_pair: dict[tuple[str, str], list[InclusionDependency]] = {}
    for i in active:
        by_pair.setdefault(i.table_pair(), []).append(i)
    for group in by_pair.values():
        group.sort(key=lambda c: (-c.score, c.id))
        for i, ind in enumerate(group):
            ind.default_edge = i == 0
            ind.multi_edge = i > 0
