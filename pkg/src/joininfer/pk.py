"""Primary key candidate filtering, scoring, and selection.

A column qualifies as a key candidate when its distinct count is within a
two-sided band around both its own row count and the most distinct column
of its table; the band is two-sided because sketch estimates can err in
either direction. Candidates are then scored on name affinity to the
table, distinct ratio, and conventional key suffixes, and a table either
gets a clear winner or a small pool of near-tied candidates.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from difflib import SequenceMatcher
from typing import Optional

from .profiler import ColumnStats

DEFAULT_X = 0.95
DEFAULT_POOL_RATIO = 0.9
DEFAULT_POOL_CAP = 3

ID_SUFFIXES = ("id",)
KEY_SUFFIXES = ("key", "nr")

_NON_ALNUM = re.compile(r"[^a-z0-9]+")


@dataclass
class ScoreWeights:
    name_distance: float = 1.0
    distinct_ratio: float = 1.0
    suffix_id: float = 1.0
    suffix_key: float = 0.5


@dataclass
class KeyCandidate:
    table: str
    column: str
    stats: ColumnStats
    name_distance: float
    distinct_ratio: float
    suffix_id: bool
    suffix_key: bool
    key_score: float
    origin: str = "statistical"  # statistical | declared | user


@dataclass
class PrimaryKeyDecision:
    table: str
    selected: Optional[str]
    pool: list[KeyCandidate] = field(default_factory=list)
    clear_winner: bool = False
    composite: Optional[tuple[str, ...]] = None  # declared/user composite key

    def pool_columns(self) -> list[str]:
        return [c.column for c in self.pool]


def normalize_name(name: str) -> str:
    return _NON_ALNUM.sub("", name.lower())


def seq_match(a: str, b: str) -> int:
    """Length of the longest common contiguous substring."""
    if not a or not b:
        return 0
    m = SequenceMatcher(None, a, b, autojunk=False).find_longest_match(0, len(a), 0, len(b))
    return m.size


def name_distance(table_name: str, column_name: str) -> float:
    """Affinity of a column name to its table name, in [0, 1]."""
    tn = normalize_name(table_name)
    cn = normalize_name(column_name)
    if not tn or not cn:
        return 0.0
    if cn in tn:
        return 1.0
    return seq_match(tn, cn) / len(tn)


def has_suffix(name: str, suffixes: tuple[str, ...]) -> bool:
    return normalize_name(name).endswith(suffixes)


def passes_filter(stats: ColumnStats, max_distinct: int, x: float) -> bool:
    """The five-condition candidate filter, re-checkable verbatim."""
    return (
        stats.count > 0
        and stats.distinct >= x * stats.count
        and stats.distinct <= (2 - x) * stats.count
        and stats.distinct >= x * max_distinct
        and stats.distinct <= (2 - x) * max_distinct
    )


def key_score(
    nd: float,
    distinct_ratio: float,
    suffix_id: bool,
    suffix_key: bool,
    weights: ScoreWeights = ScoreWeights(),
) -> float:
    return (
        weights.name_distance * nd
        + weights.distinct_ratio * distinct_ratio
        + weights.suffix_id * float(suffix_id)
        + weights.suffix_key * float(suffix_key)
    )


def find_key_candidates(
    table_stats: list[ColumnStats],
    x: float = DEFAULT_X,
    weights: ScoreWeights = ScoreWeights(),
) -> list[KeyCandidate]:
    """Filter and score key candidates for one table's columns."""
    if not table_stats:
        raise ValueError("no column stats supplied")
    max_distinct = max(s.distinct for s in table_stats)
    candidates = []
    for stats in table_stats:
        if not passes_filter(stats, max_distinct, x):
            continue
        candidates.append(make_candidate(stats, weights))
    return candidates


def make_candidate(
    stats: ColumnStats,
    weights: ScoreWeights = ScoreWeights(),
    origin: str = "statistical",
) -> KeyCandidate:
    nd = name_distance(stats.table, stats.column)
    # sketch overestimates can push distinct past count; clip for scoring
    ratio = min(stats.distinct / stats.count, 1.0) if stats.count else 0.0
    sid = has_suffix(stats.column, ID_SUFFIXES)
    skey = has_suffix(stats.column, KEY_SUFFIXES)
    return KeyCandidate(
        table=stats.table,
        column=stats.column,
        stats=stats,
        name_distance=nd,
        distinct_ratio=ratio,
        suffix_id=sid,
        suffix_key=skey,
        key_score=key_score(nd, ratio, sid, skey, weights),
        origin=origin,
    )


def select_primary_key(
    candidates: list[KeyCandidate],
    pool_ratio: float = DEFAULT_POOL_RATIO,
    pool_cap: int = DEFAULT_POOL_CAP,
    table: str = "",
) -> PrimaryKeyDecision:
    """Pick a clear winner, or keep a pool of near-tied candidates.

    The winner is clear iff no other candidate scores >= pool_ratio of the
    top score. Ties break on (score desc, shorter column name, name), so
    output is deterministic.
    """
    if not candidates:
        return PrimaryKeyDecision(table=table, selected=None, pool=[], clear_winner=False)
    ordered = sorted(
        candidates, key=lambda c: (-c.key_score, len(c.column), c.column)
    )
    table = table or ordered[0].table
    top = ordered[0].key_score
    contenders = [c for c in ordered if c.key_score >= pool_ratio * top]
    if len(contenders) == 1:
        return PrimaryKeyDecision(
            table=table, selected=ordered[0].column, pool=[ordered[0]], clear_winner=True
        )
    return PrimaryKeyDecision(
        table=table, selected=None, pool=contenders[:pool_cap], clear_winner=False
    )
