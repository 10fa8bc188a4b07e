"""Inclusion-dependency candidate generation, scoring, and pruning.

A candidate (A -> B) means: every cleaned sampled value of column A is
present in the value set of key-pool column B of another table, and the
two columns have compatible types. Candidates are scored as the mean of
five normalized features and pruned by a threshold; survivors go to the
semantic adjudicator.

dep_count/ref_count are computed once over the pre-threshold candidate
set and frozen, so scores are reproducible regardless of what later
stages drop.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .adjudicate import AdjudicationRequest, Adjudicator
from .catalog import compatible
from .data import TableData
from .pk import KEY_SUFFIXES, ID_SUFFIXES, PrimaryKeyDecision, has_suffix, normalize_name, seq_match
from .profiler import ColumnStats, CleanedSample, draw_sample

log = logging.getLogger(__name__)

DEFAULT_THRESHOLD = 0.4
PK_FULL_VALUE_THRESHOLD = 1_000_000
SUFFIXES = ID_SUFFIXES + KEY_SUFFIXES


@dataclass
class FeatureVector:
    card_ratio: float
    mult_depend: float
    mult_refs: float
    edit_distance: float
    typical_suffix: float

    def as_tuple(self) -> tuple[float, ...]:
        return (
            self.card_ratio,
            self.mult_depend,
            self.mult_refs,
            self.edit_distance,
            self.typical_suffix,
        )

    def to_dict(self) -> dict:
        return {
            "card_ratio": self.card_ratio,
            "mult_depend": self.mult_depend,
            "mult_refs": self.mult_refs,
            "edit_distance": self.edit_distance,
            "typical_suffix": self.typical_suffix,
        }


@dataclass
class InclusionDependency:
    fk: tuple[str, str]  # (table, column)
    pk: tuple[str, str]
    features: Optional[FeatureVector] = None
    score: float = 0.0
    status: str = "candidate"
    origin: str = "statistical"  # statistical | declared | history | user
    default_edge: bool = False
    multi_edge: bool = False
    occurrence_count: int = 0
    rationale: str = ""
    fk_samples: list[str] = field(default_factory=list)
    pk_samples: list[str] = field(default_factory=list)

    @property
    def id(self) -> str:
        return f"{self.fk[0]}.{self.fk[1]}->{self.pk[0]}.{self.pk[1]}"

    def table_pair(self) -> tuple[str, str]:
        return tuple(sorted((self.fk[0], self.pk[0])))


def pk_value_array(
    table: TableData,
    column: str,
    full_threshold: int = PK_FULL_VALUE_THRESHOLD,
    sample_size: int = 1_000_000,
    seed: int = 0,
) -> np.ndarray:
    """Value set of a key-pool column: full below the threshold, sampled above.

    Containment against a sampled key set can yield false negatives; the
    sample is kept large so this only matters for extreme tables.
    """
    values = table.columns[column].non_null()
    if len(values) <= full_threshold:
        return values
    return draw_sample(values, sample_size, seed)


def contains_all(sample: np.ndarray, pk_values: np.ndarray) -> bool:
    if len(sample) == 0:
        return False
    if sample.dtype.kind == "O" or pk_values.dtype.kind == "O":
        return set(sample.tolist()) <= set(pk_values.tolist())
    if sample.dtype.kind == "M" or pk_values.dtype.kind == "M":
        sample = sample.astype("datetime64[ns]")
        pk_values = pk_values.astype("datetime64[ns]")
    return bool(np.isin(sample, pk_values).all())


def generate_candidates(
    tables: dict[str, TableData],
    stats: dict[tuple[str, str], ColumnStats],
    decisions: dict[str, PrimaryKeyDecision],
    samples: dict[tuple[str, str], CleanedSample],
    seed_inds: list[tuple[tuple[str, str], tuple[str, str]]] | None = None,
    pk_full_threshold: int = PK_FULL_VALUE_THRESHOLD,
    pk_sample_size: int = 1_000_000,
    seed: int = 0,
    excluded_pairs: set[tuple[str, str]] | None = None,
) -> list[InclusionDependency]:
    """Enumerate containment-backed IND candidates over key-pool targets.

    Every member of a table's key candidate pool is a target, not just the
    selected key. Declared FK seeds join the candidate set regardless of
    containment, marked origin=declared.
    """
    excluded_pairs = excluded_pairs or set()
    pool_columns: list[tuple[str, str]] = []
    for table_name, decision in decisions.items():
        for col in decision.pool_columns():
            pool_columns.append((table_name, col))

    pk_values: dict[tuple[str, str], np.ndarray] = {}
    for table_name, col in pool_columns:
        pk_values[(table_name, col)] = pk_value_array(
            tables[table_name], col, pk_full_threshold, pk_sample_size, seed
        )

    candidates: dict[tuple[tuple[str, str], tuple[str, str]], InclusionDependency] = {}
    for (a_table, a_col), sample in sorted(samples.items()):
        if a_col in decisions.get(a_table, PrimaryKeyDecision(a_table, None)).pool_columns():
            continue
        if len(sample.values) == 0:
            continue
        a_stats = stats[(a_table, a_col)]
        for b_table, b_col in pool_columns:
            if b_table == a_table:
                continue
            if tuple(sorted((a_table, b_table))) in excluded_pairs:
                continue
            b_stats = stats[(b_table, b_col)]
            if not compatible(a_stats.type_tag, b_stats.type_tag):
                continue
            if not contains_all(sample.values, pk_values[(b_table, b_col)]):
                continue
            ind = InclusionDependency(fk=(a_table, a_col), pk=(b_table, b_col))
            candidates[(ind.fk, ind.pk)] = ind

    for fk, pk in seed_inds or []:
        if tuple(sorted((fk[0], pk[0]))) in excluded_pairs:
            continue
        existing = candidates.get((fk, pk))
        if existing is not None:
            existing.origin = "declared"
        else:
            candidates[(fk, pk)] = InclusionDependency(fk=fk, pk=pk, origin="declared")

    return sorted(candidates.values(), key=lambda c: c.id)


def compute_features(
    candidates: list[InclusionDependency],
    stats: dict[tuple[str, str], ColumnStats],
) -> None:
    """Score every candidate in place over the frozen candidate set."""
    dep_count: dict[tuple[str, str], int] = {}
    ref_count: dict[tuple[str, str], int] = {}
    for c in candidates:
        dep_count[c.fk] = dep_count.get(c.fk, 0) + 1
        ref_count[c.pk] = ref_count.get(c.pk, 0) + 1
    max_ref = max(ref_count.values(), default=0)

    for c in candidates:
        a_stats = stats[c.fk]
        b_stats = stats[c.pk]
        card = min(a_stats.distinct / b_stats.distinct, 1.0) if b_stats.distinct else 0.0
        a_name = normalize_name(c.fk[1])
        b_name = normalize_name(c.pk[1])
        edit = seq_match(a_name, b_name) / max(len(a_name), len(b_name), 1)
        c.features = FeatureVector(
            card_ratio=card,
            mult_depend=1.0 / dep_count[c.fk],
            mult_refs=ref_count[c.pk] / max_ref if max_ref else 0.0,
            edit_distance=edit,
            typical_suffix=float(has_suffix(c.fk[1], SUFFIXES)),
        )
        c.score = ind_score(c.features)


def ind_score(features: FeatureVector, weights: tuple[float, ...] = (1, 1, 1, 1, 1)) -> float:
    """Weighted mean of the five features, normalized to [0, 1]."""
    total = sum(weights)
    return sum(w * f for w, f in zip(weights, features.as_tuple())) / total


def prune_by_threshold(
    candidates: list[InclusionDependency], threshold: float = DEFAULT_THRESHOLD
) -> list[InclusionDependency]:
    """Mark candidates below the threshold as pruned; return the survivors."""
    survivors = []
    for c in candidates:
        if c.score >= threshold:
            survivors.append(c)
        else:
            c.status = "pruned"
    return survivors


def finalize(
    survivors: list[InclusionDependency],
    adjudicator: Adjudicator,
    samples: dict[tuple[str, str], CleanedSample],
    tables: dict[str, TableData],
    sample_values_per_side: int = 20,
) -> list[InclusionDependency]:
    """Adjudicate survivors, batched per table pair, and flag multi-edges.

    Adjudicator failure is fail-open: the candidate keeps status=candidate
    with a warning so a human still sees it in review.
    """
    by_pair: dict[tuple[str, str], list[InclusionDependency]] = {}
    for c in survivors:
        by_pair.setdefault(c.table_pair(), []).append(c)

    accepted: list[InclusionDependency] = []
    for pair in sorted(by_pair):
        group = by_pair[pair]
        for c in group:
            # small previews carried into the output document for review
            c.fk_samples = _sample_preview(samples.get(c.fk), 5)
            c.pk_samples = _pk_preview(tables, c.pk, 5)
        requests = [
            AdjudicationRequest(
                candidate_id=c.id,
                fk_table=c.fk[0],
                fk_column=c.fk[1],
                pk_table=c.pk[0],
                pk_column=c.pk[1],
                fk_samples=_sample_preview(samples.get(c.fk), sample_values_per_side),
                pk_samples=_pk_preview(tables, c.pk, sample_values_per_side),
                features=c.features.to_dict() if c.features else {},
                score=c.score,
                origin=c.origin,
            )
            for c in group
        ]
        try:
            verdicts = adjudicator.judge(requests)
        except Exception as exc:
            log.warning("adjudication failed for pair %s: %s; keeping candidates", pair, exc)
            continue
        for c, verdict in zip(group, verdicts):
            if verdict.decision == "accept":
                c.status = "adjudicated-accept"
                c.rationale = verdict.rationale
                accepted.append(c)
            elif verdict.decision == "reject":
                c.status = "adjudicated-reject"
                c.rationale = verdict.rationale
            else:  # error verdict: fail open
                log.warning("adjudicator error for %s: %s", c.id, verdict.rationale)

    _flag_default_edges(accepted)
    return accepted


def _flag_default_edges(accepted: list[InclusionDependency]) -> None:
    by_pair: dict[tuple[str, str], list[InclusionDependency]] = {}
    for c in accepted:
        by_pair.setdefault(c.table_pair(), []).append(c)
    for group in by_pair.values():
        group.sort(key=lambda c: (-c.score, c.id))
        group[0].default_edge = True
        for other in group[1:]:
            other.multi_edge = True


def _sample_preview(sample: CleanedSample | None, n: int) -> list[str]:
    if sample is None:
        return []
    return [str(v) for v in sample.values[:n]]


def _pk_preview(tables: dict[str, TableData], pk: tuple[str, str], n: int) -> list[str]:
    table = tables.get(pk[0])
    if table is None or pk[1] not in table.columns:
        return []
    return [str(v) for v in table.columns[pk[1]].non_null()[:n]]
