"""End-to-end inference run: manifest -> join-graph document.

The document is a versioned JSON artifact carrying the per-table key
decisions, every IND candidate with features/score/status/origin, the
generated join paths, and a query-history evidence summary. Serialization
is canonical (sorted keys, fixed indentation), so identical config + seed
yields byte-identical documents.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from . import kernels
from .adjudicate import Adjudicator, RemoteAdjudicator, StubAdjudicator
from .catalog import SchemaManifest, bootstrap_constraints, estimate_candidates, load_manifest
from .data import TableData, file_digest, load_all
from .errors import ConfigError
from .history import ParseResult, bind, consolidate, parse_queries, validate_join
from .ind import (
    InclusionDependency,
    compute_features,
    finalize,
    generate_candidates,
    prune_by_threshold,
)
from .jointree import generate_join_paths
from .pk import (
    PrimaryKeyDecision,
    ScoreWeights,
    find_key_candidates,
    make_candidate,
    select_primary_key,
)
from .profiler import ColumnStats, CleanedSample, StatsCache, profile_column, sample_column

log = logging.getLogger(__name__)

DOCUMENT_VERSION = 1


@dataclass
class RunConfig:
    manifest_path: str = ""
    x: float = 0.95
    tau: float = 0.4
    sample_size: int = 1_000_000
    seed: int = 0
    adjudicator: str = "stub"  # stub | remote
    exact_threshold: int = 1_000_000
    sketch_precision: int = 14
    pool_ratio: float = 0.9
    pool_cap: int = 3
    numeric_fence: float = 1.5
    string_fence: float = 0.0
    blackhole_min_in: int = 2
    max_hops: int = 8
    output_dir: str = "out"
    stats_cache: Optional[str] = None
    remote_endpoint: str = ""
    remote_model: str = ""
    workers: int = 0  # 0 = sequential

    def validate(self) -> None:
        if not (0 < self.x <= 1):
            raise ConfigError(f"x must be in (0, 1], got {self.x}")
        if not (0 <= self.tau <= 1):
            raise ConfigError(f"tau must be in [0, 1], got {self.tau}")
        if self.sample_size < 1:
            raise ConfigError(f"sample size must be >= 1, got {self.sample_size}")
        if self.adjudicator not in ("stub", "remote"):
            raise ConfigError(f"unknown adjudicator mode {self.adjudicator!r}")

    def make_adjudicator(self) -> Adjudicator:
        if self.adjudicator == "remote":
            return RemoteAdjudicator(
                endpoint=self.remote_endpoint,
                model=self.remote_model,
                audit_path=Path(self.output_dir) / "adjudication_audit.ndjson",
            )
        return StubAdjudicator()

    def echo(self) -> dict:
        fields = (
            "x", "tau", "sample_size", "seed", "adjudicator", "exact_threshold",
            "sketch_precision", "pool_ratio", "pool_cap", "numeric_fence",
            "string_fence", "blackhole_min_in", "max_hops",
        )
        return {k: getattr(self, k) for k in fields}


@dataclass
class FeedbackState:
    """Replay product of the feedback log, consumed by retraining."""

    confirmed: set[str] = field(default_factory=set)  # ind ids
    rejected: set[str] = field(default_factory=set)
    user_inds: list[InclusionDependency] = field(default_factory=list)
    composite_keys: dict[str, tuple[str, ...]] = field(default_factory=dict)
    # previously accepted INDs carried into an incremental run whose table
    # pairs are no longer re-generated
    carry_forward: list[InclusionDependency] = field(default_factory=list)

    def confirmed_pairs(self, inds_by_id: dict[str, InclusionDependency]) -> set[tuple[str, str]]:
        pairs = set()
        for ind_id in self.confirmed:
            ind = inds_by_id.get(ind_id)
            if ind is not None:
                pairs.add(ind.table_pair())
        return pairs


@dataclass
class PipelineResult:
    manifest: SchemaManifest
    tables: dict[str, TableData]
    stats: dict[tuple[str, str], ColumnStats]
    decisions: dict[str, PrimaryKeyDecision]
    samples: dict[tuple[str, str], CleanedSample]
    candidates: list[InclusionDependency]
    accepted: list[InclusionDependency]
    document: dict


def column_seed(seed: int, table: str, column: str) -> int:
    """Stable per-column sampling seed derived from the run seed."""
    return (seed ^ kernels.fnv1a64(f"{table}.{column}".encode("utf-8"))) & 0x7FFFFFFFFFFF


def profile_tables(
    manifest: SchemaManifest,
    tables: dict[str, TableData],
    config: RunConfig,
) -> dict[tuple[str, str], ColumnStats]:
    """Profile all columns, via the stats cache when one is configured."""
    cache = StatsCache(config.stats_cache) if config.stats_cache else None
    digests: dict[str, str] = {}
    if cache is not None:
        for decl in manifest.tables:
            if decl.data_source:
                digests[decl.name] = file_digest(manifest.data_path(decl))
    stats: dict[tuple[str, str], ColumnStats] = {}
    for name in sorted(tables):
        digest = digests.get(name, "")
        for col in tables[name].columns.values():
            cached = cache.get(name, col.column, digest) if cache and digest else None
            if cached is not None:
                stats[(name, col.column)] = cached
                continue
            st = profile_column(col, config.exact_threshold, config.sketch_precision)
            stats[(name, col.column)] = st
            if cache is not None and digest:
                cache.put(st, digest)
    if cache is not None:
        cache.save()
    return stats


def decide_primary_keys(
    manifest: SchemaManifest,
    stats: dict[tuple[str, str], ColumnStats],
    config: RunConfig,
    composite_overrides: dict[str, tuple[str, ...]] | None = None,
) -> dict[str, PrimaryKeyDecision]:
    """Per-table key decisions; declared keys win but stay scored in the pool."""
    weights = ScoreWeights()
    decisions: dict[str, PrimaryKeyDecision] = {}
    for decl in manifest.tables:
        table_stats = [stats[(decl.name, c)] for c, _ in decl.columns]
        candidates = find_key_candidates(table_stats, config.x, weights)
        declared = decl.declared_pk if decl.declared_pk else []
        if len(declared) == 1:
            in_pool = {c.column: c for c in candidates}
            if declared[0] in in_pool:
                in_pool[declared[0]].origin = "declared"
            else:
                # declared keys bypass the statistical filter but stay scored
                candidates.append(
                    make_candidate(stats[(decl.name, declared[0])], weights, origin="declared")
                )
        decision = select_primary_key(candidates, config.pool_ratio, config.pool_cap, decl.name)
        if len(declared) == 1:
            declared_cand = next(c for c in candidates if c.column == declared[0])
            pool = [declared_cand] + [c for c in decision.pool if c.column != declared[0]]
            decision = PrimaryKeyDecision(
                table=decl.name,
                selected=declared[0],
                pool=pool[: config.pool_cap],
                clear_winner=True,
            )
        composite: Optional[tuple[str, ...]] = None
        if len(declared) > 1:
            composite = tuple(declared)
        if composite_overrides and decl.name in composite_overrides:
            composite = composite_overrides[decl.name]
        if composite is not None:
            # the declared combination is the key; no single-column pool,
            # so none of these columns becomes an IND target on its own
            decision = PrimaryKeyDecision(
                table=decl.name, selected=None, pool=[], clear_winner=False,
                composite=composite,
            )
        decisions[decl.name] = decision
    return decisions


def draw_all_samples(
    tables: dict[str, TableData],
    decisions: dict[str, PrimaryKeyDecision],
    config: RunConfig,
) -> dict[tuple[str, str], CleanedSample]:
    """Cleaned samples for every non-key-pool column."""
    samples: dict[tuple[str, str], CleanedSample] = {}
    for name in sorted(tables):
        pool = set(decisions[name].pool_columns()) if name in decisions else set()
        for col_name in sorted(tables[name].columns):
            if col_name in pool:
                continue
            samples[(name, col_name)] = sample_column(
                tables[name].columns[col_name],
                config.sample_size,
                column_seed(config.seed, name, col_name),
                config.numeric_fence,
                config.string_fence,
            )
    return samples


def run_inference(
    manifest: SchemaManifest,
    config: RunConfig,
    tables: dict[str, TableData] | None = None,
    feedback: FeedbackState | None = None,
    incremental: bool = False,
    history_log: str | None = None,
    adjudicator: Adjudicator | None = None,
) -> PipelineResult:
    """Full pipeline: profile, keys, INDs, adjudication, paths, document."""
    config.validate()
    feedback = feedback or FeedbackState()
    tables = tables if tables is not None else load_all(manifest)
    stats = profile_tables(manifest, tables, config)

    _, seed_inds = bootstrap_constraints(manifest)
    decisions = decide_primary_keys(manifest, stats, config, feedback.composite_keys)
    samples = draw_all_samples(tables, decisions, config)

    excluded: set[tuple[str, str]] = set()
    if incremental:
        for ind_id in feedback.confirmed:
            parts = _pair_from_id(ind_id)
            if parts:
                excluded.add(parts)

    candidates = generate_candidates(
        tables,
        stats,
        decisions,
        samples,
        seed_inds=seed_inds,
        pk_sample_size=config.sample_size,
        seed=config.seed,
        excluded_pairs=excluded,
    )
    compute_features(candidates, stats)
    survivors = prune_by_threshold(candidates, config.tau)
    judge = adjudicator if adjudicator is not None else config.make_adjudicator()
    accepted = finalize(survivors, judge, samples, tables)

    evidence_summary: dict = {}
    if history_log:
        text = Path(history_log).read_text(encoding="utf-8")
        result = parse_queries(text)
        bind(result.evidence, manifest)
        for ev in result.evidence:
            validate_join(ev, tables)
        merged = consolidate(accepted, result.evidence, stats, decisions)
        accepted = merged
        evidence_summary = summarize_evidence(result)

    if incremental:
        present = {i.id for i in candidates} | {i.id for i in accepted}
        for prior in feedback.carry_forward:
            if prior.id not in present:
                accepted.append(prior)

    # re-apply human feedback on top of fresh statistical statuses
    for ind in candidates + [i for i in accepted if i not in candidates]:
        if ind.id in feedback.rejected:
            ind.status = "rejected"
        elif ind.id in feedback.confirmed:
            ind.status = "confirmed"
    known_ids = {i.id for i in candidates} | {i.id for i in accepted}
    for user_ind in feedback.user_inds:
        if user_ind.id not in known_ids:
            accepted.append(user_ind)

    active = [
        i
        for i in accepted
        if i.status in ("adjudicated-accept", "confirmed", "history-derived", "user-defined")
    ]
    paths = generate_join_paths(
        active,
        blackhole_min_in=config.blackhole_min_in,
        max_hops=config.max_hops,
        all_tables=manifest.table_names(),
    )

    all_inds = candidates + [i for i in accepted if i not in candidates]
    document = {
        "version": DOCUMENT_VERSION,
        "database": manifest.database_name,
        "config": config.echo(),
        "estimated_candidates": estimate_candidates(manifest),
        "pk_decisions": [decision_dict(decisions[t]) for t in sorted(decisions)],
        "inds": [ind_dict(i) for i in sorted(all_inds, key=lambda i: i.id)],
        "join_paths": [p.to_dict() for p in paths],
        "evidence": evidence_summary,
        "composite_keys": {
            t: list(cols)
            for t, cols in sorted(
                {
                    **{
                        d.table: d.composite
                        for d in decisions.values()
                        if d.composite
                    },
                    **feedback.composite_keys,
                }.items()
            )
        },
    }
    return PipelineResult(
        manifest=manifest,
        tables=tables,
        stats=stats,
        decisions=decisions,
        samples=samples,
        candidates=candidates,
        accepted=accepted,
        document=document,
    )


def _pair_from_id(ind_id: str) -> Optional[tuple[str, str]]:
    try:
        fk, pk = ind_id.split("->")
        return tuple(sorted((fk.rsplit(".", 1)[0], pk.rsplit(".", 1)[0])))
    except ValueError:
        return None


def summarize_evidence(result: ParseResult) -> dict:
    counts = {"valid": 0, "invalid": 0, "unresolved": 0, "unchecked": 0}
    for ev in result.evidence:
        counts[ev.validated] = counts.get(ev.validated, 0) + 1
    return {
        "statements_parsed": result.parsed,
        "statements_skipped": result.skipped,
        "predicates": len(result.evidence),
        "by_validation": counts,
        "records": [
            {
                "left": f"{ev.left.table or ev.left.qualifier or '?'}.{ev.left.column}",
                "right": f"{ev.right.table or ev.right.qualifier or '?'}.{ev.right.column}",
                "query_index": ev.source_query_index,
                "qualified": ev.qualified,
                "validated": ev.validated,
                "occurrences": ev.occurrence_count,
                "reason": ev.reason,
            }
            for ev in result.evidence
        ],
    }


def decision_dict(decision: PrimaryKeyDecision) -> dict:
    return {
        "table": decision.table,
        "selected": decision.selected,
        "clear_winner": decision.clear_winner,
        "composite": list(decision.composite) if decision.composite else None,
        "pool": [
            {
                "column": c.column,
                "key_score": round(c.key_score, 9),
                "name_distance": round(c.name_distance, 9),
                "distinct_ratio": round(c.distinct_ratio, 9),
                "suffix_id": c.suffix_id,
                "suffix_key": c.suffix_key,
                "origin": c.origin,
            }
            for c in decision.pool
        ],
    }


def ind_dict(ind: InclusionDependency) -> dict:
    return {
        "id": ind.id,
        "fk": list(ind.fk),
        "pk": list(ind.pk),
        "features": ind.features.to_dict() if ind.features else None,
        "score": round(ind.score, 9),
        "status": ind.status,
        "origin": ind.origin,
        "default_edge": ind.default_edge,
        "multi_edge": ind.multi_edge,
        "occurrence_count": ind.occurrence_count,
        "rationale": ind.rationale,
        "fk_samples": list(ind.fk_samples),
        "pk_samples": list(ind.pk_samples),
    }


def render_document(document: dict) -> str:
    return json.dumps(document, sort_keys=True, indent=2) + "\n"


def write_document(document: dict, path: str | Path) -> Path:
    """Atomic write so a failed run never clobbers the previous graph."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text(render_document(document), encoding="utf-8")
    tmp.replace(path)
    return path


def run_from_config(config: RunConfig, **kwargs) -> PipelineResult:
    manifest = load_manifest(config.manifest_path)
    return run_inference(manifest, config, **kwargs)
