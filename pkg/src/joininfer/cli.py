"""Command-line entry points.

Every flag has a config-file equivalent (same JSON format as the other
artifacts); an explicit flag overrides the file, and the file overrides
the built-in defaults. All randomness flows from the single --seed value.
Failures exit nonzero with a distinct code per error family and a single
machine-parseable line on stderr.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .catalog import load_manifest
from .errors import (
    AdjudicationError,
    ConfigError,
    DataAccessError,
    FeedbackLogError,
    JoinInferError,
    ManifestError,
)
from .pipeline import RunConfig, run_inference, write_document

EXIT_CODES = {
    ConfigError: 2,
    ManifestError: 3,
    DataAccessError: 4,
    FeedbackLogError: 5,
    AdjudicationError: 6,
}


def _fail(exc: Exception) -> None:
    code = 1
    for cls, c in EXIT_CODES.items():
        if isinstance(exc, cls):
            code = c
            break
    kind = type(exc).__name__
    click.echo(f"error: {kind}: {exc}", err=True)
    sys.exit(code)


def _build_config(config_file: str | None, **flags) -> RunConfig:
    config = RunConfig()
    if config_file:
        try:
            raw = json.loads(Path(config_file).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config file {config_file}: {exc}") from exc
        if not isinstance(raw, dict):
            raise ConfigError("config file root must be an object")
        for key, value in raw.items():
            if not hasattr(config, key):
                raise ConfigError(f"unknown config key {key!r}")
            setattr(config, key, value)
    for key, value in flags.items():
        if value is not None:
            setattr(config, key, value)
    config.validate()
    return config


def _emit(payload: dict, output_format: str) -> None:
    if output_format == "structured":
        click.echo(json.dumps(payload, sort_keys=True, indent=2))
        return
    for line in _text_lines(payload):
        click.echo(line)


def _text_lines(payload: dict, prefix: str = "") -> list[str]:
    lines = []
    for key in payload:
        value = payload[key]
        if isinstance(value, dict):
            lines.append(f"{prefix}{key}:")
            lines.extend(_text_lines(value, prefix + "  "))
        elif isinstance(value, list):
            lines.append(f"{prefix}{key}: [{len(value)} items]")
        else:
            lines.append(f"{prefix}{key}: {value}")
    return lines


def _config_options(fn):
    opts = [
        click.option("--config", "config_file", type=click.Path(), default=None,
                     help="JSON config file; flags override it."),
        click.option("--x", type=float, default=None, help="key-filter width (default 0.95)"),
        click.option("--tau", type=float, default=None, help="IND score threshold (default 0.4)"),
        click.option("--sample-size", type=int, default=None, help="per-column sample size"),
        click.option("--seed", type=int, default=None, help="run seed"),
        click.option("--adjudicator", type=click.Choice(["stub", "remote"]), default=None),
        click.option("--exact-threshold", type=int, default=None,
                     help="row count above which distinct counts are sketched"),
        click.option("--output-dir", type=click.Path(), default=None),
        click.option("--stats-cache", type=click.Path(), default=None),
        click.option("--workers", type=int, default=None),
    ]
    for opt in reversed(opts):
        fn = opt(fn)
    return fn


@click.group()
def main() -> None:
    """Join inference over tabular datasets: keys, references, join paths."""


@main.command()
@click.option("--manifest", "manifest_path", required=True, type=click.Path())
@click.option("--output-format", type=click.Choice(["text", "structured"]), default="text")
@_config_options
def profile(manifest_path: str, output_format: str, config_file: str | None, **flags) -> None:
    """Profile all columns and populate the stats cache."""
    try:
        from .data import load_all
        from .pipeline import profile_tables

        config = _build_config(config_file, manifest_path=manifest_path, **flags)
        manifest = load_manifest(manifest_path)
        tables = load_all(manifest)
        stats = profile_tables(manifest, tables, config)
        payload = {
            "database": manifest.database_name,
            "columns": {
                f"{t}.{c}": st.to_dict() for (t, c), st in sorted(stats.items())
            },
        }
        _emit(payload, output_format)
    except JoinInferError as exc:
        _fail(exc)


@main.command()
@click.option("--manifest", "manifest_path", required=True, type=click.Path())
@click.option("--history-log", type=click.Path(), default=None,
              help="SQL query log to mine for join evidence")
@_config_options
def infer(manifest_path: str, history_log: str | None, config_file: str | None, **flags) -> None:
    """Run the full pipeline and write the join-graph document."""
    try:
        config = _build_config(config_file, manifest_path=manifest_path, **flags)
        manifest = load_manifest(manifest_path)
        result = run_inference(manifest, config, history_log=history_log)
        out = write_document(result.document, Path(config.output_dir) / "join_graph.json")
        click.echo(str(out))
    except JoinInferError as exc:
        _fail(exc)


@main.command()
@click.option("--manifest", "manifest_path", required=True, type=click.Path())
@click.option("--log", "history_log", required=True, type=click.Path())
@click.option("--output-format", type=click.Choice(["text", "structured"]), default="text")
@_config_options
def history(
    manifest_path: str, history_log: str, output_format: str,
    config_file: str | None, **flags,
) -> None:
    """Mine a SQL query log and consolidate evidence into the join graph."""
    try:
        config = _build_config(config_file, manifest_path=manifest_path, **flags)
        manifest = load_manifest(manifest_path)
        result = run_inference(manifest, config, history_log=history_log)
        write_document(result.document, Path(config.output_dir) / "join_graph.json")
        _emit(result.document.get("evidence", {}), output_format)
    except JoinInferError as exc:
        _fail(exc)


@main.command("eval")
@click.option("--manifest", "manifest_path", required=True, type=click.Path())
@click.option("--truth", "truth_path", required=True, type=click.Path())
@click.option("--output-format", type=click.Choice(["text", "structured"]), default="text")
@_config_options
def eval_cmd(
    manifest_path: str, truth_path: str, output_format: str,
    config_file: str | None, **flags,
) -> None:
    """Run inference and score it against a ground-truth constraint file."""
    try:
        from .evalharness import (
            GroundTruth,
            evaluate_joins,
            evaluate_pk,
            evaluation_report,
            write_metrics_csv,
        )

        config = _build_config(config_file, manifest_path=manifest_path, **flags)
        manifest = load_manifest(manifest_path)
        truth = GroundTruth.load(truth_path)
        result = run_inference(manifest, config)
        active = [
            i for i in result.accepted
            if i.status in ("adjudicated-accept", "confirmed", "history-derived", "user-defined")
        ]
        pk_report = evaluate_pk(result.decisions, truth)
        join_report = evaluate_joins(active, truth.fks)
        report = evaluation_report(pk_report, join_report)
        out_dir = Path(config.output_dir)
        write_metrics_csv(
            [
                {"metric": name, "value": getattr(rep, attr)}
                for name, rep, attr in [
                    ("pk_accuracy", pk_report, "accuracy"),
                    ("pk_precision", pk_report, "precision"),
                    ("pk_recall", pk_report, "recall"),
                    ("pk_f1", pk_report, "f1"),
                    ("pk_perfect_recall", pk_report, "perfect_recall"),
                    ("join_precision", join_report, "precision"),
                    ("join_recall", join_report, "recall"),
                    ("join_f1", join_report, "f1"),
                ]
            ],
            out_dir / "metrics.csv",
        )
        _emit(report, output_format)
    except JoinInferError as exc:
        _fail(exc)


@main.group()
def ablate() -> None:
    """Sensitivity studies over the score threshold or the sample size."""


@ablate.command("threshold")
@click.option("--manifest", "manifest_path", required=True, type=click.Path())
@click.option("--truth", "truth_path", required=True, type=click.Path())
@click.option("--output-format", type=click.Choice(["text", "structured"]), default="text")
@_config_options
def ablate_threshold_cmd(
    manifest_path: str, truth_path: str, output_format: str,
    config_file: str | None, **flags,
) -> None:
    """Survivor counts and metrics across a threshold grid."""
    try:
        from .evalharness import GroundTruth, ablate_threshold, write_metrics_csv

        config = _build_config(config_file, manifest_path=manifest_path, **flags)
        manifest = load_manifest(manifest_path)
        truth = GroundTruth.load(truth_path)
        result = run_inference(manifest, config)
        rows = ablate_threshold(result.candidates, truth.fks)
        write_metrics_csv(rows, Path(config.output_dir) / "threshold_ablation.csv")
        _emit({"rows": rows} if output_format == "text" else {"threshold_ablation": rows},
              output_format)
    except JoinInferError as exc:
        _fail(exc)


@ablate.command("sample")
@click.option("--manifest", "manifest_path", required=True, type=click.Path())
@click.option("--sizes", default="1,10,100,1000,10000,100000,1000000",
              help="comma-separated sample sizes")
@click.option("--output-format", type=click.Choice(["text", "structured"]), default="text")
@_config_options
def ablate_sample_cmd(
    manifest_path: str, sizes: str, output_format: str,
    config_file: str | None, **flags,
) -> None:
    """Candidate counts and scores per sample size, with convergence size."""
    try:
        from .data import load_all
        from .evalharness import ablate_sample_size

        config = _build_config(config_file, manifest_path=manifest_path, **flags)
        manifest = load_manifest(manifest_path)
        tables = load_all(manifest)
        size_list = [int(s) for s in sizes.split(",") if s.strip()]

        def run_at(size: int):
            cfg = _build_config(config_file, manifest_path=manifest_path, **flags)
            cfg.sample_size = size
            result = run_inference(manifest, cfg, tables=tables)
            return [c for c in result.candidates if c.status != "pruned"]

        payload = ablate_sample_size(run_at, size_list)
        _emit(payload, output_format)
    except JoinInferError as exc:
        _fail(exc)


@main.command()
@click.option("--manifest", "manifest_path", required=True, type=click.Path())
@click.option("--host", default="127.0.0.1")
@click.option("--port", type=int, default=8571)
@click.option("--feedback-log", type=click.Path(), default=None,
              help="NDJSON feedback log path (default <output-dir>/feedback.ndjson)")
@_config_options
def serve(
    manifest_path: str, host: str, port: int, feedback_log: str | None,
    config_file: str | None, **flags,
) -> None:
    """Run the HTTP review service over the join graph."""
    try:
        from .service import serve as run_service

        config = _build_config(config_file, manifest_path=manifest_path, **flags)
        out_dir = Path(config.output_dir)
        log_path = Path(feedback_log) if feedback_log else out_dir / "feedback.ndjson"
        run_service(
            manifest_path,
            config,
            log_path=log_path,
            graph_path=out_dir / "join_graph.json",
            host=host,
            port=port,
        )
    except JoinInferError as exc:
        _fail(exc)


if __name__ == "__main__":
    main()
