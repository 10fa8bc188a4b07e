"""HTTP review service over the join-graph document.

State is the pure replay product of an append-only NDJSON feedback log:
every confirm/reject/override/composite definition is appended durably
before it is acknowledged, and a restart reconstructs exactly the same
state from the log. Per-IND status conflicts resolve last-writer-wins by
log order. Retraining runs as a single background job; the new graph
document replaces the old one atomically only on success.
"""

from __future__ import annotations

import json
import logging
import threading
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel

from .catalog import SchemaManifest, load_manifest
from .errors import FeedbackLogError
from .ind import FeatureVector, InclusionDependency
from .pipeline import (
    FeedbackState,
    RunConfig,
    ind_dict,
    run_inference,
    write_document,
)

log = logging.getLogger(__name__)

ACTIONS = ("confirm", "reject", "override", "define-composite")


@dataclass
class FeedbackRecord:
    action: str
    ind_id: str = ""
    payload: dict = field(default_factory=dict)
    timestamp: str = ""
    actor: str = "anonymous"

    def __post_init__(self) -> None:
        if self.action not in ACTIONS:
            raise FeedbackLogError(f"unknown action {self.action!r}")
        if self.action in ("override", "define-composite") and not self.payload:
            raise FeedbackLogError(f"action {self.action!r} requires a payload")
        if not self.timestamp:
            self.timestamp = datetime.now(timezone.utc).isoformat()


class FeedbackLog:
    """Append-only NDJSON persistence for feedback records."""

    def __init__(self, path: str | Path):
        self.path = Path(path)

    def append(self, record: FeedbackRecord) -> None:
        self.path.parent.mkdir(parents=True, exist_ok=True)
        line = json.dumps(asdict(record), sort_keys=True)
        with open(self.path, "a", encoding="utf-8") as fh:
            fh.write(line + "\n")
            fh.flush()

    def replay(self) -> list[FeedbackRecord]:
        if not self.path.exists():
            return []
        records = []
        with open(self.path, "r", encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.strip()
                if not line:
                    continue
                try:
                    raw = json.loads(line)
                    records.append(FeedbackRecord(**raw))
                except (json.JSONDecodeError, TypeError, FeedbackLogError) as exc:
                    raise FeedbackLogError(
                        f"corrupt feedback log {self.path}: record at line {lineno}: {exc}"
                    ) from exc
        return records


def ind_from_dict(entry: dict) -> InclusionDependency:
    features = (
        FeatureVector(**entry["features"]) if entry.get("features") else None
    )
    return InclusionDependency(
        fk=tuple(entry["fk"]),
        pk=tuple(entry["pk"]),
        features=features,
        score=entry.get("score", 0.0),
        status=entry.get("status", "candidate"),
        origin=entry.get("origin", "statistical"),
        default_edge=entry.get("default_edge", False),
        multi_edge=entry.get("multi_edge", False),
        occurrence_count=entry.get("occurrence_count", 0),
        rationale=entry.get("rationale", ""),
    )


def state_from_records(records: list[FeedbackRecord]) -> FeedbackState:
    """Fold the log into a FeedbackState; last writer wins per IND id."""
    last_action: dict[str, FeedbackRecord] = {}
    user_inds: dict[str, InclusionDependency] = {}
    composites: dict[str, tuple[str, ...]] = {}
    for rec in records:
        if rec.action == "define-composite":
            composites[rec.payload["table"]] = tuple(rec.payload["columns"])
            continue
        if rec.action == "override":
            ind = InclusionDependency(
                fk=(rec.payload["fk_table"], rec.payload["fk_column"]),
                pk=(rec.payload["pk_table"], rec.payload["pk_column"]),
                score=1.0,
                status="user-defined",
                origin="user",
                rationale=f"defined by {rec.actor}",
            )
            user_inds[ind.id] = ind
            last_action[ind.id] = rec
            continue
        last_action[rec.ind_id] = rec

    state = FeedbackState(composite_keys=composites)
    for ind_id, rec in last_action.items():
        if rec.action == "confirm":
            state.confirmed.add(ind_id)
        elif rec.action == "reject":
            state.rejected.add(ind_id)
        elif rec.action == "override":
            state.user_inds.append(user_inds[ind_id])
    state.user_inds.sort(key=lambda i: i.id)
    return state


class JoinBody(BaseModel):
    fk_table: str
    fk_column: str
    pk_table: str
    pk_column: str
    actor: str = "anonymous"


class CompositeBody(BaseModel):
    table: str
    columns: list[str]
    actor: str = "anonymous"


class ActorBody(BaseModel):
    actor: str = "anonymous"


class ReviewService:
    """In-process service core; the FastAPI app is a thin shell over it."""

    def __init__(
        self,
        manifest: SchemaManifest,
        config: RunConfig,
        log_path: str | Path,
        graph_path: str | Path,
    ):
        self.manifest = manifest
        self.config = config
        self.feedback_log = FeedbackLog(log_path)
        self.graph_path = Path(graph_path)
        self.records = self.feedback_log.replay()  # raises on corruption
        self.document: Optional[dict] = None
        self._write_lock = threading.Lock()
        self._train_lock = threading.Lock()
        self._train_thread: Optional[threading.Thread] = None
        self.train_status: dict = {"state": "idle", "mode": None, "error": None, "runs": 0}
        if self.graph_path.exists():
            self.document = json.loads(self.graph_path.read_text(encoding="utf-8"))
        else:
            self._train("full")

    # -- state ---------------------------------------------------------------

    def feedback_state(self, carry_forward: bool = False) -> FeedbackState:
        state = state_from_records(self.records)
        if carry_forward and self.document is not None:
            confirmed_pairs = {
                p for p in (_pair_of(i) for i in state.confirmed) if p is not None
            }
            for entry in self.document.get("inds", []):
                ind = ind_from_dict(entry)
                if (
                    ind.table_pair() in confirmed_pairs
                    and (
                        ind.id in state.confirmed
                        or ind.status
                        in ("adjudicated-accept", "confirmed", "history-derived", "user-defined")
                    )
                    and ind.id not in state.rejected
                ):
                    state.carry_forward.append(ind)
        return state

    def known_ind_ids(self) -> set[str]:
        if self.document is None:
            return set()
        return {e["id"] for e in self.document.get("inds", [])}

    def graph_view(self) -> dict:
        """Current document with feedback statuses and the excluded set applied."""
        if self.document is None:
            raise HTTPException(status_code=503, detail="no join graph available yet")
        state = state_from_records(self.records)
        doc = json.loads(json.dumps(self.document))  # deep copy
        known = set()
        for entry in doc.get("inds", []):
            known.add(entry["id"])
            if entry["id"] in state.rejected:
                entry["status"] = "rejected"
            elif entry["id"] in state.confirmed:
                entry["status"] = "confirmed"
        for ind in state.user_inds:
            if ind.id not in known:
                doc.setdefault("inds", []).append(ind_dict(ind))
        excluded = sorted(
            {p for p in (_pair_of(i) for i in state.confirmed) if p is not None}
        )
        doc["excluded_pairs"] = [list(p) for p in excluded]
        doc["composite_keys"] = {
            **doc.get("composite_keys", {}),
            **{t: list(c) for t, c in state.composite_keys.items()},
        }
        return doc

    # -- feedback ------------------------------------------------------------

    def apply(self, record: FeedbackRecord) -> dict:
        with self._write_lock:
            if record.action in ("confirm", "reject") and record.ind_id not in self.known_ind_ids():
                raise HTTPException(status_code=404, detail=f"unknown IND id {record.ind_id!r}")
            if record.action == "override":
                self._check_columns(record.payload)
            if record.action == "define-composite":
                table = record.payload.get("table", "")
                cols = record.payload.get("columns", [])
                try:
                    decl = self.manifest.table(table)
                except KeyError:
                    raise HTTPException(status_code=404, detail=f"unknown table {table!r}") from None
                names = {c for c, _ in decl.columns}
                missing = [c for c in cols if c not in names]
                if len(cols) < 2 or missing:
                    raise HTTPException(
                        status_code=422,
                        detail=f"malformed composite definition for {table!r}: "
                        f"need >=2 existing columns, unknown {missing}",
                    )
            self.feedback_log.append(record)  # durable before acknowledgement
            self.records.append(record)
        return {"ok": True, "ind_id": record.ind_id, "action": record.action}

    def _check_columns(self, payload: dict) -> None:
        for side in ("fk", "pk"):
            table = payload.get(f"{side}_table", "")
            column = payload.get(f"{side}_column", "")
            try:
                decl = self.manifest.table(table)
            except KeyError:
                raise HTTPException(status_code=404, detail=f"unknown table {table!r}") from None
            if column not in {c for c, _ in decl.columns}:
                raise HTTPException(
                    status_code=404, detail=f"unknown column {table}.{column}"
                )

    # -- training ------------------------------------------------------------

    def start_training(self, mode: str) -> dict:
        if mode not in ("full", "incremental"):
            raise HTTPException(status_code=422, detail=f"unknown mode {mode!r}")
        if not self._train_lock.acquire(blocking=False):
            raise HTTPException(status_code=409, detail="a training run is already in progress")
        try:
            self.train_status = {
                "state": "running", "mode": mode, "error": None,
                "runs": self.train_status["runs"],
            }
            thread = threading.Thread(target=self._train_job, args=(mode,), daemon=True)
            self._train_thread = thread
            thread.start()
        except BaseException:
            self._train_lock.release()
            raise
        return {"ok": True, "mode": mode, "state": "running"}

    def _train_job(self, mode: str) -> None:
        try:
            self._train(mode)
            self.train_status = {
                "state": "done", "mode": mode, "error": None,
                "runs": self.train_status["runs"] + 1,
            }
        except Exception as exc:  # prior graph stays intact
            log.exception("training failed")
            self.train_status = {
                "state": "failed", "mode": mode, "error": str(exc),
                "runs": self.train_status["runs"],
            }
        finally:
            self._train_lock.release()

    def _train(self, mode: str) -> None:
        incremental = mode == "incremental"
        state = self.feedback_state(carry_forward=incremental)
        result = run_inference(
            self.manifest,
            self.config,
            feedback=state,
            incremental=incremental,
        )
        with self._write_lock:
            write_document(result.document, self.graph_path)
            self.document = result.document

    def wait_for_training(self, timeout: float = 300.0) -> None:
        thread = self._train_thread
        if thread is not None:
            thread.join(timeout)

    # -- reports -------------------------------------------------------------

    def history_report(self) -> dict:
        if self.document is None:
            raise HTTPException(status_code=503, detail="no join graph available yet")
        return self.document.get("evidence") or {
            "statements_parsed": 0,
            "statements_skipped": 0,
            "predicates": 0,
            "by_validation": {},
            "records": [],
        }


def _pair_of(ind_id: str) -> Optional[tuple[str, str]]:
    try:
        fk, pk = ind_id.split("->")
        return tuple(sorted((fk.rsplit(".", 1)[0], pk.rsplit(".", 1)[0])))
    except ValueError:
        return None


def create_app(
    manifest_path: str | Path,
    config: RunConfig,
    log_path: str | Path,
    graph_path: str | Path,
) -> FastAPI:
    manifest = load_manifest(manifest_path)
    core = ReviewService(manifest, config, log_path, graph_path)
    app = FastAPI(title="join review service")
    app.state.core = core

    @app.get("/graph")
    def get_graph() -> dict:
        return core.graph_view()

    @app.get("/tables")
    def get_tables() -> dict:
        return {
            "database": manifest.database_name,
            "tables": [
                {
                    "name": t.name,
                    "columns": [{"name": c, "type": tag.value} for c, tag in t.columns],
                    "declared_pk": list(t.declared_pk) if t.declared_pk else None,
                }
                for t in manifest.tables
            ],
        }

    @app.post("/joins/{ind_id:path}/confirm")
    def confirm(ind_id: str, body: ActorBody | None = None) -> dict:
        actor = body.actor if body else "anonymous"
        return core.apply(FeedbackRecord(action="confirm", ind_id=ind_id, actor=actor))

    @app.post("/joins/{ind_id:path}/reject")
    def reject(ind_id: str, body: ActorBody | None = None) -> dict:
        actor = body.actor if body else "anonymous"
        return core.apply(FeedbackRecord(action="reject", ind_id=ind_id, actor=actor))

    @app.post("/joins")
    def user_join(body: JoinBody) -> dict:
        payload = body.model_dump()
        actor = payload.pop("actor")
        ind_id = (
            f"{body.fk_table}.{body.fk_column}->{body.pk_table}.{body.pk_column}"
        )
        return core.apply(
            FeedbackRecord(action="override", ind_id=ind_id, payload=payload, actor=actor)
        )

    @app.post("/composite-keys")
    def composite(body: CompositeBody) -> dict:
        payload = body.model_dump()
        actor = payload.pop("actor")
        return core.apply(
            FeedbackRecord(action="define-composite", payload=payload, actor=actor)
        )

    @app.post("/train")
    def train(mode: str = "full") -> dict:
        return core.start_training(mode)

    @app.get("/train/status")
    def train_status() -> dict:
        return core.train_status

    @app.get("/history-report")
    def history_report() -> dict:
        return core.history_report()

    return app


def serve(
    manifest_path: str | Path,
    config: RunConfig,
    log_path: str | Path,
    graph_path: str | Path,
    host: str = "127.0.0.1",
    port: int = 8571,
) -> None:
    import uvicorn

    app = create_app(manifest_path, config, log_path, graph_path)
    uvicorn.run(app, host=host, port=port, log_level="warning")
