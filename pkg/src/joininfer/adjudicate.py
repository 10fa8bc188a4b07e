"""Semantic adjudication of IND candidates.

Two implementations of the same judge interface: a deterministic
rule-based stub so the whole pipeline runs offline and reproducibly, and
a remote HTTP client for a hosted language model. The stub's rule table
is intentionally simple and documented so evaluation numbers computed
with it are interpretable.
"""

from __future__ import annotations

import json
import os
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Protocol

import requests

from .errors import UnresolvedBindingError
from .pk import normalize_name, seq_match

MAX_BATCH = 16


@dataclass
class AdjudicationRequest:
    candidate_id: str
    fk_table: str
    fk_column: str
    pk_table: str
    pk_column: str
    fk_samples: list[str] = field(default_factory=list)
    pk_samples: list[str] = field(default_factory=list)
    features: dict = field(default_factory=dict)
    score: float = 0.0
    origin: str = "statistical"

    def to_dict(self) -> dict:
        return self.__dict__.copy()


@dataclass
class Verdict:
    decision: str  # accept | reject | error
    confidence: float
    rationale: str = ""

    def __post_init__(self):
        if self.decision == "reject" and not self.rationale:
            raise ValueError("reject verdicts must carry a rationale")


class Adjudicator(Protocol):
    def judge(self, batch: list[AdjudicationRequest]) -> list[Verdict]: ...


def _stem(table_name: str) -> str:
    stem = normalize_name(table_name)
    return stem[:-1] if stem.endswith("s") else stem


class StubAdjudicator:
    """Deterministic rule-based judge for offline and test use.

    Accept iff the names look related (edit-distance feature >= 0.5, or
    the FK column name contains the PK table's stem, or the candidate was
    declared/user-provided) and the cardinality ratio is not degenerate
    (>= 0.1). Everything else is rejected with a reason.
    """

    edit_threshold = 0.5
    card_threshold = 0.1

    def judge(self, batch: list[AdjudicationRequest]) -> list[Verdict]:
        if not batch:
            raise ValueError("empty adjudication batch")
        return [self._judge_one(req) for req in batch]

    def _judge_one(self, req: AdjudicationRequest) -> Verdict:
        edit = req.features.get("edit_distance", 0.0)
        card = req.features.get("card_ratio", 0.0)
        stem = _stem(req.pk_table)
        name_affinity = (
            edit >= self.edit_threshold
            or (stem and stem in normalize_name(req.fk_column))
            or req.origin in ("declared", "user")
        )
        if not name_affinity:
            return Verdict(
                decision="reject",
                confidence=0.8,
                rationale=(
                    f"no name affinity between {req.fk_column!r} and "
                    f"{req.pk_table}.{req.pk_column}: same value domain does not "
                    f"imply the same meaning"
                ),
            )
        if card < self.card_threshold:
            return Verdict(
                decision="reject",
                confidence=0.7,
                rationale=(
                    f"cardinality ratio {card:.3f} too low for a plausible "
                    f"reference from {req.fk_column!r}"
                ),
            )
        return Verdict(decision="accept", confidence=0.9, rationale="name and cardinality agree")


_PROMPT_RESOURCE = Path(__file__).parent / "resources" / "adjudicator_prompt.txt"


class RemoteAdjudicator:
    """HTTP client for a hosted judge model.

    Requests go out in batches of at most MAX_BATCH with temperature 0 and
    bounded retries; full request/response transcripts are appended to an
    audit file. The API key comes from the environment, never from config.
    """

    def __init__(
        self,
        endpoint: str,
        model: str,
        api_key_env: str = "JOININFER_API_KEY",
        timeout: float = 30.0,
        max_retries: int = 2,
        audit_path: str | Path | None = None,
    ):
        self.endpoint = endpoint
        self.model = model
        self.api_key = os.environ.get(api_key_env, "")
        self.timeout = timeout
        self.max_retries = max_retries
        self.audit_path = Path(audit_path) if audit_path else None
        self.prompt_template = _PROMPT_RESOURCE.read_text(encoding="utf-8")

    def judge(self, batch: list[AdjudicationRequest]) -> list[Verdict]:
        if not batch:
            raise ValueError("empty adjudication batch")
        verdicts: list[Verdict] = []
        for start in range(0, len(batch), MAX_BATCH):
            verdicts.extend(self._judge_chunk(batch[start : start + MAX_BATCH]))
        return verdicts

    def _judge_chunk(self, chunk: list[AdjudicationRequest]) -> list[Verdict]:
        payload = {
            "model": self.model,
            "temperature": 0,
            "prompt": self.prompt_template,
            "candidates": [req.to_dict() for req in chunk],
        }
        last_error = "unknown error"
        for attempt in range(self.max_retries + 1):
            try:
                resp = requests.post(
                    self.endpoint,
                    json=payload,
                    headers={"Authorization": f"Bearer {self.api_key}"},
                    timeout=self.timeout,
                )
                resp.raise_for_status()
                body = resp.json()
                self._audit(payload, body)
                return self._parse(body, chunk)
            except Exception as exc:
                last_error = str(exc)
                if attempt < self.max_retries:
                    time.sleep(min(2**attempt, 8))
        self._audit(payload, {"error": last_error})
        return [Verdict(decision="error", confidence=0.0, rationale=last_error) for _ in chunk]

    def _parse(self, body: dict, chunk: list[AdjudicationRequest]) -> list[Verdict]:
        raw = body.get("verdicts", [])
        out = []
        for i, req in enumerate(chunk):
            if i >= len(raw):
                out.append(Verdict("error", 0.0, "missing verdict in response"))
                continue
            v = raw[i]
            decision = v.get("decision", "error")
            if decision not in ("accept", "reject"):
                out.append(Verdict("error", 0.0, f"malformed decision {decision!r}"))
                continue
            out.append(
                Verdict(
                    decision=decision,
                    confidence=float(v.get("confidence", 0.5)),
                    rationale=v.get("rationale", "") or ("model rejection" if decision == "reject" else ""),
                )
            )
        return out

    def _audit(self, request: dict, response: dict) -> None:
        if self.audit_path is None:
            return
        self.audit_path.parent.mkdir(parents=True, exist_ok=True)
        with open(self.audit_path, "a", encoding="utf-8") as fh:
            fh.write(json.dumps({"request": request, "response": response}) + "\n")


def judge_binding(
    column: str,
    candidate_tables: list[str],
    from_tables: list[str] | None = None,
) -> str:
    """Pick the table a bare column reference belongs to.

    A unique containing table wins outright; with several, tables named in
    the query's FROM clause are preferred; remaining ties break on name
    affinity to the column, then lexicographically.
    """
    if not candidate_tables:
        raise UnresolvedBindingError(f"column {column!r} exists in no candidate table")
    if len(candidate_tables) == 1:
        return candidate_tables[0]
    pool = candidate_tables
    if from_tables:
        in_from = [t for t in candidate_tables if t in from_tables]
        if len(in_from) == 1:
            return in_from[0]
        if in_from:
            pool = in_from
    col = normalize_name(column)

    def affinity(table: str) -> float:
        tn = normalize_name(table)
        return seq_match(tn, col) / max(len(tn), 1)

    return sorted(pool, key=lambda t: (-affinity(t), t))[0]
