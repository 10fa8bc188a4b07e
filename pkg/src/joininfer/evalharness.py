"""Quality metrics, ablations, and the learned join score.

Ground truth reuses the manifest format: a schema file whose declared
constraints are taken as the reference keys and references, so official
schema metadata doubles as truth. Key metrics are scored per ground-truth
key; join metrics are exact directed column-pair matches.

The learned probabilistic score (logistic regression over the five IND
features) lives here, not in the pipeline: the operational score stays
the plain feature mean.
"""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .catalog import SchemaManifest, load_manifest
from .ind import InclusionDependency
from .pk import PrimaryKeyDecision

log = logging.getLogger(__name__)

Pair = tuple[tuple[str, str], tuple[str, str]]


@dataclass
class GroundTruth:
    pks: dict[str, tuple[str, ...]]
    fks: set[Pair]

    @classmethod
    def from_manifest(cls, manifest: SchemaManifest) -> "GroundTruth":
        pks: dict[str, tuple[str, ...]] = {}
        fks: set[Pair] = set()
        for t in manifest.tables:
            if t.declared_pk:
                pks[t.name] = tuple(t.declared_pk)
            for fk in t.declared_fks:
                for local, remote in zip(fk.columns, fk.ref_columns):
                    fks.add(((t.name, local), (fk.ref_table, remote)))
        return cls(pks=pks, fks=fks)

    @classmethod
    def load(cls, path: str | Path) -> "GroundTruth":
        return cls.from_manifest(load_manifest(path))


@dataclass
class MetricsReport:
    accuracy: float
    precision: float
    recall: float
    f1: float
    perfect_recall: float = 0.0
    matches: list[dict] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "accuracy": self.accuracy,
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "perfect_recall": self.perfect_recall,
            "matches": self.matches,
        }


def _f1(p: float, r: float) -> float:
    return 2 * p * r / (p + r) if (p + r) > 0 else 0.0


def evaluate_pk(
    decisions: dict[str, PrimaryKeyDecision],
    truth: GroundTruth,
) -> MetricsReport:
    """Exact-match key metrics, scored per ground-truth key.

    perfect_recall additionally credits true keys that landed anywhere in
    the near-tie candidate pool even when not selected.
    """
    matches = []
    correct = 0
    in_pool = 0
    predicted_count = 0
    for table in sorted(truth.pks):
        true_key = truth.pks[table]
        decision = decisions.get(table)
        if decision is None:
            log.warning("table %r in ground truth has no key decision; false negative", table)
            matches.append({"table": table, "truth": list(true_key), "predicted": None, "match": False})
            continue
        if decision.composite:
            predicted: tuple[str, ...] | None = tuple(decision.composite)
        elif decision.selected:
            predicted = (decision.selected,)
        else:
            predicted = None
        if predicted is not None:
            predicted_count += 1
        ok = predicted == true_key
        correct += int(ok)
        pool_hit = ok or (len(true_key) == 1 and true_key[0] in decision.pool_columns())
        in_pool += int(pool_hit)
        matches.append(
            {
                "table": table,
                "truth": list(true_key),
                "predicted": list(predicted) if predicted else None,
                "match": ok,
                "in_pool": pool_hit,
            }
        )
    total = len(truth.pks)
    precision = correct / predicted_count if predicted_count else 0.0
    recall = correct / total if total else 0.0
    return MetricsReport(
        accuracy=correct / total if total else 0.0,
        precision=precision,
        recall=recall,
        f1=_f1(precision, recall),
        perfect_recall=in_pool / total if total else 0.0,
        matches=matches,
    )


def evaluate_joins(
    predicted: list[InclusionDependency] | set[Pair],
    truth_fks: set[Pair],
) -> MetricsReport:
    """Precision/recall/F1 over exact directed (fk column -> pk column) pairs."""
    if isinstance(predicted, set):
        pred_pairs = predicted
    else:
        pred_pairs = {(i.fk, i.pk) for i in predicted}
    tp = pred_pairs & truth_fks
    fp = pred_pairs - truth_fks
    fn = truth_fks - pred_pairs
    precision = len(tp) / len(pred_pairs) if pred_pairs else 0.0
    recall = len(tp) / len(truth_fks) if truth_fks else 0.0
    denom = len(tp) + len(fp) + len(fn)
    matches = (
        [{"pair": _pair_str(p), "kind": "true-positive"} for p in sorted(tp)]
        + [{"pair": _pair_str(p), "kind": "false-positive"} for p in sorted(fp)]
        + [{"pair": _pair_str(p), "kind": "false-negative"} for p in sorted(fn)]
    )
    return MetricsReport(
        accuracy=len(tp) / denom if denom else 1.0,
        precision=precision,
        recall=recall,
        f1=_f1(precision, recall),
        matches=matches,
    )


def _pair_str(pair: Pair) -> str:
    (ft, fc), (pt, pc) = pair
    return f"{ft}.{fc}->{pt}.{pc}"


def ablate_threshold(
    candidates: list[InclusionDependency],
    truth_fks: set[Pair],
    grid: list[float] | None = None,
) -> list[dict]:
    """Survivor counts and metrics per score threshold; survivor sets nest."""
    if grid is None:
        grid = [round(0.05 * i, 2) for i in range(21)]
    rows = []
    for tau in grid:
        survivors = [c for c in candidates if c.score >= tau]
        report = evaluate_joins(survivors, truth_fks)
        rows.append(
            {
                "tau": tau,
                "survivors": len(survivors),
                "precision": report.precision,
                "recall": report.recall,
                "f1": report.f1,
            }
        )
    return rows


def ablate_sample_size(
    run_at_size,
    sizes: list[int],
    convergence_delta: float = 0.02,
) -> dict:
    """Candidate counts and scores per sample size.

    `run_at_size(size)` must return the scored candidate list for that
    sample size. Convergence size is the smallest size whose surviving
    candidate set equals the largest size's and whose per-candidate scores
    differ by less than `convergence_delta`.
    """
    per_size: dict[int, dict[str, float]] = {}
    for size in sizes:
        candidates = run_at_size(size)
        per_size[size] = {c.id: c.score for c in candidates}
    largest = max(sizes)
    reference = per_size[largest]
    convergence = None
    for size in sorted(sizes):
        scores = per_size[size]
        if set(scores) == set(reference) and all(
            abs(scores[k] - reference[k]) < convergence_delta for k in reference
        ):
            convergence = size
            break
    return {
        "sizes": [
            {"size": s, "candidates": len(per_size[s]), "scores": dict(sorted(per_size[s].items()))}
            for s in sorted(sizes)
        ],
        "convergence_size": convergence,
    }


# -- learned score -----------------------------------------------------------


def loglik_and_grad(
    w: np.ndarray, X: np.ndarray, y: np.ndarray, l2: float
) -> tuple[float, np.ndarray]:
    """Penalized Bernoulli log-likelihood and its analytic gradient.

    X carries an intercept column; the penalty applies to all weights.
    """
    z = X @ w
    # log(1 + e^z) computed stably
    log1pexp = np.where(z > 30, z, np.log1p(np.exp(np.minimum(z, 30))))
    ll = float(np.sum(y * z - log1pexp) - 0.5 * l2 * np.dot(w, w))
    p = 1.0 / (1.0 + np.exp(-np.clip(z, -700, 700)))
    grad = X.T @ (y - p) - l2 * w
    return ll, grad


@dataclass
class LearnedScore:
    weights: np.ndarray  # intercept first
    probabilities: np.ndarray
    loglik_trace: list[float]
    converged: bool

    def predict(self, features: np.ndarray) -> np.ndarray:
        X = np.column_stack([np.ones(len(features)), features])
        z = np.clip(X @ self.weights, -700, 700)
        return 1.0 / (1.0 + np.exp(-z))


def fit_learned_score(
    features: np.ndarray,
    labels: np.ndarray,
    l2: float = 1e-3,
    max_iter: int = 500,
    tol: float = 1e-9,
) -> LearnedScore:
    """Logistic regression by gradient ascent with backtracking line search.

    The penalized log-likelihood is non-decreasing every iteration, and the
    fit is fully deterministic (zero initialization, fixed step schedule).
    """
    X = np.column_stack([np.ones(len(features)), np.asarray(features, dtype=np.float64)])
    y = np.asarray(labels, dtype=np.float64)
    if len(np.unique(y)) < 2:
        raise ValueError("need at least one positive and one negative label")
    w = np.zeros(X.shape[1])
    ll, grad = loglik_and_grad(w, X, y, l2)
    trace = [ll]
    converged = False
    step = 1.0 / max(len(y), 1)
    for _ in range(max_iter):
        trial_step = step * 4
        while True:
            w_new = w + trial_step * grad
            ll_new, grad_new = loglik_and_grad(w_new, X, y, l2)
            if ll_new >= ll or trial_step < 1e-18:
                break
            trial_step /= 2
        if ll_new < ll:
            converged = True
            break
        improved = ll_new - ll
        w, ll, grad = w_new, ll_new, grad_new
        trace.append(ll)
        step = trial_step
        if improved < tol:
            converged = True
            break
    probs = 1.0 / (1.0 + np.exp(-np.clip(X @ w, -700, 700)))
    return LearnedScore(weights=w, probabilities=probs, loglik_trace=trace, converged=converged)


def roc_auc(scores: np.ndarray, labels: np.ndarray) -> float:
    """Rank-statistic AUC with midrank handling for ties."""
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.float64)
    pos = int(labels.sum())
    neg = len(labels) - pos
    if pos == 0 or neg == 0:
        return 0.5
    order = np.argsort(scores, kind="stable")
    ranks = np.empty(len(scores))
    sorted_scores = scores[order]
    i = 0
    rank = 1
    while i < len(sorted_scores):
        j = i
        while j + 1 < len(sorted_scores) and sorted_scores[j + 1] == sorted_scores[i]:
            j += 1
        midrank = (rank + rank + (j - i)) / 2.0
        ranks[order[i : j + 1]] = midrank
        rank += j - i + 1
        i = j + 1
    rank_sum = ranks[labels == 1].sum()
    return float((rank_sum - pos * (pos + 1) / 2.0) / (pos * neg))


# -- report emission ---------------------------------------------------------


def write_metrics_csv(rows: list[dict], path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    if not rows:
        path.write_text("", encoding="utf-8")
        return path
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(rows[0].keys()))
        writer.writeheader()
        writer.writerows(rows)
    return path


def evaluation_report(
    pk_report: MetricsReport | None,
    join_report: MetricsReport | None,
    threshold_rows: list[dict] | None = None,
) -> dict:
    report: dict = {}
    if pk_report is not None:
        report["primary_keys"] = pk_report.to_dict()
    if join_report is not None:
        report["joins"] = join_report.to_dict()
    if threshold_rows is not None:
        report["threshold_ablation"] = threshold_rows
    return report
