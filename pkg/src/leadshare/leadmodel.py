"""Lead-probability model: seeded split, standardized fit, scoring.

The default family is ordinary least squares on z-standardized features
with predictions clamped to [0, 1]; a logistic family is available behind
the config switch for sensitivity checks.  Zero-variance features are
frozen out of the solve (std forced to 1, weight to 0).  A rank-deficient
design falls back to a ridge solve with small damping, recorded in the
model metadata so downstream artifacts show the fallback engaged.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable, Iterator, Optional, Sequence

import numpy as np

from .corpus import bri_income_class, classify_topics, impact_factor_bin
from .errors import ConfigError, MalformedRecord, TooFewExamples
from .features import (
    FEATURE_NAMES,
    AuthorProfileIndex,
    LeadFeatureVector,
    extract_features,
)
from .metrics import ScoredAuthorship
from .records import PublicationRecord
from .tables import BriClassification, RegionMap, TopicMap

LEADER = "Leader"
SUPPORTER = "Supporter"
DEFAULT_THRESHOLD = 0.65
# ground truth for precision/recall: fractional labels binarized here
TRUTH_CUTOFF = 0.5
RIDGE_DAMPING = 1e-8
_STD_FLOOR = 1e-12
MIN_EXAMPLES = 20

FAMILY_LINEAR = "linear"
FAMILY_LOGISTIC = "logistic"


@dataclass(frozen=True)
class LinearLeadModel:
    weights: tuple[float, ...]
    intercept: float
    feature_means: tuple[float, ...]
    feature_stds: tuple[float, ...]
    seed: int
    split_ratio: float
    n_train: int
    damping: float = 0.0
    family: str = FAMILY_LINEAR


@dataclass(frozen=True)
class EvalReport:
    threshold: float
    precision: float
    recall: float
    tp: int
    fp: int
    fn: int
    tn: int


def _standardize(X: np.ndarray, means: np.ndarray, stds: np.ndarray) -> np.ndarray:
    return (X - means) / stds


def _raw_scores(model: LinearLeadModel, X: np.ndarray) -> np.ndarray:
    Z = _standardize(
        X, np.asarray(model.feature_means), np.asarray(model.feature_stds)
    )
    return model.intercept + Z @ np.asarray(model.weights)


def predict_many(model: LinearLeadModel, X: np.ndarray) -> np.ndarray:
    raw = _raw_scores(model, X)
    if model.family == FAMILY_LOGISTIC:
        return 1.0 / (1.0 + np.exp(-raw))
    return np.clip(raw, 0.0, 1.0)


def predict(model: LinearLeadModel, v: LeadFeatureVector) -> float:
    return float(predict_many(model, v.as_array()[None, :])[0])


def classify(prob: float, threshold: float = DEFAULT_THRESHOLD) -> str:
    """Leader iff prob is strictly above the threshold."""
    return LEADER if prob > threshold else SUPPORTER


def _solve(A: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, float]:
    """Normal-equation solve; ridge fallback when rank-deficient."""
    AtA = A.T @ A
    Aty = A.T @ y
    if np.linalg.matrix_rank(AtA) == AtA.shape[0]:
        return np.linalg.solve(AtA, Aty), 0.0
    damp = np.eye(AtA.shape[0]) * RIDGE_DAMPING
    damp[0, 0] = 0.0  # leave the intercept unpenalized
    return np.linalg.solve(AtA + damp, Aty), RIDGE_DAMPING


def _fit_logistic(A: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, float]:
    """IRLS with the same ridge escape hatch; fractional targets allowed."""
    coef = np.zeros(A.shape[1])
    damping_used = 0.0
    for _ in range(100):
        p = 1.0 / (1.0 + np.exp(-(A @ coef)))
        W = np.maximum(p * (1.0 - p), 1e-10)
        AtWA = A.T @ (A * W[:, None])
        grad = A.T @ (y - p)
        if np.linalg.matrix_rank(AtWA) < AtWA.shape[0]:
            damp = np.eye(AtWA.shape[0]) * RIDGE_DAMPING
            damp[0, 0] = 0.0
            AtWA = AtWA + damp
            damping_used = RIDGE_DAMPING
        step = np.linalg.solve(AtWA, grad)
        coef = coef + step
        if np.max(np.abs(step)) < 1e-10:
            break
    return coef, damping_used


def evaluate(
    probs: np.ndarray, labels: np.ndarray, threshold: float
) -> EvalReport:
    predicted = probs > threshold
    truth = labels >= TRUTH_CUTOFF
    tp = int(np.sum(predicted & truth))
    fp = int(np.sum(predicted & ~truth))
    fn = int(np.sum(~predicted & truth))
    tn = int(np.sum(~predicted & ~truth))
    precision = tp / (tp + fp) if tp + fp > 0 else 0.0
    recall = tp / (tp + fn) if tp + fn > 0 else 0.0
    return EvalReport(
        threshold=threshold, precision=precision, recall=recall,
        tp=tp, fp=fp, fn=fn, tn=tn,
    )


def fit(
    examples: Sequence[tuple[LeadFeatureVector, float]],
    split_ratio: float = 0.9,
    seed: int = 0,
    *,
    threshold: float = DEFAULT_THRESHOLD,
    family: str = FAMILY_LINEAR,
) -> tuple[LinearLeadModel, EvalReport]:
    """Seeded shuffle split, standardize on train, fit, evaluate held-out."""
    if family not in (FAMILY_LINEAR, FAMILY_LOGISTIC):
        raise ConfigError(f"unknown model family {family!r}")
    if not 0.0 < split_ratio < 1.0:
        raise ConfigError(f"split ratio must be in (0,1), got {split_ratio}")
    n = len(examples)
    if n < MIN_EXAMPLES:
        raise TooFewExamples(f"need at least {MIN_EXAMPLES} examples, got {n}")
    X = np.array([v.as_array() for v, _ in examples], dtype=np.float64)
    y = np.array([label for _, label in examples], dtype=np.float64)
    if np.any(y < 0.0) or np.any(y > 1.0):
        raise ConfigError("lead values must lie in [0,1]")

    rng = np.random.default_rng(seed)
    perm = rng.permutation(n)
    n_train = min(max(int(round(split_ratio * n)), 1), n - 1)
    train, test = perm[:n_train], perm[n_train:]

    means = X[train].mean(axis=0)
    stds = X[train].std(axis=0)
    degenerate = stds <= _STD_FLOOR
    stds = np.where(degenerate, 1.0, stds)
    active = ~degenerate

    Z = _standardize(X[train], means, stds)
    A = np.hstack([np.ones((n_train, 1)), Z[:, active]])
    if family == FAMILY_LOGISTIC:
        coef, damping = _fit_logistic(A, y[train])
    else:
        coef, damping = _solve(A, y[train])
    weights = np.zeros(X.shape[1])
    weights[active] = coef[1:]

    model = LinearLeadModel(
        weights=tuple(weights),
        intercept=float(coef[0]),
        feature_means=tuple(means),
        feature_stds=tuple(stds),
        seed=seed,
        split_ratio=split_ratio,
        n_train=n_train,
        damping=damping,
        family=family,
    )
    report = evaluate(predict_many(model, X[test]), y[test], threshold)
    return model, report


def score_corpus(
    model: LinearLeadModel,
    filtered: Iterable[tuple[PublicationRecord, tuple[str, str]]],
    index: AuthorProfileIndex,
    region_map: RegionMap,
    topics: TopicMap,
    bri: BriClassification,
    if_edges: Sequence[float],
    *,
    threshold: float = DEFAULT_THRESHOLD,
) -> Iterator[ScoredAuthorship]:
    """One scored row per author of each bilateral paper, in input order."""
    for record, _pair in filtered:
        areas, fields = classify_topics(record, topics)
        if_bin = impact_factor_bin(record.impact_factor, if_edges)
        emitted: set[str] = set()
        for a in record.authorships:
            if a.author_id in emitted:
                continue
            emitted.add(a.author_id)
            vector = extract_features(record, a.author_id, index)
            prob = predict(model, vector)
            yield ScoredAuthorship(
                paper_id=record.paper_id,
                author_id=a.author_id,
                region=region_map.region_of(a.country),
                year=record.year,
                lead_prob=prob,
                is_leader=prob > threshold,
                areas=areas,
                fields=fields,
                if_bin=if_bin,
                bri_class=bri_income_class(a.country, bri),
                country=a.country,
            )


_MODEL_KEYS = ("family", "seed", "split", "n_train", "damping", "intercept",
               "weights", "means", "stds")


def write_model(model: LinearLeadModel, path: Path) -> None:
    """Flat key-value file; floats at 17 significant digits round-trip."""
    def fmt(values: Iterable[float]) -> str:
        return " ".join(f"{v:.17g}" for v in values)

    lines = [
        f"family\t{model.family}",
        f"seed\t{model.seed}",
        f"split\t{model.split_ratio:.17g}",
        f"n_train\t{model.n_train}",
        f"damping\t{model.damping:.17g}",
        f"intercept\t{model.intercept:.17g}",
        f"weights\t{fmt(model.weights)}",
        f"means\t{fmt(model.feature_means)}",
        f"stds\t{fmt(model.feature_stds)}",
    ]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_model(path: Path) -> LinearLeadModel:
    fields: dict[str, str] = {}
    for line_no, raw in enumerate(
        Path(path).read_text(encoding="utf-8").splitlines(), start=1
    ):
        key, sep, value = raw.partition("\t")
        if not sep:
            raise MalformedRecord(line_no, "<line>", f"expected key\\tvalue, got {raw!r}")
        fields[key] = value
    missing = [k for k in _MODEL_KEYS if k not in fields]
    if missing:
        raise MalformedRecord(0, missing[0], "missing model field")
    def vec(key: str) -> tuple[float, ...]:
        values = tuple(float(x) for x in fields[key].split())
        if len(values) != len(FEATURE_NAMES):
            raise MalformedRecord(0, key, f"expected {len(FEATURE_NAMES)} values")
        return values

    return LinearLeadModel(
        weights=vec("weights"),
        intercept=float(fields["intercept"]),
        feature_means=vec("means"),
        feature_stds=vec("stds"),
        seed=int(fields["seed"]),
        split_ratio=float(fields["split"]),
        n_train=int(fields["n_train"]),
        damping=float(fields["damping"]),
        family=fields["family"],
    )


def write_eval(report: EvalReport, path: Path) -> None:
    lines = [
        "threshold\tprecision\trecall\ttp\tfp\tfn\ttn",
        f"{report.threshold:.9f}\t{report.precision:.9f}\t{report.recall:.9f}\t"
        f"{report.tp}\t{report.fp}\t{report.fn}\t{report.tn}",
    ]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_scored(rows: Iterable[ScoredAuthorship], path: Path) -> None:
    """Scored table; tags are packed into one semicolon-keyed column."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("paper_id\tauthor_id\tregion\tyear\tlead_prob\tis_leader\ttags\n")
        for r in rows:
            tags = (
                f"areas={'|'.join(sorted(r.areas))};"
                f"fields={'|'.join(sorted(r.fields))};"
                f"if_bin={r.if_bin};bri={r.bri_class};country={r.country}"
            )
            fh.write(
                f"{r.paper_id}\t{r.author_id}\t{r.region}\t{r.year}\t"
                f"{r.lead_prob:.9f}\t{'true' if r.is_leader else 'false'}\t{tags}\n"
            )


def read_scored(path: Path) -> Iterator[ScoredAuthorship]:
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n")
        if header != "paper_id\tauthor_id\tregion\tyear\tlead_prob\tis_leader\ttags":
            raise MalformedRecord(1, "header", "unexpected scored header")
        for line_no, raw in enumerate(fh, start=2):
            parts = raw.rstrip("\n").split("\t")
            if len(parts) != 7:
                raise MalformedRecord(line_no, "<line>", f"expected 7 columns, got {len(parts)}")
            tag_fields = dict(
                item.split("=", 1) for item in parts[6].split(";") if "=" in item
            )
            for key in ("areas", "fields", "if_bin", "bri", "country"):
                if key not in tag_fields:
                    raise MalformedRecord(line_no, "tags", f"missing tag {key!r}")
            yield ScoredAuthorship(
                paper_id=parts[0],
                author_id=parts[1],
                region=parts[2],
                year=int(parts[3]),
                lead_prob=float(parts[4]),
                is_leader=parts[5] == "true",
                areas=frozenset(x for x in tag_fields["areas"].split("|") if x),
                fields=frozenset(x for x in tag_fields["fields"].split("|") if x),
                if_bin=int(tag_fields["if_bin"]),
                bri_class=tag_fields["bri"],
                country=tag_fields["country"],
            )


def rescore(
    rows: Iterable[ScoredAuthorship], threshold: float
) -> Iterator[ScoredAuthorship]:
    """Re-derive is_leader at a new threshold without re-predicting."""
    for r in rows:
        yield replace(r, is_leader=r.lead_prob > threshold)
