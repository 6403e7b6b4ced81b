"""Contribution-verb role clustering and per-author lead values.

The training corpus is a stream of pre-tokenized contribution statements
(one per author per paper).  Verbs that co-occur within the same statement
form a symmetric count matrix; each verb's positive-PMI row, L2-normalized,
is its embedding; seeded k-means with k=3 partitions the vocabulary; the
clusters are labeled Lead / DirectSupport / IndirectSupport by majority
vote of a fixed seed-verb list.  An author's lead value on a paper is the
fraction of their distinct known verbs that belong to the Lead cluster
(the two support roles are collapsed).
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, Mapping, Optional, Sequence

import numpy as np

from .errors import (
    AmbiguousLabeling,
    ConfigError,
    EmptyCorpus,
    MalformedRecord,
    NoKnownVerbs,
    VocabularyTooSmall,
)
from .kmeans import kmeans
from .records import ContributionRecord

log = logging.getLogger(__name__)

LEAD = "Lead"
DIRECT_SUPPORT = "DirectSupport"
INDIRECT_SUPPORT = "IndirectSupport"
ROLE_LABELS = (LEAD, DIRECT_SUPPORT, INDIRECT_SUPPORT)

LEAD_SEED_VERBS = (
    "conceive",
    "design",
    "lead",
    "supervise",
    "coordinate",
    "interpret",
    "write",
)
DIRECT_SUPPORT_SEED_VERBS = (
    "help",
    "assist",
    "prepare",
    "develop",
    "collect",
    "generate",
    "purify",
    "carry",
    "do",
    "perform",
    "conduct",
    "analyze",
)
INDIRECT_SUPPORT_SEED_VERBS = (
    "participate",
    "provide",
    "contribute",
    "comment",
    "discuss",
    "edit",
)
SEED_VERBS: Mapping[str, tuple[str, ...]] = {
    LEAD: LEAD_SEED_VERBS,
    DIRECT_SUPPORT: DIRECT_SUPPORT_SEED_VERBS,
    INDIRECT_SUPPORT: INDIRECT_SUPPORT_SEED_VERBS,
}

_IRREGULAR_FORMS = {
    "lead": ("led",),
    "write": ("wrote", "written"),
    "do": ("does", "did", "done"),
    "analyze": ("analyse", "analyses", "analysed", "analysing"),
}

_VOWELS = set("aeiou")


def _inflections(verb: str) -> set[str]:
    forms = {verb}
    if verb.endswith("e"):
        forms |= {verb + "s", verb + "d", verb[:-1] + "ing"}
    elif verb.endswith("y") and len(verb) > 1 and verb[-2] not in _VOWELS:
        stem = verb[:-1]
        forms |= {stem + "ies", stem + "ied", verb + "ing"}
    elif verb.endswith("s"):
        forms |= {verb + "es", verb + "ed", verb + "ing"}
    else:
        forms |= {verb + "s", verb + "ed", verb + "ing"}
    forms.update(_IRREGULAR_FORMS.get(verb, ()))
    return forms


_LEMMAS: dict[str, str] = {}
for _label, _verbs in SEED_VERBS.items():
    for _verb in _verbs:
        for _form in _inflections(_verb):
            _LEMMAS[_form] = _verb


def normalize_verb(text: str) -> str:
    """Lowercase, strip surrounding punctuation, and fold inflected forms."""
    cleaned = text.strip().lower().strip(".,;:!?\"'()[]")
    return _LEMMAS.get(cleaned, cleaned)


def normalize_record(record: ContributionRecord) -> ContributionRecord:
    verbs = tuple(v for v in (normalize_verb(t) for t in record.verbs) if v)
    return ContributionRecord(
        paper_id=record.paper_id, author_id=record.author_id, verbs=verbs
    )


@dataclass(frozen=True)
class CooccurrenceMatrix:
    """Symmetric verb co-occurrence counts over (paper, author) units."""

    vocabulary: tuple[str, ...]
    counts: np.ndarray

    def index_of(self, verb: str) -> int:
        # vocabulary is sorted, so bisect would also work; linear is fine
        return self.vocabulary.index(verb)


def build_cooccurrence(records: Iterable[ContributionRecord]) -> CooccurrenceMatrix:
    """Count within-statement verb co-occurrence, deduplicated per unit."""
    units: list[frozenset[str]] = []
    vocab: set[str] = set()
    for record in records:
        unit = frozenset(record.verbs)
        if not unit:
            continue
        vocab |= unit
        units.append(unit)
    if not units:
        raise EmptyCorpus("no contribution statements")
    vocabulary = tuple(sorted(vocab))
    index = {v: i for i, v in enumerate(vocabulary)}
    counts = np.zeros((len(vocabulary), len(vocabulary)), dtype=np.int64)
    for unit in units:
        ids = sorted(index[v] for v in unit)
        for pos, i in enumerate(ids):
            counts[i, i] += 1
            for j in ids[pos + 1 :]:
                counts[i, j] += 1
                counts[j, i] += 1
    return CooccurrenceMatrix(vocabulary=vocabulary, counts=counts)


def ppmi_embedding(matrix: CooccurrenceMatrix) -> np.ndarray:
    """Positive PMI rows with add-one smoothing, L2-normalized."""
    smoothed = matrix.counts.astype(np.float64) + 1.0
    total = smoothed.sum()
    joint = smoothed / total
    marginal = joint.sum(axis=1)
    pmi = np.log(joint / np.outer(marginal, marginal))
    emb = np.maximum(pmi, 0.0)
    norms = np.linalg.norm(emb, axis=1)
    nonzero = norms > 0
    emb[nonzero] /= norms[nonzero, None]
    return emb


@dataclass(frozen=True)
class RolePartition:
    """Unlabeled k-way split of the verb vocabulary."""

    clusters: tuple[frozenset[str], ...]
    seed: int
    n_iter: int
    converged: bool
    inertia: float


def cluster_roles(
    matrix: CooccurrenceMatrix, k: int = 3, seed: int = 0, *, n_restarts: int = 8
) -> RolePartition:
    if len(matrix.vocabulary) < k:
        raise VocabularyTooSmall(
            f"{len(matrix.vocabulary)} verbs cannot form {k} clusters"
        )
    emb = ppmi_embedding(matrix)
    result = kmeans(emb, k, seed, n_restarts=n_restarts)
    if not result.converged:
        log.warning(
            "clustering hit the iteration cap before assignments stabilized "
            "(seed %d); keeping best-so-far", seed,
        )
    groups: dict[int, set[str]] = {c: set() for c in range(k)}
    for verb, label in zip(matrix.vocabulary, result.labels):
        groups[int(label)].add(verb)
    clusters = tuple(
        frozenset(g) for g in sorted(groups.values(), key=lambda g: min(g))
    )
    return RolePartition(
        clusters=clusters,
        seed=seed,
        n_iter=result.n_iter,
        converged=result.converged,
        inertia=result.inertia,
    )


@dataclass(frozen=True)
class RoleClusterModel:
    """Verb to role assignment plus the clustering provenance."""

    by_verb: dict[str, str]
    seed: int
    k: int
    n_iter: int
    converged: bool

    def role_of(self, verb: str) -> Optional[str]:
        return self.by_verb.get(verb)


def label_clusters(
    partition: RolePartition,
    seed_verbs: Optional[Mapping[str, Sequence[str]]] = None,
) -> RoleClusterModel:
    """Name the three clusters by majority seed-verb vote.

    The label permutation maximizing the total seed hits wins; a tied
    maximum means the data cannot distinguish two roles and is an error.
    """
    if seed_verbs is None:
        seed_verbs = SEED_VERBS
    if len(partition.clusters) != 3 or set(seed_verbs) != set(ROLE_LABELS):
        raise ConfigError("labeling requires exactly 3 clusters and 3 seed lists")
    seed_sets = {label: set(verbs) for label, verbs in seed_verbs.items()}
    scores = [
        {label: len(cluster & seed_sets[label]) for label in ROLE_LABELS}
        for cluster in partition.clusters
    ]
    for i, row in enumerate(scores):
        if all(v == 0 for v in row.values()):
            raise AmbiguousLabeling(
                f"cluster {i} contains no seed verbs: {sorted(partition.clusters[i])[:8]}"
            )
    best_perm = None
    best_total = -1
    tied = False
    for perm in itertools.permutations(ROLE_LABELS):
        total = sum(scores[c][perm[c]] for c in range(3))
        if total > best_total:
            best_perm, best_total, tied = perm, total, False
        elif total == best_total and perm != best_perm:
            tied = True
    if tied or best_perm is None:
        raise AmbiguousLabeling(
            "two label assignments tie on seed-verb counts; override the seeds"
        )
    by_verb = {
        verb: label
        for cluster, label in zip(partition.clusters, best_perm)
        for verb in cluster
    }
    return RoleClusterModel(
        by_verb=by_verb,
        seed=partition.seed,
        k=3,
        n_iter=partition.n_iter,
        converged=partition.converged,
    )


def fractional_lead_value(
    record: ContributionRecord,
    model: RoleClusterModel,
    *,
    strict_binary: bool = False,
) -> float:
    """Share of the author's distinct known verbs that are Lead verbs.

    Unknown verbs are dropped with a warning.  With strict_binary the value
    collapses to 1.0 whenever any Lead verb is present, else 0.0.
    """
    distinct = set(record.verbs)
    known = [v for v in distinct if v in model.by_verb]
    if not known:
        raise NoKnownVerbs(
            f"no verbs of {record.author_id} on {record.paper_id} are in the model"
        )
    if len(known) < len(distinct):
        log.warning(
            "dropping %d unknown verb(s) for %s on %s",
            len(distinct) - len(known), record.author_id, record.paper_id,
        )
    lead = sum(1 for v in known if model.by_verb[v] == LEAD)
    if strict_binary:
        return 1.0 if lead else 0.0
    return lead / len(known)


@dataclass(frozen=True)
class TrainingLabel:
    paper_id: str
    author_id: str
    lead_value: float


def training_labels(
    records: Iterable[ContributionRecord],
    model: RoleClusterModel,
    *,
    strict_binary: bool = False,
) -> Iterator[TrainingLabel]:
    """Label each statement, skipping those with no known verbs."""
    skipped = 0
    for record in records:
        try:
            value = fractional_lead_value(record, model, strict_binary=strict_binary)
        except NoKnownVerbs:
            skipped += 1
            continue
        yield TrainingLabel(record.paper_id, record.author_id, value)
    if skipped:
        log.warning("skipped %d statement(s) with no known verbs", skipped)


def write_role_model(model: RoleClusterModel, path: Path) -> None:
    lines = [
        f"# seed\t{model.seed}",
        f"# k\t{model.k}",
        f"# iterations\t{model.n_iter}",
        f"# converged\t{'true' if model.converged else 'false'}",
        "verb\tcluster",
    ]
    for verb in sorted(model.by_verb):
        lines.append(f"{verb}\t{model.by_verb[verb]}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_role_model(path: Path) -> RoleClusterModel:
    meta: dict[str, str] = {}
    by_verb: dict[str, str] = {}
    header_seen = False
    for line_no, raw in enumerate(
        Path(path).read_text(encoding="utf-8").splitlines(), start=1
    ):
        if raw.startswith("# "):
            key, _, value = raw[2:].partition("\t")
            meta[key] = value
            continue
        if not header_seen:
            if raw != "verb\tcluster":
                raise MalformedRecord(line_no, "header", f"unexpected {raw!r}")
            header_seen = True
            continue
        verb, sep, label = raw.partition("\t")
        if not sep or label not in ROLE_LABELS:
            raise MalformedRecord(line_no, "cluster", f"bad row {raw!r}")
        by_verb[verb] = label
    for key in ("seed", "k", "iterations", "converged"):
        if key not in meta:
            raise MalformedRecord(0, key, "missing metadata line")
    return RoleClusterModel(
        by_verb=by_verb,
        seed=int(meta["seed"]),
        k=int(meta["k"]),
        n_iter=int(meta["iterations"]),
        converged=meta["converged"] == "true",
    )


def write_training_labels(labels: Iterable[TrainingLabel], path: Path) -> None:
    lines = ["paper_id\tauthor_id\tlead_value"]
    for lab in labels:
        lines.append(f"{lab.paper_id}\t{lab.author_id}\t{lab.lead_value:.9f}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_training_labels(path: Path) -> list[TrainingLabel]:
    out: list[TrainingLabel] = []
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines or lines[0] != "paper_id\tauthor_id\tlead_value":
        raise MalformedRecord(1, "header", "expected paper_id\\tauthor_id\\tlead_value")
    for line_no, raw in enumerate(lines[1:], start=2):
        parts = raw.split("\t")
        if len(parts) != 3:
            raise MalformedRecord(line_no, "<line>", f"expected 3 columns, got {len(parts)}")
        try:
            value = float(parts[2])
        except ValueError:
            raise MalformedRecord(line_no, "lead_value", f"not a number: {parts[2]!r}")
        if not 0.0 <= value <= 1.0:
            raise MalformedRecord(line_no, "lead_value", f"outside [0,1]: {value}")
        out.append(TrainingLabel(parts[0], parts[1], value))
    return out
