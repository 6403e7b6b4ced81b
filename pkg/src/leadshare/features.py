"""Per-author temporal profiles and the nine lead-prediction features.

The index is built in one chronological sweep (records are sorted
internally by year, date, then paper id).  "Prior" state for a focal paper
means papers dated strictly earlier: a paper sharing the focal paper's
exact date is not prior, so feature vectors are invariant to how same-day
ties are ordered.  Papers without a publication date sort at July 1.

Features, for author a on focal paper P:

  f1  focal references the author has cited before
  f2  focal concept names seen in the author's prior papers
  f3  focal references that are the author's own prior papers
  f4  focal year minus the author's first prior year (0 on debut)
  f5  number of prior papers
  f6  citations received by prior papers from corpus papers published
      strictly before the focal year
  f7  distinct concept names across prior papers
  f8  prior papers where the author was first or last author
  f9  percentile rank of the authorship's institution by count of corpus
      papers published before the focal year, in [0, 1]

f6 and f9 only see the provided corpus; there is no external citation or
prestige source.
"""

from __future__ import annotations

from bisect import bisect_left, bisect_right
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, Optional

import numpy as np

from .errors import AuthorNotOnPaper, DuplicatePaperId, MalformedRecord
from .records import PublicationRecord

FEATURE_NAMES = (
    "f1_refs_previously_cited",
    "f2_keyword_overlap",
    "f3_self_citations",
    "f4_career_age",
    "f5_prior_pub_count",
    "f6_citations_received",
    "f7_unique_keywords",
    "f8_first_or_last_count",
    "f9_affiliation_score",
)


@dataclass(frozen=True)
class LeadFeatureVector:
    f1_refs_previously_cited: int
    f2_keyword_overlap: int
    f3_self_citations: int
    f4_career_age: int
    f5_prior_pub_count: int
    f6_citations_received: int
    f7_unique_keywords: int
    f8_first_or_last_count: int
    f9_affiliation_score: float

    def as_array(self) -> np.ndarray:
        return np.array(
            [
                self.f1_refs_previously_cited,
                self.f2_keyword_overlap,
                self.f3_self_citations,
                self.f4_career_age,
                self.f5_prior_pub_count,
                self.f6_citations_received,
                self.f7_unique_keywords,
                self.f8_first_or_last_count,
                self.f9_affiliation_score,
            ],
            dtype=np.float64,
        )


@dataclass(frozen=True)
class _AuthorPaper:
    date: tuple[int, int, int]
    year: int
    paper_id: str
    first_or_last: bool
    references: frozenset[str]
    concept_names: frozenset[str]


class AuthorProfileIndex:
    """Frozen corpus index answering prior-state queries per author×paper."""

    def __init__(self) -> None:
        self._papers_by_author: dict[str, list[_AuthorPaper]] = {}
        # years of corpus papers citing each paper, sorted
        self._citing_years: dict[str, list[int]] = {}
        # years of each institution's papers (one entry per paper), sorted
        self._institution_years: dict[str, list[int]] = {}
        # focal year -> sorted counts of papers-before-year, one per
        # institution that has any; built lazily, queries repeat few years
        self._rank_snapshots: dict[int, np.ndarray] = {}

    def prior_papers(self, author_id: str, date: tuple[int, int, int]) -> list[_AuthorPaper]:
        papers = self._papers_by_author.get(author_id, [])
        prior = []
        for p in papers:
            if p.date >= date:
                break
            prior.append(p)
        return prior

    def citations_before(self, paper_id: str, year: int) -> int:
        return bisect_left(self._citing_years.get(paper_id, []), year)

    def institution_rank(self, institution_id: str, year: int) -> float:
        snapshot = self._rank_snapshots.get(year)
        if snapshot is None:
            counts = [
                bisect_left(years, year)
                for years in self._institution_years.values()
            ]
            snapshot = np.array(sorted(c for c in counts if c > 0), dtype=np.int64)
            self._rank_snapshots[year] = snapshot
        if snapshot.size == 0:
            return 0.0
        own = bisect_left(self._institution_years.get(institution_id, []), year)
        if own == 0:
            return 0.0
        return float(np.searchsorted(snapshot, own, side="right")) / snapshot.size


def build_profiles(corpus: Iterable[PublicationRecord]) -> AuthorProfileIndex:
    """Index the full corpus; records need not be pre-sorted."""
    index = AuthorProfileIndex()
    seen: set[str] = set()
    ordered: list[tuple[tuple[int, int, int], str, PublicationRecord]] = []
    for record in corpus:
        if record.paper_id in seen:
            raise DuplicatePaperId(record.paper_id)
        seen.add(record.paper_id)
        ordered.append((record.sort_date(), record.paper_id, record))
    ordered.sort(key=lambda t: (t[0], t[1]))
    for date, paper_id, record in ordered:
        refs = frozenset(record.references)
        names = frozenset(record.concept_names())
        last_pos = len(record.authorships) - 1
        placed: set[str] = set()
        institutions: set[str] = set()
        for a in record.authorships:
            if a.institution_id:
                institutions.add(a.institution_id)
            if a.author_id in placed:
                continue
            placed.add(a.author_id)
            index._papers_by_author.setdefault(a.author_id, []).append(
                _AuthorPaper(
                    date=date,
                    year=record.year,
                    paper_id=paper_id,
                    first_or_last=(a.position == 0 or a.position == last_pos),
                    references=refs,
                    concept_names=names,
                )
            )
        for inst in institutions:
            index._institution_years.setdefault(inst, []).append(record.year)
        for cited in refs:
            index._citing_years.setdefault(cited, []).append(record.year)
    for years in index._institution_years.values():
        years.sort()
    for years in index._citing_years.values():
        years.sort()
    return index


def extract_features(
    record: PublicationRecord, author_id: str, index: AuthorProfileIndex
) -> LeadFeatureVector:
    authorship = None
    for a in record.authorships:
        if a.author_id == author_id:
            authorship = a
            break
    if authorship is None:
        raise AuthorNotOnPaper(author_id, record.paper_id)
    prior = index.prior_papers(author_id, record.sort_date())
    prior_refs: set[str] = set()
    prior_ids: set[str] = set()
    prior_concepts: set[str] = set()
    first_or_last = 0
    citations = 0
    for p in prior:
        prior_refs |= p.references
        prior_ids.add(p.paper_id)
        prior_concepts |= p.concept_names
        if p.first_or_last:
            first_or_last += 1
        citations += index.citations_before(p.paper_id, record.year)
    focal_names = record.concept_names()
    return LeadFeatureVector(
        f1_refs_previously_cited=len(record.references & prior_refs),
        f2_keyword_overlap=len(focal_names & prior_concepts),
        f3_self_citations=len(record.references & prior_ids),
        f4_career_age=(record.year - prior[0].year) if prior else 0,
        f5_prior_pub_count=len(prior),
        f6_citations_received=citations,
        f7_unique_keywords=len(prior_concepts),
        f8_first_or_last_count=first_or_last,
        f9_affiliation_score=index.institution_rank(
            authorship.institution_id, record.year
        ),
    )


def extract_all(
    corpus: Iterable[PublicationRecord], index: AuthorProfileIndex
) -> Iterator[tuple[str, str, LeadFeatureVector]]:
    """One row per authorship, in corpus order then author position."""
    for record in corpus:
        emitted: set[str] = set()
        for a in record.authorships:
            if a.author_id in emitted:
                continue
            emitted.add(a.author_id)
            yield record.paper_id, a.author_id, extract_features(
                record, a.author_id, index
            )


_FEATURES_HEADER = "paper_id\tauthor_id\t" + "\t".join(FEATURE_NAMES)


def write_features(
    rows: Iterable[tuple[str, str, LeadFeatureVector]], path: Path
) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(_FEATURES_HEADER + "\n")
        for paper_id, author_id, v in rows:
            fh.write(
                f"{paper_id}\t{author_id}\t"
                f"{v.f1_refs_previously_cited}\t{v.f2_keyword_overlap}\t"
                f"{v.f3_self_citations}\t{v.f4_career_age}\t"
                f"{v.f5_prior_pub_count}\t{v.f6_citations_received}\t"
                f"{v.f7_unique_keywords}\t{v.f8_first_or_last_count}\t"
                f"{v.f9_affiliation_score:.9f}\n"
            )


def read_features(path: Path) -> list[tuple[str, str, LeadFeatureVector]]:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines or lines[0] != _FEATURES_HEADER:
        raise MalformedRecord(1, "header", "unexpected feature-file header")
    out: list[tuple[str, str, LeadFeatureVector]] = []
    for line_no, raw in enumerate(lines[1:], start=2):
        parts = raw.split("\t")
        if len(parts) != 11:
            raise MalformedRecord(line_no, "<line>", f"expected 11 columns, got {len(parts)}")
        try:
            vector = LeadFeatureVector(
                *(int(x) for x in parts[2:10]), float(parts[10])
            )
        except ValueError as exc:
            raise MalformedRecord(line_no, "features", str(exc))
        out.append((parts[0], parts[1], vector))
    return out
