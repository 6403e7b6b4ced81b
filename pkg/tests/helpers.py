"""Shared builders and reference implementations for the test suite."""

from __future__ import annotations

import datetime
from typing import Optional, Sequence

from leadshare.records import AuthorshipRecord, PublicationRecord


def make_record(
    paper_id: str,
    year: int,
    *,
    countries: Sequence[str] = ("China", "United States"),
    authors: Optional[Sequence[str]] = None,
    institutions: Optional[Sequence[str]] = None,
    date: Optional[str] = None,
    refs: Sequence[str] = (),
    concepts: Sequence[tuple[str, int]] = (),
    impact: float = 5.0,
    journal: str = "J1",
) -> PublicationRecord:
    """Build a record directly, one author per entry of countries."""
    if authors is None:
        authors = tuple(f"A{i + 1}" for i in range(len(countries)))
    if institutions is None:
        institutions = tuple(f"I{i + 1}" for i in range(len(authors)))
    authorships = tuple(
        AuthorshipRecord(
            author_id=a, position=i, country=countries[i], institution_id=institutions[i]
        )
        for i, a in enumerate(authors)
    )
    return PublicationRecord(
        paper_id=paper_id,
        year=year,
        pub_date=datetime.date.fromisoformat(date) if date else None,
        journal_id=journal,
        impact_factor=impact,
        concepts=frozenset(concepts),
        references=frozenset(refs),
        authorships=authorships,
    )


def oracle_features(
    corpus: Sequence[PublicationRecord], record: PublicationRecord, author_id: str
) -> tuple:
    """Recompute the nine features by full corpus scans per query.

    Structured nothing like the package's swept index: every quantity is
    re-derived from the raw record list.  Conventions under test: "prior"
    means sort_date strictly earlier than the focal paper's (ties are not
    prior), f6 and f9 look at corpus papers published in a strictly
    earlier calendar year, and f9 is the fraction of publishing
    institutions whose paper count is <= the focal institution's.
    """
    focal_key = record.sort_date()
    prior = [
        q
        for q in corpus
        if q.sort_date() < focal_key
        and any(a.author_id == author_id for a in q.authorships)
    ]
    prior_refs: set[str] = set()
    prior_ids: set[str] = set()
    prior_concepts: set[str] = set()
    f8 = 0
    for q in prior:
        prior_refs |= set(q.references)
        prior_ids.add(q.paper_id)
        prior_concepts |= {name for name, _ in q.concepts}
        pos = next(a.position for a in q.authorships if a.author_id == author_id)
        if pos == 0 or pos == len(q.authorships) - 1:
            f8 += 1

    f6 = 0
    for q in prior:
        for r in corpus:
            if r.year < record.year and q.paper_id in r.references:
                f6 += 1

    inst_counts: dict[str, int] = {}
    for r in corpus:
        if r.year >= record.year:
            continue
        for inst in {a.institution_id for a in r.authorships if a.institution_id}:
            inst_counts[inst] = inst_counts.get(inst, 0) + 1
    focal_auth = next(a for a in record.authorships if a.author_id == author_id)
    own = inst_counts.get(focal_auth.institution_id, 0)
    if own == 0 or not inst_counts:
        f9 = 0.0
    else:
        f9 = sum(1 for c in inst_counts.values() if c <= own) / len(inst_counts)

    focal_names = {name for name, _ in record.concepts}
    return (
        len(set(record.references) & prior_refs),
        len(focal_names & prior_concepts),
        len(set(record.references) & prior_ids),
        (record.year - min(q.year for q in prior)) if prior else 0,
        len(prior),
        f6,
        len(prior_concepts),
        f8,
        f9,
    )


def vector_as_tuple(v) -> tuple:
    return (
        v.f1_refs_previously_cited,
        v.f2_keyword_overlap,
        v.f3_self_citations,
        v.f4_career_age,
        v.f5_prior_pub_count,
        v.f6_citations_received,
        v.f7_unique_keywords,
        v.f8_first_or_last_count,
        v.f9_affiliation_score,
    )
