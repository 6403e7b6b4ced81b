"""Publication records and the line-delimited input formats.

The corpus is JSON Lines: one publication object per line with exactly the
fields

    paper_id      str
    year          int
    pub_date      "YYYY-MM-DD" or null
    journal_id    str
    impact_factor float >= 0
    concepts      [{"name": str, "level": int >= 0}, ...]
    references    [str, ...]
    authorships   [{"author_id": str, "position": int,
                    "country": str, "institution_id": str}, ...]

Contribution statements use the same framing with fields paper_id,
author_id, verbs[].
"""

from __future__ import annotations

import datetime
import json
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional, TextIO

from .errors import InvariantViolation, MalformedRecord

# Sort key for papers without an explicit date: mid-year keeps them
# comparable against dated papers in the same year.
MISSING_DATE_MONTH_DAY = (7, 1)


@dataclass(frozen=True)
class AuthorshipRecord:
    author_id: str
    position: int
    country: str
    institution_id: str


@dataclass(frozen=True)
class PublicationRecord:
    paper_id: str
    year: int
    pub_date: Optional[datetime.date]
    journal_id: str
    impact_factor: float
    concepts: frozenset[tuple[str, int]]
    references: frozenset[str]
    authorships: tuple[AuthorshipRecord, ...]

    def concept_names(self) -> frozenset[str]:
        return frozenset(name for name, _ in self.concepts)

    def level0_concept_names(self) -> frozenset[str]:
        return frozenset(name for name, level in self.concepts if level == 0)

    def sort_date(self) -> tuple[int, int, int]:
        """Chronological key; missing dates sort as July 1 of their year."""
        if self.pub_date is not None:
            return (self.pub_date.year, self.pub_date.month, self.pub_date.day)
        return (self.year,) + MISSING_DATE_MONTH_DAY


def _require(obj: dict, key: str, line_no: int):
    if key not in obj:
        raise MalformedRecord(line_no, key, "missing field")
    return obj[key]


def _parse_date(raw, line_no: int) -> Optional[datetime.date]:
    if raw is None:
        return None
    try:
        return datetime.date.fromisoformat(raw)
    except (TypeError, ValueError):
        raise MalformedRecord(line_no, "pub_date", f"not an ISO date: {raw!r}")


def parse_publication_line(line: str, line_no: int = 0) -> PublicationRecord:
    """Parse one corpus line into a validated PublicationRecord.

    Raises MalformedRecord for syntax problems and InvariantViolation for
    well-formed records that break a domain invariant; both carry the line
    number and offending field.
    """
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        raise MalformedRecord(line_no, "<line>", f"invalid JSON: {exc}")
    if not isinstance(obj, dict):
        raise MalformedRecord(line_no, "<line>", "record is not an object")

    paper_id = _require(obj, "paper_id", line_no)
    if not isinstance(paper_id, str) or not paper_id:
        raise MalformedRecord(line_no, "paper_id", "must be a non-empty string")

    year = _require(obj, "year", line_no)
    if not isinstance(year, int) or isinstance(year, bool):
        raise MalformedRecord(line_no, "year", "must be an integer")
    if year < 1500:
        raise InvariantViolation(line_no, "year", f"year {year} < 1500")

    pub_date = _parse_date(obj.get("pub_date"), line_no)
    if pub_date is not None and pub_date.year != year:
        raise InvariantViolation(
            line_no, "pub_date", f"date year {pub_date.year} != year {year}"
        )

    journal_id = _require(obj, "journal_id", line_no)
    if not isinstance(journal_id, str):
        raise MalformedRecord(line_no, "journal_id", "must be a string")

    impact_factor = _require(obj, "impact_factor", line_no)
    if not isinstance(impact_factor, (int, float)) or isinstance(impact_factor, bool):
        raise MalformedRecord(line_no, "impact_factor", "must be a number")
    impact_factor = float(impact_factor)
    if impact_factor < 0:
        raise InvariantViolation(line_no, "impact_factor", "must be non-negative")

    raw_concepts = _require(obj, "concepts", line_no)
    if not isinstance(raw_concepts, list):
        raise MalformedRecord(line_no, "concepts", "must be a list")
    concepts = set()
    for c in raw_concepts:
        if not isinstance(c, dict) or "name" not in c or "level" not in c:
            raise MalformedRecord(line_no, "concepts", "entries need name and level")
        name, level = c["name"], c["level"]
        if not isinstance(name, str) or not name:
            raise MalformedRecord(line_no, "concepts", "name must be a non-empty string")
        if not isinstance(level, int) or isinstance(level, bool) or level < 0:
            raise InvariantViolation(line_no, "concepts", f"bad level {level!r}")
        concepts.add((name, level))

    raw_refs = _require(obj, "references", line_no)
    if not isinstance(raw_refs, list) or not all(isinstance(r, str) for r in raw_refs):
        raise MalformedRecord(line_no, "references", "must be a list of strings")
    references = frozenset(raw_refs)
    if paper_id in references:
        raise InvariantViolation(line_no, "references", "paper cites itself")

    raw_auth = _require(obj, "authorships", line_no)
    if not isinstance(raw_auth, list):
        raise MalformedRecord(line_no, "authorships", "must be a list")
    if not raw_auth:
        raise InvariantViolation(line_no, "authorships", "must be non-empty")
    authorships = []
    for a in raw_auth:
        if not isinstance(a, dict):
            raise MalformedRecord(line_no, "authorships", "entries must be objects")
        try:
            rec = AuthorshipRecord(
                author_id=a["author_id"],
                position=a["position"],
                country=a["country"],
                institution_id=a.get("institution_id", ""),
            )
        except KeyError as exc:
            raise MalformedRecord(line_no, "authorships", f"missing {exc.args[0]}")
        if not isinstance(rec.author_id, str) or not rec.author_id:
            raise InvariantViolation(line_no, "authorships", "empty author_id")
        if not isinstance(rec.country, str) or not rec.country.strip():
            raise InvariantViolation(line_no, "authorships", "empty country")
        if not isinstance(rec.position, int) or isinstance(rec.position, bool):
            raise MalformedRecord(line_no, "authorships", "position must be an integer")
        authorships.append(rec)
    positions = sorted(a.position for a in authorships)
    if positions != list(range(len(authorships))):
        raise InvariantViolation(
            line_no, "authorships", f"positions {positions} are not 0..{len(authorships) - 1}"
        )
    authorships.sort(key=lambda a: a.position)

    return PublicationRecord(
        paper_id=paper_id,
        year=year,
        pub_date=pub_date,
        journal_id=journal_id,
        impact_factor=impact_factor,
        concepts=frozenset(concepts),
        references=references,
        authorships=tuple(authorships),
    )


def read_corpus(lines: Iterable[str]) -> Iterator[PublicationRecord]:
    """Parse a corpus stream, skipping blank lines."""
    for line_no, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        yield parse_publication_line(line, line_no)


def publication_to_json(record: PublicationRecord) -> str:
    """Serialize one record to its canonical corpus line (sorted, compact).

    Canonical form: concepts and references sorted, authorships by position,
    so equal records serialize to equal bytes.
    """
    obj = {
        "paper_id": record.paper_id,
        "year": record.year,
        "pub_date": record.pub_date.isoformat() if record.pub_date else None,
        "journal_id": record.journal_id,
        "impact_factor": record.impact_factor,
        "concepts": [
            {"name": n, "level": l} for n, l in sorted(record.concepts)
        ],
        "references": sorted(record.references),
        "authorships": [
            {
                "author_id": a.author_id,
                "position": a.position,
                "country": a.country,
                "institution_id": a.institution_id,
            }
            for a in record.authorships
        ],
    }
    return json.dumps(obj, separators=(",", ":"), ensure_ascii=False)


@dataclass(frozen=True)
class ContributionRecord:
    """Pre-tokenized contribution statement for one author on one paper."""

    paper_id: str
    author_id: str
    verbs: tuple[str, ...]


def parse_contribution_line(line: str, line_no: int = 0) -> ContributionRecord:
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        raise MalformedRecord(line_no, "<line>", f"invalid JSON: {exc}")
    if not isinstance(obj, dict):
        raise MalformedRecord(line_no, "<line>", "record is not an object")
    paper_id = _require(obj, "paper_id", line_no)
    author_id = _require(obj, "author_id", line_no)
    verbs = _require(obj, "verbs", line_no)
    if not isinstance(verbs, list) or not all(isinstance(v, str) for v in verbs):
        raise MalformedRecord(line_no, "verbs", "must be a list of strings")
    if not verbs:
        raise InvariantViolation(line_no, "verbs", "must be non-empty")
    return ContributionRecord(paper_id=paper_id, author_id=author_id, verbs=tuple(verbs))


def read_contributions(lines: Iterable[str]) -> Iterator[ContributionRecord]:
    for line_no, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        yield parse_contribution_line(line, line_no)


def write_corpus(records: Iterable[PublicationRecord], fh: TextIO) -> int:
    n = 0
    for rec in records:
        fh.write(publication_to_json(rec) + "\n")
        n += 1
    return n


def contribution_to_json(record: ContributionRecord) -> str:
    obj = {
        "paper_id": record.paper_id,
        "author_id": record.author_id,
        "verbs": list(record.verbs),
    }
    return json.dumps(obj, separators=(",", ":"), ensure_ascii=False)


def write_contributions(records: Iterable[ContributionRecord], fh: TextIO) -> int:
    n = 0
    for rec in records:
        fh.write(contribution_to_json(rec) + "\n")
        n += 1
    return n
