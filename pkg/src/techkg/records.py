"""Bibliographic record parsing, normalization, and journal-based domain
classification.

Input records arrive as UTF-8 JSON lines (one object per line) or through a
CSV adapter with a fixed column order (see ``CSV_COLUMNS``).  Every string
field is whitespace-normalized on the way in; list fields keep their source
order, which downstream extraction depends on (author positions, keyword
hierarchy, positional translation pairing).
"""

from __future__ import annotations

import csv
import json
import logging
import sys
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Iterator, TextIO

logger = logging.getLogger(__name__)
logger.addHandler(logging.NullHandler())

#: Reserved domain for papers whose journal is absent from the map.
UNMAPPED_DOMAIN = "unmapped"

#: Fields that must be present and non-empty for a record to be accepted.
REQUIRED_FIELDS = ("paper_id", "title_zh", "journal", "year")

LIST_FIELDS = (
    "authors_zh",
    "authors_en",
    "affiliations_zh",
    "affiliations_en",
    "keywords_zh",
    "keywords_en",
)

OPTIONAL_TEXT_FIELDS = ("title_en", "abstract_zh", "abstract_en")

#: Column order of the CSV adapter.  List columns are "|"-separated.
CSV_COLUMNS = (
    "paper_id",
    "title_zh",
    "title_en",
    "authors_zh",
    "authors_en",
    "affiliations_zh",
    "affiliations_en",
    "keywords_zh",
    "keywords_en",
    "abstract_zh",
    "abstract_en",
    "journal",
    "year",
)

CSV_LIST_SEPARATOR = "|"


class MalformedRecordError(ValueError):
    """Raised in strict mode when an input line cannot be parsed."""


def normalize_text(value: str) -> str:
    """Trim and collapse internal whitespace runs to a single space."""
    return " ".join(value.split())


def normalize_list(values: Iterable[str]) -> list[str]:
    """Normalize each element and drop the ones that become empty."""
    out = []
    for v in values:
        v = normalize_text(v)
        if v:
            out.append(sys.intern(v))
    return out


def parse_year(value) -> int | None:
    """Accept 4-digit calendar years only; everything else yields None."""
    if isinstance(value, bool):
        return None
    if isinstance(value, int):
        return value if 1000 <= value <= 9999 else None
    if isinstance(value, str):
        v = value.strip()
        if len(v) == 4 and v.isdigit():
            return int(v)
    return None


@dataclass
class PaperRecord:
    """One bibliographic record.

    ``year`` is None when the source value was present but not a 4-digit
    integer; such records are kept but emit no published_year triple.
    ``domain`` stays None until :func:`classify_domain` fills it.
    """

    paper_id: str
    title_zh: str
    journal: str
    year: int | None
    title_en: str | None = None
    authors_zh: list[str] = field(default_factory=list)
    authors_en: list[str] = field(default_factory=list)
    affiliations_zh: list[str] = field(default_factory=list)
    affiliations_en: list[str] = field(default_factory=list)
    keywords_zh: list[str] = field(default_factory=list)
    keywords_en: list[str] = field(default_factory=list)
    abstract_zh: str | None = None
    abstract_en: str | None = None
    domain: str | None = None


@dataclass
class ParseIssue:
    line_no: int
    reason: str


@dataclass
class ParseReport:
    """Outcome of a parse run: accepted records plus per-line diagnostics."""

    records: list[PaperRecord] = field(default_factory=list)
    malformed: list[ParseIssue] = field(default_factory=list)
    rejected: list[ParseIssue] = field(default_factory=list)

    @property
    def malformed_count(self) -> int:
        return len(self.malformed)

    @property
    def rejected_count(self) -> int:
        return len(self.rejected)


def _record_from_mapping(raw: dict, line_no: int, report: ParseReport) -> PaperRecord | None:
    for name in REQUIRED_FIELDS:
        if name == "year":
            # the year key must exist, but an unparseable value only drops
            # the field (the record stays, minus its published_year triple)
            if name not in raw:
                report.rejected.append(ParseIssue(line_no, "missing required field: year"))
                return None
            continue
        value = raw.get(name)
        if value is None or (isinstance(value, str) and not value.strip()):
            report.rejected.append(ParseIssue(line_no, f"missing required field: {name}"))
            return None

    kwargs: dict = {}
    for name in LIST_FIELDS:
        value = raw.get(name, [])
        if value is None:
            value = []
        if not isinstance(value, list) or not all(isinstance(v, str) for v in value):
            raise TypeError(f"field {name} must be a list of strings")
        kwargs[name] = normalize_list(value)
    for name in OPTIONAL_TEXT_FIELDS:
        value = raw.get(name)
        if value is not None and not isinstance(value, str):
            raise TypeError(f"field {name} must be a string")
        value = normalize_text(value) if value else None
        kwargs[name] = value or None

    domain = raw.get("domain")
    if domain is not None and not isinstance(domain, str):
        raise TypeError("field domain must be a string")

    return PaperRecord(
        paper_id=normalize_text(str(raw["paper_id"])),
        title_zh=normalize_text(str(raw["title_zh"])),
        journal=sys.intern(normalize_text(str(raw["journal"]))),
        year=parse_year(raw["year"]),
        domain=sys.intern(normalize_text(domain)) if domain else None,
        **kwargs,
    )


def parse_records(lines: Iterable[str], strict: bool = False) -> ParseReport:
    """Parse a JSON-lines record stream.

    Malformed lines are logged and skipped (strict mode raises instead);
    records missing a required field are rejected and counted.  Blank lines
    are ignored.
    """
    report = ParseReport()
    for line_no, line in enumerate(lines, 1):
        if not line.strip():
            continue
        try:
            raw = json.loads(line)
            if not isinstance(raw, dict):
                raise TypeError("record line must be a JSON object")
            record = _record_from_mapping(raw, line_no, report)
        except (json.JSONDecodeError, TypeError, ValueError) as exc:
            if strict:
                raise MalformedRecordError(f"line {line_no}: {exc}") from exc
            logger.error("malformed record at line %d: %s", line_no, exc)
            report.malformed.append(ParseIssue(line_no, str(exc)))
            continue
        if record is not None:
            report.records.append(record)
    return report


def parse_records_file(path: str | Path, strict: bool = False) -> ParseReport:
    with open(path, encoding="utf-8") as fh:
        return parse_records(fh, strict=strict)


def parse_csv_records(stream: TextIO, strict: bool = False) -> ParseReport:
    """CSV adapter.  Columns follow ``CSV_COLUMNS``; list columns use '|' as
    the element separator.  A header row equal to the column names is allowed
    and skipped."""
    report = ParseReport()
    reader = csv.reader(stream)
    for line_no, row in enumerate(reader, 1):
        if not row or (line_no == 1 and tuple(row) == CSV_COLUMNS):
            continue
        try:
            if len(row) != len(CSV_COLUMNS):
                raise ValueError(f"expected {len(CSV_COLUMNS)} columns, got {len(row)}")
            raw: dict = dict(zip(CSV_COLUMNS, row))
            for name in LIST_FIELDS:
                cell = raw[name]
                raw[name] = cell.split(CSV_LIST_SEPARATOR) if cell else []
            for name in OPTIONAL_TEXT_FIELDS:
                raw[name] = raw[name] or None
            record = _record_from_mapping(raw, line_no, report)
        except (TypeError, ValueError) as exc:
            if strict:
                raise MalformedRecordError(f"line {line_no}: {exc}") from exc
            logger.error("malformed CSV record at line %d: %s", line_no, exc)
            report.malformed.append(ParseIssue(line_no, str(exc)))
            continue
        if record is not None:
            report.records.append(record)
    return report


def record_to_dict(record: PaperRecord) -> dict:
    # year None serializes as null: the key stays present, so the record
    # round-trips instead of being rejected on re-parse
    out: dict = {
        "paper_id": record.paper_id,
        "title_zh": record.title_zh,
        "journal": record.journal,
        "year": record.year,
    }
    for name in OPTIONAL_TEXT_FIELDS:
        value = getattr(record, name)
        if value is not None:
            out[name] = value
    for name in LIST_FIELDS:
        value = getattr(record, name)
        if value:
            out[name] = value
    if record.domain is not None:
        out["domain"] = record.domain
    return out


def serialize_records(records: Iterable[PaperRecord], stream: TextIO) -> None:
    """Write records as JSON lines; parse(serialize(rs)) == rs for normalized
    records with a valid year."""
    for record in records:
        json.dump(record_to_dict(record), stream, ensure_ascii=False, sort_keys=True)
        stream.write("\n")


def serialize_records_file(records: Iterable[PaperRecord], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        serialize_records(records, fh)


def normalize_journal(name: str) -> str:
    """Journal names are matched case-insensitively with collapsed whitespace."""
    return normalize_text(name).casefold()


@dataclass
class JournalDomainMap:
    """Mapping from normalized journal name to its single research domain."""

    entries: dict[str, str]

    @property
    def domains(self) -> frozenset[str]:
        return frozenset(self.entries.values())

    def lookup(self, journal: str) -> str | None:
        return self.entries.get(normalize_journal(journal))


def load_journal_map(path: str | Path) -> JournalDomainMap:
    """Read a two-column ``journal<TAB>domain`` file; '#' starts a comment."""
    entries: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise ValueError(f"{path}:{line_no}: expected 'journal<TAB>domain'")
            journal, domain = normalize_journal(parts[0]), normalize_text(parts[1])
            if not journal or not domain:
                raise ValueError(f"{path}:{line_no}: empty journal or domain")
            if entries.get(journal, domain) != domain:
                raise ValueError(
                    f"{path}:{line_no}: journal {journal!r} mapped to both "
                    f"{entries[journal]!r} and {domain!r}"
                )
            entries[journal] = sys.intern(domain)
    return JournalDomainMap(entries)


def classify_domain(record: PaperRecord, journal_map: JournalDomainMap) -> PaperRecord:
    """Return a copy of the record with its domain set from the journal map.

    Journals absent from the map fall into the reserved ``unmapped`` domain so
    that downstream triple counts stay auditable.
    """
    domain = journal_map.lookup(record.journal)
    return replace(record, domain=domain if domain is not None else UNMAPPED_DOMAIN)


def classify_all(
    records: Iterable[PaperRecord], journal_map: JournalDomainMap
) -> tuple[list[PaperRecord], int]:
    """Classify every record; returns (records, unmapped_count)."""
    out = []
    unmapped = 0
    for record in records:
        classified = classify_domain(record, journal_map)
        if classified.domain == UNMAPPED_DOMAIN:
            unmapped += 1
        out.append(classified)
    return out, unmapped


def iter_record_lines(path: str | Path) -> Iterator[str]:
    with open(path, encoding="utf-8") as fh:
        yield from fh
