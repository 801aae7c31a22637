"""Per-domain tf-idf scoring of Chinese keywords.

Each research domain's keyword lists are concatenated into one long
domain document; tf is the raw slot count of a keyword in that document,
idf = ln(n_domains / n_domains_containing_it).  A keyword occurring in every
domain therefore scores zero, which filters generic keywords out.  Only
Chinese keywords are scored; English keywords take part in translation
pairing only.
"""

from __future__ import annotations

import logging
import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Sequence, TextIO

from .records import PaperRecord

logger = logging.getLogger(__name__)
logger.addHandler(logging.NullHandler())


@dataclass
class DomainDocument:
    """Keyword multiset of one domain (every list slot counts, repeats too)."""

    domain: str
    term_counts: Counter

    @property
    def total_terms(self) -> int:
        return sum(self.term_counts.values())


@dataclass
class TermScore:
    keyword: str
    domain: str
    tf: int
    df: int
    idf: float
    tfidf: float
    percentile: float  # rank position within the domain, 0.0 = best


def score_sort_key(score: TermScore) -> tuple:
    """Total order used everywhere: tfidf desc, tf desc, keyword asc."""
    return (-score.tfidf, -score.tf, score.keyword)


def build_domain_documents(records: Iterable[PaperRecord]) -> list[DomainDocument]:
    """Concatenate keyword lists per domain into counting documents.

    Requires every record to carry a domain.  Mergeable by construction:
    counting is associative and commutative over record shards.
    """
    counts: dict[str, Counter] = {}
    for record in records:
        if record.domain is None:
            raise ValueError(f"record {record.paper_id} has no domain; classify first")
        doc = counts.get(record.domain)
        if doc is None:
            doc = counts[record.domain] = Counter()
        doc.update(record.keywords_zh)
    return [DomainDocument(domain, counts[domain]) for domain in sorted(counts)]


def merge_domain_documents(parts: Iterable[Sequence[DomainDocument]]) -> list[DomainDocument]:
    """Merge per-shard documents (same associative merge the builder uses)."""
    counts: dict[str, Counter] = {}
    for shard in parts:
        for doc in shard:
            counts.setdefault(doc.domain, Counter()).update(doc.term_counts)
    return [DomainDocument(domain, counts[domain]) for domain in sorted(counts)]


def compute_tfidf(docs: Sequence[DomainDocument]) -> list[TermScore]:
    """Score every (keyword, domain) pair with tf >= 1.

    Percentile within a domain is 100 * rank / (n - 1) for ranks 0..n-1 under
    the total order of :func:`score_sort_key`, so the best keyword sits at
    0.0 and the worst at 100.0.
    """
    if len(docs) < 2:
        logger.warning("tf-idf over %d domain document(s): all idf values are 0", len(docs))

    n_domains = len(docs)
    df: Counter = Counter()
    for doc in docs:
        df.update(doc.term_counts.keys())

    scores: list[TermScore] = []
    for doc in docs:
        domain_scores = []
        for keyword, tf in doc.term_counts.items():
            d = df[keyword]
            idf = math.log(n_domains / d)
            domain_scores.append(TermScore(keyword, doc.domain, tf, d, idf, tf * idf, 0.0))
        domain_scores.sort(key=score_sort_key)
        denom = max(1, len(domain_scores) - 1)
        for rank, score in enumerate(domain_scores):
            score.percentile = 100.0 * rank / denom
        scores.extend(domain_scores)
    return scores


def top_count(n: int, fraction: float) -> int:
    """ceil(fraction * n) with exact decimal arithmetic, so 0.1 of 20 is 2."""
    if not 0 < fraction <= 1:
        raise ValueError(f"fraction must be in (0, 1], got {fraction}")
    return math.ceil(Fraction(str(fraction)) * n)


def select_top(scores: Iterable[TermScore], domain: str, fraction: float) -> set[str]:
    """Best ceil(fraction * n) keywords of a domain under the total order."""
    domain_scores = [s for s in scores if s.domain == domain]
    if not domain_scores:
        logger.warning("select_top: no scores for domain %r", domain)
        if not 0 < fraction <= 1:
            raise ValueError(f"fraction must be in (0, 1], got {fraction}")
        return set()
    k = top_count(len(domain_scores), fraction)
    domain_scores.sort(key=score_sort_key)
    return {s.keyword for s in domain_scores[:k]}


def top_selection_by_domain(
    scores: Iterable[TermScore], fraction: float
) -> dict[str, set[str]]:
    """select_top for every domain at once (single pass grouping)."""
    by_domain: dict[str, list[TermScore]] = {}
    for s in scores:
        by_domain.setdefault(s.domain, []).append(s)
    out = {}
    for domain, domain_scores in by_domain.items():
        k = top_count(len(domain_scores), fraction)
        domain_scores.sort(key=score_sort_key)
        out[domain] = {s.keyword for s in domain_scores[:k]}
    return out


def ranked_keywords_by_domain(scores: Iterable[TermScore]) -> dict[str, list[TermScore]]:
    """Scores grouped per domain, each list sorted by the total order."""
    by_domain: dict[str, list[TermScore]] = {}
    for s in scores:
        by_domain.setdefault(s.domain, []).append(s)
    for domain_scores in by_domain.values():
        domain_scores.sort(key=score_sort_key)
    return by_domain


SCORE_COLUMNS = ("keyword", "domain", "tf", "df", "idf", "tfidf", "percentile")


def write_scores(scores: Iterable[TermScore], stream: TextIO) -> None:
    """Tab-separated score dump; floats use repr so they round-trip exactly."""
    rows = sorted(scores, key=lambda s: (s.domain, score_sort_key(s)))
    for s in rows:
        stream.write(
            f"{s.keyword}\t{s.domain}\t{s.tf}\t{s.df}\t{s.idf!r}\t{s.tfidf!r}\t{s.percentile!r}\n"
        )


def write_scores_file(scores: Iterable[TermScore], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        write_scores(scores, fh)


def read_scores(stream: Iterable[str]) -> list[TermScore]:
    scores = []
    for line_no, line in enumerate(stream, 1):
        line = line.rstrip("\n")
        if not line:
            continue
        parts = line.split("\t")
        if len(parts) != len(SCORE_COLUMNS):
            raise ValueError(f"score line {line_no}: expected {len(SCORE_COLUMNS)} columns")
        keyword, domain, tf, df, idf, tfidf, percentile = parts
        scores.append(
            TermScore(keyword, domain, int(tf), int(df), float(idf), float(tfidf), float(percentile))
        )
    return scores


def read_scores_file(path: str | Path) -> list[TermScore]:
    with open(path, encoding="utf-8") as fh:
        return read_scores(fh)
