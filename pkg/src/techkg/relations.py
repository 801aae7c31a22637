"""Heuristic relation extraction over bibliographic records.

Sixteen relation types total: thirteen per-paper structural relations read
straight off a record, plus three corpus-level ones (directed ``hierarchical``
between keywords, keyword ``translation_of``, both strictly threshold-gated)
and confidence aggregation for the symmetric relations.

Entities are identified by (kind, exact normalized surface form).  There is
deliberately no disambiguation: identical surface forms collide, and the
analytics module measures exactly that collision rate.
"""

from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Iterator, Sequence

from .records import PaperRecord

logger = logging.getLogger(__name__)
logger.addHandler(logging.NullHandler())


class Relation(str, Enum):
    AUTHOR_OF = "author_of"
    FIRST_AUTHOR = "first_author"
    SECOND_AUTHOR = "second_author"
    CO_AUTHOR = "co_author"
    RESEARCH_INTEREST = "research_interest"
    AFFILIATION = "affiliation"
    BELONGED_DOMAIN = "belonged_domain"
    CO_OCCURRENCE_WITH = "co_occurrence_with"
    HIERARCHICAL = "hierarchical"
    PUBLISHED_YEAR = "published_year"
    CONTAINED_CHN_KEYWORDS = "contained_chn_keywords"
    CONTAINED_ENG_KEYWORDS = "contained_eng_keywords"
    OTHER_AUTHOR = "other_author"
    ALL_AUTHORS = "all_authors"
    PUBLISHED_JOURNAL = "published_journal"
    TRANSLATION_OF = "translation_of"

    @property
    def symmetric(self) -> bool:
        return self in SYMMETRIC_RELATIONS


SYMMETRIC_RELATIONS = frozenset(
    {Relation.CO_AUTHOR, Relation.TRANSLATION_OF, Relation.CO_OCCURRENCE_WITH}
)

#: Relations whose triples carry a supporting-paper count.
CONFIDENCE_RELATIONS = frozenset(
    {
        Relation.CO_OCCURRENCE_WITH,
        Relation.CO_AUTHOR,
        Relation.TRANSLATION_OF,
        Relation.HIERARCHICAL,
    }
)


class EntityKind(str, Enum):
    AUTHOR = "author"
    KEYWORD = "keyword"
    TITLE = "title"
    AFFILIATION = "affiliation"
    DOMAIN = "domain"
    JOURNAL = "journal"
    YEAR = "year"
    PAPER = "paper"
    COMPOSITE = "composite"


#: (kind, surface) — the identity of a node.
EntityId = tuple[str, str]

#: Fixed endpoint kinds per relation; translation_of is polymorphic (None).
RELATION_ENDPOINT_KINDS: dict[Relation, tuple[str, str] | None] = {
    Relation.AUTHOR_OF: (EntityKind.AUTHOR.value, EntityKind.PAPER.value),
    Relation.FIRST_AUTHOR: (EntityKind.AUTHOR.value, EntityKind.PAPER.value),
    Relation.SECOND_AUTHOR: (EntityKind.AUTHOR.value, EntityKind.PAPER.value),
    Relation.OTHER_AUTHOR: (EntityKind.AUTHOR.value, EntityKind.PAPER.value),
    Relation.CO_AUTHOR: (EntityKind.AUTHOR.value, EntityKind.AUTHOR.value),
    Relation.RESEARCH_INTEREST: (EntityKind.AUTHOR.value, EntityKind.KEYWORD.value),
    Relation.AFFILIATION: (EntityKind.AUTHOR.value, EntityKind.AFFILIATION.value),
    Relation.BELONGED_DOMAIN: (EntityKind.KEYWORD.value, EntityKind.DOMAIN.value),
    Relation.CO_OCCURRENCE_WITH: (EntityKind.KEYWORD.value, EntityKind.KEYWORD.value),
    Relation.HIERARCHICAL: (EntityKind.KEYWORD.value, EntityKind.KEYWORD.value),
    Relation.PUBLISHED_YEAR: (EntityKind.PAPER.value, EntityKind.YEAR.value),
    Relation.CONTAINED_CHN_KEYWORDS: (EntityKind.PAPER.value, EntityKind.COMPOSITE.value),
    Relation.CONTAINED_ENG_KEYWORDS: (EntityKind.PAPER.value, EntityKind.COMPOSITE.value),
    Relation.ALL_AUTHORS: (EntityKind.PAPER.value, EntityKind.COMPOSITE.value),
    Relation.PUBLISHED_JOURNAL: (EntityKind.PAPER.value, EntityKind.JOURNAL.value),
    Relation.TRANSLATION_OF: None,
}

#: Endpoint kind pairs translation_of may connect, in import preference order.
TRANSLATION_KIND_PAIRS: tuple[tuple[str, str], ...] = (
    (EntityKind.KEYWORD.value, EntityKind.KEYWORD.value),
    (EntityKind.AUTHOR.value, EntityKind.AUTHOR.value),
    (EntityKind.AFFILIATION.value, EntityKind.AFFILIATION.value),
    (EntityKind.PAPER.value, EntityKind.TITLE.value),
)


@dataclass(frozen=True)
class Triple:
    """One ⟨head, relation, tail⟩ fact.

    Symmetric triples are canonicalized on construction: the endpoint with
    the lexicographically smaller surface form becomes the head, so a pair is
    never stored in both orientations.
    """

    head: EntityId
    relation: Relation
    tail: EntityId
    confidence: int | None = None

    @staticmethod
    def make(
        head: EntityId, relation: Relation, tail: EntityId, confidence: int | None = None
    ) -> "Triple":
        if relation in SYMMETRIC_RELATIONS and (tail[1], tail[0]) < (head[1], head[0]):
            head, tail = tail, head
        return Triple(head, relation, tail, confidence)

    @property
    def key(self) -> tuple[str, EntityId, EntityId]:
        return (self.relation.value, self.head, self.tail)


@dataclass
class ExtractionConfig:
    """Knobs of the extraction rules.

    Thresholds are strict lower bounds: a corpus count equal to the threshold
    emits nothing.  ``research_interest_scope`` is ``first_author`` (the
    normative reading) or ``all_authors``.
    """

    hierarchical_threshold: int = 3
    translation_threshold: int = 2
    research_interest_scope: str = "first_author"
    composite_join: str = "+"

    def __post_init__(self) -> None:
        if self.hierarchical_threshold < 1:
            raise ValueError("hierarchical_threshold must be >= 1")
        if self.translation_threshold < 1:
            raise ValueError("translation_threshold must be >= 1")
        if self.research_interest_scope not in ("first_author", "all_authors"):
            raise ValueError(
                "research_interest_scope must be 'first_author' or 'all_authors'"
            )
        if not self.composite_join:
            raise ValueError("composite_join must be non-empty")


def dedup_keep_order(items: Sequence[str]) -> list[str]:
    return list(dict.fromkeys(items))


def _author(a: str) -> EntityId:
    return (EntityKind.AUTHOR.value, a)


def _keyword(k: str) -> EntityId:
    return (EntityKind.KEYWORD.value, k)


def paper_node(record: PaperRecord) -> EntityId:
    """The paper itself is identified by its Chinese title."""
    return (EntityKind.PAPER.value, record.title_zh)


def extract_paper_local_triples(
    record: PaperRecord, config: ExtractionConfig
) -> list[Triple]:
    """Emit every per-paper structural triple for one record.

    Absent optional fields simply suppress their relation families (no
    authors means no author relations at all, and so on).  Symmetric triples
    come out with confidence 1 -- a single supporting paper -- which the
    corpus-level aggregation passes later override via max-merge.
    """
    if record.domain is None:
        raise ValueError(f"record {record.paper_id} has no domain; classify first")

    triples: list[Triple] = []
    paper = paper_node(record)
    authors = record.authors_zh
    m = len(authors)
    join = config.composite_join

    for a in authors:
        triples.append(Triple(_author(a), Relation.AUTHOR_OF, paper))
    if m >= 1:
        triples.append(Triple(_author(authors[0]), Relation.FIRST_AUTHOR, paper))
    if m >= 2:
        triples.append(Triple(_author(authors[1]), Relation.SECOND_AUTHOR, paper))
    for a in authors[2:]:
        triples.append(Triple(_author(a), Relation.OTHER_AUTHOR, paper))
    if m >= 1:
        composite = (EntityKind.COMPOSITE.value, join.join(authors))
        triples.append(Triple(paper, Relation.ALL_AUTHORS, composite))

    unique_authors = dedup_keep_order(authors)
    for i, a in enumerate(unique_authors):
        for b in unique_authors[i + 1 :]:
            triples.append(Triple.make(_author(a), Relation.CO_AUTHOR, _author(b), 1))

    keywords = dedup_keep_order(record.keywords_zh)
    if m >= 1:
        interested = unique_authors if config.research_interest_scope == "all_authors" else unique_authors[:1]
        for a in interested:
            for k in keywords:
                triples.append(Triple(_author(a), Relation.RESEARCH_INTEREST, _keyword(k)))

    # Full author x affiliation cross product: the record format carries no
    # positional author-affiliation markers.
    for a in unique_authors:
        for o in dedup_keep_order(record.affiliations_zh):
            triples.append(
                Triple(_author(a), Relation.AFFILIATION, (EntityKind.AFFILIATION.value, o))
            )

    domain_node = (EntityKind.DOMAIN.value, record.domain)
    for k in keywords:
        triples.append(Triple(_keyword(k), Relation.BELONGED_DOMAIN, domain_node))
    for i, k in enumerate(keywords):
        for k2 in keywords[i + 1 :]:
            triples.append(
                Triple.make(_keyword(k), Relation.CO_OCCURRENCE_WITH, _keyword(k2), 1)
            )

    if record.year is not None:
        triples.append(
            Triple(paper, Relation.PUBLISHED_YEAR, (EntityKind.YEAR.value, str(record.year)))
        )
    if record.keywords_zh:
        composite = (EntityKind.COMPOSITE.value, join.join(record.keywords_zh))
        triples.append(Triple(paper, Relation.CONTAINED_CHN_KEYWORDS, composite))
    if record.keywords_en:
        composite = (EntityKind.COMPOSITE.value, join.join(record.keywords_en))
        triples.append(Triple(paper, Relation.CONTAINED_ENG_KEYWORDS, composite))
    triples.append(
        Triple(paper, Relation.PUBLISHED_JOURNAL, (EntityKind.JOURNAL.value, record.journal))
    )

    triples.extend(_direct_translation_triples(record, confidence=1))
    return triples


def _direct_translation_pairs(record: PaperRecord) -> Iterator[tuple[EntityId, EntityId]]:
    """Positional bilingual pairs for title, authors, and affiliations."""
    if record.title_en is not None:
        yield (paper_node(record), (EntityKind.TITLE.value, record.title_en))
    for a_zh, a_en in zip(record.authors_zh, record.authors_en):
        yield (_author(a_zh), _author(a_en))
    for o_zh, o_en in zip(record.affiliations_zh, record.affiliations_en):
        yield (
            (EntityKind.AFFILIATION.value, o_zh),
            (EntityKind.AFFILIATION.value, o_en),
        )


def _direct_translation_triples(record: PaperRecord, confidence: int) -> list[Triple]:
    return [
        Triple.make(zh, Relation.TRANSLATION_OF, en, confidence)
        for zh, en in _direct_translation_pairs(record)
    ]


@dataclass
class OrderedPairCount:
    """Directional evidence for one keyword pair.

    ordered_count(k1,k2) + ordered_count(k2,k1) <= co_count(k1,k2), with
    equality when keyword lists never repeat a keyword.
    """

    k1: str
    k2: str
    ordered_count: int
    co_count: int


def ordered_pair_counts(records: Iterable[PaperRecord]) -> Counter:
    """Count, per ordered keyword pair (k1, k2), the papers in which k1
    precedes k2 anywhere in the (deduplicated) keyword list."""
    counts: Counter = Counter()
    for record in records:
        keywords = dedup_keep_order(record.keywords_zh)
        for i, k1 in enumerate(keywords):
            for k2 in keywords[i + 1 :]:
                counts[(k1, k2)] += 1
    return counts


def cooccurrence_counts(records: Iterable[PaperRecord]) -> Counter:
    """Papers containing both keywords, keyed by canonically ordered pair."""
    counts: Counter = Counter()
    for record in records:
        keywords = sorted(set(record.keywords_zh))
        for i, k1 in enumerate(keywords):
            for k2 in keywords[i + 1 :]:
                counts[(k1, k2)] += 1
    return counts


def ordered_pair_stats(records: Sequence[PaperRecord]) -> list[OrderedPairCount]:
    """Join ordered and co-occurrence counts for inspection or post-filtering."""
    ordered = ordered_pair_counts(records)
    co = cooccurrence_counts(records)
    return [
        OrderedPairCount(k1, k2, n, co[tuple(sorted((k1, k2)))])
        for (k1, k2), n in sorted(ordered.items())
    ]


def hierarchical_triples_from_counts(counts: Counter, threshold: int) -> list[Triple]:
    if threshold < 1:
        raise ValueError("threshold must be >= 1")
    return [
        Triple(_keyword(k1), Relation.HIERARCHICAL, _keyword(k2), n)
        for (k1, k2), n in sorted(counts.items())
        if n > threshold
    ]


def mine_hierarchical(records: Iterable[PaperRecord], threshold: int) -> list[Triple]:
    """Directed keyword hierarchy: emit ⟨k1, hierarchical, k2⟩ when k1
    precedes k2 in strictly more than ``threshold`` papers.

    Both directions may qualify independently; each triple's confidence is
    its own directional count.
    """
    return hierarchical_triples_from_counts(ordered_pair_counts(records), threshold)


def cooccurrence_triples_from_counts(counts: Counter) -> list[Triple]:
    return [
        Triple.make(_keyword(k1), Relation.CO_OCCURRENCE_WITH, _keyword(k2), n)
        for (k1, k2), n in sorted(counts.items())
    ]


def aggregate_cooccurrence(records: Iterable[PaperRecord]) -> list[Triple]:
    """One canonical co_occurrence_with triple per keyword pair, confidence =
    number of papers whose keyword list contains both."""
    return cooccurrence_triples_from_counts(cooccurrence_counts(records))


def coauthor_counts(records: Iterable[PaperRecord]) -> Counter:
    counts: Counter = Counter()
    for record in records:
        authors = sorted(set(record.authors_zh))
        for i, a in enumerate(authors):
            for b in authors[i + 1 :]:
                counts[(a, b)] += 1
    return counts


def coauthor_triples_from_counts(counts: Counter) -> list[Triple]:
    return [
        Triple.make(_author(a), Relation.CO_AUTHOR, _author(b), n)
        for (a, b), n in sorted(counts.items())
    ]


def aggregate_coauthorships(records: Iterable[PaperRecord]) -> list[Triple]:
    """co_author triples with confidence = number of jointly authored papers."""
    return coauthor_triples_from_counts(coauthor_counts(records))


def direct_translation_counts(records: Iterable[PaperRecord]) -> Counter:
    """Supporting-paper counts for title/author/affiliation bilingual pairs,
    keyed by canonicalized (head, tail) entity ids."""
    counts: Counter = Counter()
    for record in records:
        for zh, en in _direct_translation_pairs(record):
            triple = Triple.make(zh, Relation.TRANSLATION_OF, en)
            counts[(triple.head, triple.tail)] += 1
    return counts


def direct_translation_triples_from_counts(counts: Counter) -> list[Triple]:
    return [
        Triple(h, Relation.TRANSLATION_OF, t, n) for (h, t), n in sorted(counts.items())
    ]


def aggregate_direct_translations(records: Iterable[PaperRecord]) -> list[Triple]:
    """Title/author/affiliation translation pairs with corpus-wide support
    counts (the per-paper emission only sees one paper at a time)."""
    return direct_translation_triples_from_counts(direct_translation_counts(records))


def translation_candidate_counts(records: Iterable[PaperRecord]) -> Counter:
    """Positional (Chinese keyword, English keyword) candidate pair counts."""
    counts: Counter = Counter()
    for record in records:
        for ck, ek in zip(record.keywords_zh, record.keywords_en):
            counts[(ck, ek)] += 1
    return counts


def keyword_translation_triples_from_counts(counts: Counter, threshold: int) -> list[Triple]:
    if threshold < 1:
        raise ValueError("threshold must be >= 1")
    return [
        Triple.make(_keyword(ck), Relation.TRANSLATION_OF, _keyword(ek), n)
        for (ck, ek), n in sorted(counts.items())
        if n > threshold
    ]


def mine_keyword_translations(
    records: Iterable[PaperRecord], threshold: int
) -> list[Triple]:
    """Keyword translation_of triples for candidate pairs generated by
    strictly more than ``threshold`` papers."""
    return keyword_translation_triples_from_counts(
        translation_candidate_counts(records), threshold
    )


@dataclass
class PairCounters:
    """The five corpus-level counting maps, all associatively mergeable."""

    ordered: Counter
    cooccurrence: Counter
    coauthor: Counter
    direct_translation: Counter
    translation_candidates: Counter

    def merge(self, other: "PairCounters") -> None:
        self.ordered.update(other.ordered)
        self.cooccurrence.update(other.cooccurrence)
        self.coauthor.update(other.coauthor)
        self.direct_translation.update(other.direct_translation)
        self.translation_candidates.update(other.translation_candidates)


def _count_pairs(records: Sequence[PaperRecord]) -> PairCounters:
    return PairCounters(
        ordered=ordered_pair_counts(records),
        cooccurrence=cooccurrence_counts(records),
        coauthor=coauthor_counts(records),
        direct_translation=direct_translation_counts(records),
        translation_candidates=translation_candidate_counts(records),
    )


_shard_records: Sequence[PaperRecord] | None = None


def _count_shard(bounds: tuple[int, int]) -> PairCounters:
    assert _shard_records is not None
    lo, hi = bounds
    return _count_pairs(_shard_records[lo:hi])


def corpus_pair_counters(records: Sequence[PaperRecord], workers: int = 1) -> PairCounters:
    """Build all corpus-level counters, optionally sharded over worker
    processes (fork-based; shard results merge associatively, so the final
    counts are independent of sharding)."""
    if workers <= 1 or len(records) < 2 * workers:
        return _count_pairs(records)

    import multiprocessing

    try:
        ctx = multiprocessing.get_context("fork")
    except ValueError:  # pragma: no cover - non-fork platforms
        return _count_pairs(records)

    step = (len(records) + workers - 1) // workers
    bounds = [(lo, min(lo + step, len(records))) for lo in range(0, len(records), step)]
    global _shard_records
    _shard_records = records
    try:
        with ctx.Pool(workers) as pool:
            parts = pool.map(_count_shard, bounds)
    finally:
        _shard_records = None
    merged = parts[0]
    for part in parts[1:]:
        merged.merge(part)
    return merged


def paper_entity_mentions(record: PaperRecord, config: ExtractionConfig) -> set[EntityId]:
    """Every entity whose surface form occurs in this record, in any role.

    This is the unit of the mention count: one distinct source paper per
    entity, used later by the at-least-N-mentions subset filter.
    """
    ids: set[EntityId] = {paper_node(record)}
    if record.title_en is not None:
        ids.add((EntityKind.TITLE.value, record.title_en))
    for a in record.authors_zh:
        ids.add(_author(a))
    for a in record.authors_en:
        ids.add(_author(a))
    for o in record.affiliations_zh + record.affiliations_en:
        ids.add((EntityKind.AFFILIATION.value, o))
    for k in record.keywords_zh + record.keywords_en:
        ids.add(_keyword(k))
    ids.add((EntityKind.JOURNAL.value, record.journal))
    if record.domain is not None:
        ids.add((EntityKind.DOMAIN.value, record.domain))
    if record.year is not None:
        ids.add((EntityKind.YEAR.value, str(record.year)))
    join = config.composite_join
    if record.authors_zh:
        ids.add((EntityKind.COMPOSITE.value, join.join(record.authors_zh)))
    if record.keywords_zh:
        ids.add((EntityKind.COMPOSITE.value, join.join(record.keywords_zh)))
    if record.keywords_en:
        ids.add((EntityKind.COMPOSITE.value, join.join(record.keywords_en)))
    return ids
