"""Deduplicated in-memory triple store with mention counts and deterministic
TSV export.

Construction is single-writer; once built, the graph is read-only for every
analytics and derivation pass.  Exported bytes depend only on content, never
on insertion order.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Mapping, Sequence

from .records import PaperRecord
from .relations import (
    CONFIDENCE_RELATIONS,
    RELATION_ENDPOINT_KINDS,
    TRANSLATION_KIND_PAIRS,
    EntityId,
    EntityKind,
    ExtractionConfig,
    Relation,
    Triple,
    cooccurrence_triples_from_counts,
    coauthor_triples_from_counts,
    corpus_pair_counters,
    direct_translation_triples_from_counts,
    extract_paper_local_triples,
    hierarchical_triples_from_counts,
    keyword_translation_triples_from_counts,
    paper_entity_mentions,
)
from .terms import TermScore

logger = logging.getLogger(__name__)
logger.addHandler(logging.NullHandler())

TRIPLES_FILENAME = "triples.tsv"
ENTITIES_FILENAME = "entities.tsv"

TripleKey = tuple[str, EntityId, EntityId]


@dataclass
class Entity:
    kind: str
    surface: str
    mention_count: int = 0
    tf: int | None = None
    idf: float | None = None

    @property
    def id(self) -> EntityId:
        return (self.kind, self.surface)


class KnowledgeGraph:
    """Triple set + entity registry.

    Triples are stored as key -> confidence; duplicate inserts are no-ops
    except that confidence keeps the maximum supplied count (upstream always
    emits final corpus counts, so max is the right resolution).
    """

    def __init__(self) -> None:
        self._triples: dict[TripleKey, int | None] = {}
        self._entities: dict[EntityId, EntityId] = {}  # id interning table
        self._mentions: dict[EntityId, int] = {}
        self._tf: dict[EntityId, int] = {}
        self._idf: dict[EntityId, float] = {}
        self.rejected_triples = 0

    # -- construction ------------------------------------------------------

    def _intern(self, entity_id: EntityId) -> EntityId:
        return self._entities.setdefault(entity_id, entity_id)

    def insert(self, triples: Iterable[Triple]) -> None:
        """Idempotent set insertion with symmetric canonicalization."""
        store = self._triples
        for triple in triples:
            if not triple.head[1] or not triple.tail[1]:
                logger.warning("rejecting triple with empty surface form: %s", triple)
                self.rejected_triples += 1
                continue
            canonical = Triple.make(triple.head, triple.relation, triple.tail, triple.confidence)
            key = (
                canonical.relation.value,
                self._intern(canonical.head),
                self._intern(canonical.tail),
            )
            confidence = canonical.confidence
            if key in store:
                old = store[key]
                if confidence is not None and (old is None or confidence > old):
                    store[key] = confidence
            else:
                store[key] = confidence

    def note_paper_mentions(self, entity_ids: Iterable[EntityId]) -> None:
        """Record one source paper's worth of mentions (call once per paper)."""
        mentions = self._mentions
        for entity_id in entity_ids:
            entity_id = self._intern(entity_id)
            mentions[entity_id] = mentions.get(entity_id, 0) + 1

    def attach_term_scores(self, scores: Iterable[TermScore]) -> None:
        """Store per-keyword tf (summed over domains) and idf on entities."""
        for score in scores:
            entity_id = self._intern((EntityKind.KEYWORD.value, score.keyword))
            self._tf[entity_id] = self._tf.get(entity_id, 0) + score.tf
            self._idf[entity_id] = score.idf

    # -- read access -------------------------------------------------------

    def __len__(self) -> int:
        return len(self._triples)

    def __contains__(self, triple: Triple) -> bool:
        canonical = Triple.make(triple.head, triple.relation, triple.tail)
        return (canonical.relation.value, canonical.head, canonical.tail) in self._triples

    def iter_triples(self) -> Iterator[Triple]:
        for (relation, head, tail), confidence in self._triples.items():
            yield Triple(head, Relation(relation), tail, confidence)

    def triples_of(self, relation: Relation) -> Iterator[Triple]:
        value = relation.value
        for (rel, head, tail), confidence in self._triples.items():
            if rel == value:
                yield Triple(head, relation, tail, confidence)

    def entity_ids(self) -> set[EntityId]:
        """Entities participating in at least one triple."""
        ids: set[EntityId] = set()
        for (_, head, tail) in self._triples:
            ids.add(head)
            ids.add(tail)
        return ids

    def mention_count(self, entity_id: EntityId) -> int:
        return self._mentions.get(entity_id, 0)

    def entity(self, entity_id: EntityId) -> Entity:
        return Entity(
            kind=entity_id[0],
            surface=entity_id[1],
            mention_count=self._mentions.get(entity_id, 0),
            tf=self._tf.get(entity_id),
            idf=self._idf.get(entity_id),
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, KnowledgeGraph):
            return NotImplemented
        if self._triples != other._triples:
            return False
        mine, theirs = self.entity_ids(), other.entity_ids()
        if mine != theirs:
            return False
        for entity_id in mine:
            if (
                self._mentions.get(entity_id, 0) != other._mentions.get(entity_id, 0)
                or self._tf.get(entity_id) != other._tf.get(entity_id)
                or self._idf.get(entity_id) != other._idf.get(entity_id)
            ):
                return False
        return True


@dataclass
class RelationStats:
    relation: Relation
    entity_num: int
    triplet_num: int


@dataclass
class BasicStats:
    """Per-relation entity/triple counts plus deduplicated totals."""

    rows: list[RelationStats] = field(default_factory=list)
    total_entities: int = 0
    total_triples: int = 0


def report_basic_stats(kg: KnowledgeGraph) -> BasicStats:
    """EntityNum = distinct entities in at least one triple of the relation;
    the Total row deduplicates across relations, so it is at most the column
    sum."""
    per_relation_entities: dict[str, set[EntityId]] = {r.value: set() for r in Relation}
    per_relation_triples: dict[str, int] = {r.value: 0 for r in Relation}
    all_entities: set[EntityId] = set()
    total = 0
    for (relation, head, tail) in kg._triples:
        ents = per_relation_entities[relation]
        ents.add(head)
        ents.add(tail)
        all_entities.add(head)
        all_entities.add(tail)
        per_relation_triples[relation] += 1
        total += 1
    stats = BasicStats(total_entities=len(all_entities), total_triples=total)
    for relation in Relation:
        stats.rows.append(
            RelationStats(
                relation,
                len(per_relation_entities[relation.value]),
                per_relation_triples[relation.value],
            )
        )
    return stats


def write_basic_stats(stats: BasicStats, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("relation\tentity_num\ttriplet_num\n")
        for row in stats.rows:
            fh.write(f"{row.relation.value}\t{row.entity_num}\t{row.triplet_num}\n")
        fh.write(f"Total\t{stats.total_entities}\t{stats.total_triples}\n")


# -- persistence -----------------------------------------------------------


def export_graph(kg: KnowledgeGraph, directory: str | Path) -> None:
    """Write ``triples.tsv`` and ``entities.tsv``.

    Deterministic: triples sort by (relation, head surface, tail surface),
    entities by (kind, surface).  Surfaces cannot contain tabs or newlines
    (ingest normalization collapses all whitespace), so plain TSV is safe.
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)

    rows = sorted(
        kg._triples.items(), key=lambda kv: (kv[0][0], kv[0][1][1], kv[0][2][1], kv[0][1][0], kv[0][2][0])
    )
    with open(directory / TRIPLES_FILENAME, "w", encoding="utf-8") as fh:
        for (relation, head, tail), confidence in rows:
            conf = "" if confidence is None else str(confidence)
            fh.write(f"{head[1]}\t{relation}\t{tail[1]}\t{conf}\n")

    with open(directory / ENTITIES_FILENAME, "w", encoding="utf-8") as fh:
        for entity_id in sorted(kg.entity_ids()):
            entity = kg.entity(entity_id)
            tf = "" if entity.tf is None else str(entity.tf)
            idf = "" if entity.idf is None else repr(entity.idf)
            fh.write(f"{entity.surface}\t{entity.kind}\t{entity.mention_count}\t{tf}\t{idf}\n")


def _resolve_translation_kinds(
    head_surface: str, tail_surface: str, kinds_by_surface: Mapping[str, set[str]]
) -> tuple[EntityId, EntityId]:
    head_kinds = kinds_by_surface.get(head_surface, set())
    tail_kinds = kinds_by_surface.get(tail_surface, set())
    for k1, k2 in TRANSLATION_KIND_PAIRS:
        if k1 in head_kinds and k2 in tail_kinds:
            return ((k1, head_surface), (k2, tail_surface))
        if k2 in head_kinds and k1 in tail_kinds:
            return ((k2, head_surface), (k1, tail_surface))
    raise ValueError(
        f"cannot resolve translation_of endpoint kinds for "
        f"({head_surface!r}, {tail_surface!r})"
    )


def import_graph(directory: str | Path) -> KnowledgeGraph:
    """Inverse of :func:`export_graph` (import(export(kg)) == kg).

    The triple file stores surfaces only; endpoint kinds come from the fixed
    per-relation kind table, falling back to the entity file for the
    polymorphic translation_of pairs.
    """
    directory = Path(directory)
    kg = KnowledgeGraph()

    kinds_by_surface: dict[str, set[str]] = {}
    with open(directory / ENTITIES_FILENAME, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, 1):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 5:
                raise ValueError(f"entities.tsv:{line_no}: expected 5 columns")
            surface, kind, mentions, tf, idf = parts
            entity_id = kg._intern((kind, surface))
            if int(mentions):
                kg._mentions[entity_id] = int(mentions)
            if tf:
                kg._tf[entity_id] = int(tf)
            if idf:
                kg._idf[entity_id] = float(idf)
            kinds_by_surface.setdefault(surface, set()).add(kind)

    triples = []
    with open(directory / TRIPLES_FILENAME, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, 1):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 4:
                raise ValueError(f"triples.tsv:{line_no}: expected 4 columns")
            head_surface, relation_name, tail_surface, conf = parts
            relation = Relation(relation_name)
            kinds = RELATION_ENDPOINT_KINDS[relation]
            if kinds is None:
                head, tail = _resolve_translation_kinds(
                    head_surface, tail_surface, kinds_by_surface
                )
            else:
                head, tail = (kinds[0], head_surface), (kinds[1], tail_surface)
            confidence = int(conf) if conf else None
            triples.append(Triple.make(head, relation, tail, confidence))
    kg.insert(triples)
    return kg


# -- batch construction ----------------------------------------------------


def build_graph(
    records: Sequence[PaperRecord],
    config: ExtractionConfig | None = None,
    workers: int = 1,
) -> KnowledgeGraph:
    """Run the full extraction over a classified corpus.

    Per-paper structural triples and mention bookkeeping stream through the
    single writer; the corpus-level pair counters run (optionally sharded)
    afterwards and override the placeholder confidences via max-merge.
    """
    config = config or ExtractionConfig()
    kg = KnowledgeGraph()
    for record in records:
        kg.insert(extract_paper_local_triples(record, config))
        kg.note_paper_mentions(paper_entity_mentions(record, config))

    counters = corpus_pair_counters(records, workers=workers)
    kg.insert(cooccurrence_triples_from_counts(counters.cooccurrence))
    kg.insert(coauthor_triples_from_counts(counters.coauthor))
    kg.insert(direct_translation_triples_from_counts(counters.direct_translation))
    kg.insert(
        hierarchical_triples_from_counts(counters.ordered, config.hierarchical_threshold)
    )
    kg.insert(
        keyword_translation_triples_from_counts(
            counters.translation_candidates, config.translation_threshold
        )
    )
    return kg


def filter_graph(kg: KnowledgeGraph, keep) -> KnowledgeGraph:
    """New graph containing the entities satisfying ``keep(entity_id)`` and
    the triples whose both endpoints survive.  Mention counts and term
    statistics carry over."""
    out = KnowledgeGraph()
    surviving = {e for e in kg.entity_ids() if keep(e)}
    for (relation, head, tail), confidence in kg._triples.items():
        if head in surviving and tail in surviving:
            out._triples[(relation, out._intern(head), out._intern(tail))] = confidence
    for entity_id in surviving:
        interned = out._intern(entity_id)
        if entity_id in kg._mentions:
            out._mentions[interned] = kg._mentions[entity_id]
        if entity_id in kg._tf:
            out._tf[interned] = kg._tf[entity_id]
        if entity_id in kg._idf:
            out._idf[interned] = kg._idf[entity_id]
    return out
