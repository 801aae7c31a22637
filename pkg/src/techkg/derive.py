"""Derivation of the released by-product datasets from a built graph and its
source corpus: the filtered subset graph, terminology lists, bilingual term
pairs, labeled abstracts, distant-supervision RE bags, NER samples, template
question-answer items, and deterministic train/dev/test splits.

Everything here is a pure function of (inputs, seed).
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Mapping, Sequence, TypeVar

from .graph import KnowledgeGraph, filter_graph
from .records import PaperRecord
from .relations import EntityId, EntityKind, Relation, Triple
from .sampling import derived_rng, sample_keep_order
from .terms import TermScore, ranked_keywords_by_domain, top_selection_by_domain

logger = logging.getLogger(__name__)
logger.addHandler(logging.NullHandler())

T = TypeVar("T")

HIERARCHICAL_LABEL = "hierarchical"
NA_LABEL = "NA"


# -- sentence splitting ------------------------------------------------------


@dataclass
class SentenceSplitter:
    """Splits abstracts on terminal punctuation.

    Fullwidth terminators split unconditionally; ASCII ones only when
    followed by whitespace or end of text, so decimal points and version
    numbers survive.
    """

    hard_terminators: str = "。！？"
    soft_terminators: str = ".!?"

    def split(self, text: str) -> list[str]:
        sentences = []
        start = 0
        n = len(text)
        for i, ch in enumerate(text):
            if ch in self.hard_terminators or (
                ch in self.soft_terminators and (i + 1 == n or text[i + 1].isspace())
            ):
                sentence = text[start : i + 1].strip()
                if sentence:
                    sentences.append(sentence)
                start = i + 1
        tail = text[start:].strip()
        if tail:
            sentences.append(tail)
        return sentences


# -- TechKG10 ----------------------------------------------------------------


def surviving_keywords(scores: Sequence[TermScore], fraction: float) -> set[str]:
    """Keywords ranking in the top fraction of at least one of their domains."""
    survivors: set[str] = set()
    for selection in top_selection_by_domain(scores, fraction).values():
        survivors.update(selection)
    return survivors


def derive_techkg10(
    kg: KnowledgeGraph,
    scores: Sequence[TermScore],
    min_mentions: int = 10,
    fraction: float = 0.1,
) -> KnowledgeGraph:
    """Subset graph: keywords must rank in the top fraction of some domain,
    and every entity needs at least ``min_mentions`` source papers.  Triples
    survive only with both endpoints."""
    keyword_kind = EntityKind.KEYWORD.value
    survivors = surviving_keywords(scores, fraction)

    def keep(entity_id: EntityId) -> bool:
        if kg.mention_count(entity_id) < min_mentions:
            return False
        return entity_id[0] != keyword_kind or entity_id[1] in survivors

    return filter_graph(kg, keep)


# -- TechTerm / TechBiTerm ---------------------------------------------------


def derive_techterm(
    scores: Sequence[TermScore], per_domain: int = 10_000
) -> dict[str, list[str]]:
    """Per domain, its best-ranked keywords, at most ``per_domain`` of them."""
    if per_domain < 1:
        raise ValueError("per_domain must be >= 1")
    ranked = ranked_keywords_by_domain(scores)
    return {
        domain: [s.keyword for s in domain_scores[:per_domain]]
        for domain, domain_scores in sorted(ranked.items())
    }


@dataclass
class BiTermPair:
    chinese: str
    english: str
    confidence: int


def keyword_domains_from_scores(scores: Iterable[TermScore]) -> dict[str, set[str]]:
    domains: dict[str, set[str]] = {}
    for s in scores:
        domains.setdefault(s.keyword, set()).add(s.domain)
    return domains


def derive_techbiterm(
    translation_triples: Iterable[Triple],
    keyword_domains: Mapping[str, set[str]],
    per_domain: int = 10_000,
) -> dict[str, list[BiTermPair]]:
    """Per domain, the keyword translation pairs with the highest supporting
    counts.  The Chinese side is the endpoint known to the per-domain keyword
    scores (canonical triple storage does not keep language orientation); the
    pair is listed in every domain containing its Chinese keyword."""
    if per_domain < 1:
        raise ValueError("per_domain must be >= 1")
    keyword_kind = EntityKind.KEYWORD.value
    pairs_by_domain: dict[str, list[BiTermPair]] = {}
    for triple in translation_triples:
        if triple.relation is not Relation.TRANSLATION_OF:
            continue
        if triple.head[0] != keyword_kind or triple.tail[0] != keyword_kind:
            continue
        a, b = triple.head[1], triple.tail[1]
        if a in keyword_domains:
            zh, en = a, b
        elif b in keyword_domains:
            zh, en = b, a
        else:
            logger.debug("translation pair (%r, %r) matches no scored keyword", a, b)
            continue
        pair = BiTermPair(zh, en, triple.confidence or 0)
        for domain in keyword_domains[zh]:
            pairs_by_domain.setdefault(domain, []).append(pair)

    out = {}
    for domain in sorted(pairs_by_domain):
        pairs = sorted(
            pairs_by_domain[domain], key=lambda p: (-p.confidence, p.chinese, p.english)
        )
        out[domain] = pairs[:per_domain]
    return out


# -- TechAbs -----------------------------------------------------------------


@dataclass
class LabeledAbstract:
    domain: str
    abstract: str


def derive_techabs(
    records: Sequence[PaperRecord], per_domain: int = 100_000, seed: int = 0
) -> list[LabeledAbstract]:
    """Uniform per-domain sample (without replacement) of Chinese abstracts."""
    by_domain: dict[str, list[PaperRecord]] = {}
    for record in records:
        if record.abstract_zh is None:
            continue
        if record.domain is None:
            raise ValueError(f"record {record.paper_id} has no domain; classify first")
        by_domain.setdefault(record.domain, []).append(record)

    out: list[LabeledAbstract] = []
    for domain in sorted(by_domain):
        candidates = sorted(by_domain[domain], key=lambda r: r.paper_id)
        rng = derived_rng(seed, domain, "techabs")
        for record in sample_keep_order(rng, candidates, per_domain):
            out.append(LabeledAbstract(domain, record.abstract_zh))
    return out


# -- TechRE ------------------------------------------------------------------


@dataclass
class Bag:
    """One terminology pair with every sentence mentioning both."""

    term1: str
    term2: str
    label: str  # hierarchical | NA
    domain: str
    sentences: list[str]


def keyword_domains_from_graph(kg: KnowledgeGraph) -> dict[str, set[str]]:
    domains: dict[str, set[str]] = {}
    for triple in kg.triples_of(Relation.BELONGED_DOMAIN):
        domains.setdefault(triple.head[1], set()).add(triple.tail[1])
    return domains


def derive_techre(
    kg10: KnowledgeGraph,
    abstracts: Sequence[LabeledAbstract],
    threshold: int = 10,
    max_bags_per_domain: int = 200_000,
    max_sentences_per_bag: int = 6,
    seed: int = 0,
    splitter: SentenceSplitter | None = None,
    na_proportion: float | None = None,
) -> list[Bag]:
    """Distant-supervision bags from the subset graph's keyword pairs.

    A bag is labeled hierarchical exactly when its pair's co-occurrence
    confidence is strictly greater than ``threshold``; pairs with no shared
    sentence produce no bag.  Each bag keeps at most
    ``max_sentences_per_bag`` sentences (seeded sample), and each domain at
    most ``max_bags_per_domain`` bags.
    """
    if threshold < 1:
        raise ValueError("threshold must be >= 1")
    splitter = splitter or SentenceSplitter()
    keyword_domains = keyword_domains_from_graph(kg10)

    sentences_by_domain: dict[str, list[str]] = {}
    for item in abstracts:
        sentences_by_domain.setdefault(item.domain, []).extend(splitter.split(item.abstract))

    # one substring scan per (term, domain), then pairs intersect index sets
    containing: dict[tuple[str, str], set[int]] = {}

    def sentence_ids(domain: str, term: str) -> set[int]:
        key = (domain, term)
        ids = containing.get(key)
        if ids is None:
            sentences = sentences_by_domain.get(domain, [])
            ids = {i for i, s in enumerate(sentences) if term in s}
            containing[key] = ids
        return ids

    pairs = sorted(
        (t.head[1], t.tail[1], t.confidence or 0)
        for t in kg10.triples_of(Relation.CO_OCCURRENCE_WITH)
    )

    bags_by_domain: dict[str, list[Bag]] = {}
    for term1, term2, confidence in pairs:
        shared_domains = keyword_domains.get(term1, set()) & keyword_domains.get(term2, set())
        label = HIERARCHICAL_LABEL if confidence > threshold else NA_LABEL
        for domain in sorted(shared_domains):
            ids = sentence_ids(domain, term1) & sentence_ids(domain, term2)
            if not ids:
                continue
            sentences = [sentences_by_domain[domain][i] for i in sorted(ids)]
            rng = derived_rng(seed, domain, "techre", term1, term2)
            sentences = sample_keep_order(rng, sentences, max_sentences_per_bag)
            bags_by_domain.setdefault(domain, []).append(
                Bag(term1, term2, label, domain, sentences)
            )

    out: list[Bag] = []
    for domain in sorted(bags_by_domain):
        bags = bags_by_domain[domain]
        if na_proportion is not None:
            bags = _subsample_na(bags, na_proportion, derived_rng(seed, domain, "techre-na"))
        rng = derived_rng(seed, domain, "techre-bags")
        out.extend(sample_keep_order(rng, bags, max_bags_per_domain))
    return out


def _subsample_na(bags: list[Bag], proportion: float, rng) -> list[Bag]:
    """Seeded down-sampling of NA bags so they make up at most ``proportion``
    of the domain's bags."""
    if not 0 < proportion < 1:
        raise ValueError("na_proportion must be in (0, 1)")
    positives = [b for b in bags if b.label != NA_LABEL]
    negatives = [b for b in bags if b.label == NA_LABEL]
    limit = int(Fraction(str(proportion)) / (1 - Fraction(str(proportion))) * len(positives))
    kept_na = sample_keep_order(rng, negatives, limit)
    kept = set(map(id, kept_na))
    return [b for b in bags if b.label != NA_LABEL or id(b) in kept]


# -- TechNER -----------------------------------------------------------------


@dataclass
class NerSample:
    sentence: str
    domain: str
    spans: list[tuple[int, int, str]]  # (start, end, term), non-overlapping


def find_term_spans(sentence: str, terms: Iterable[str]) -> list[tuple[int, int, str]]:
    """All term occurrences resolved to non-overlapping spans, longest match
    first (ties: leftmost, then lexicographic)."""
    candidates: list[tuple[int, int, str]] = []
    for term in terms:
        if not term:
            continue
        start = sentence.find(term)
        while start != -1:
            candidates.append((start, start + len(term), term))
            start = sentence.find(term, start + 1)

    candidates.sort(key=lambda c: (-(c[1] - c[0]), c[0], c[2]))
    kept: list[tuple[int, int, str]] = []
    for start, end, term in candidates:
        if all(end <= k_start or start >= k_end for k_start, k_end, _ in kept):
            kept.append((start, end, term))
    kept.sort()
    return kept


def derive_techner(
    term_lists: Mapping[str, Sequence[str]],
    abstracts: Sequence[LabeledAbstract],
    per_domain: int = 30_000,
    seed: int = 0,
    splitter: SentenceSplitter | None = None,
) -> list[NerSample]:
    """Positive NER samples: every sentence containing at least one domain
    terminology, nested matches resolved to the longest."""
    splitter = splitter or SentenceSplitter()
    sentences_by_domain: dict[str, list[str]] = {}
    for item in abstracts:
        sentences_by_domain.setdefault(item.domain, []).extend(splitter.split(item.abstract))

    out: list[NerSample] = []
    for domain in sorted(sentences_by_domain):
        terms = term_lists.get(domain)
        if not terms:
            continue
        samples = []
        for sentence in sentences_by_domain[domain]:
            spans = find_term_spans(sentence, terms)
            if spans:
                samples.append(NerSample(sentence, domain, spans))
        rng = derived_rng(seed, domain, "techner")
        out.extend(sample_keep_order(rng, samples, per_domain))
    return out


# -- TechQA ------------------------------------------------------------------


QA_TEMPLATES: dict[str, str] = {
    "who_published_title_journal": "Who published a paper titled {B} in journal {C}?",
    "who_with_title_journal": "With whom {A} published a paper titled {B} in journal {C}?",
    "who_with_title": "With whom {A} published a paper titled {B}?",
    "who_with_journal": "With whom {A} published a paper in journal {C}?",
    "when_title_journal": "When {A} published a paper titled {B} in journal {C}?",
    "when_title_coauthor_journal": "When {A} published a paper titled {B} with {C} in journal {D}?",
    "when_title": "When {A} published a paper titled {B}?",
    "when_journal": "When {A} published a paper in journal {C}?",
    "when_title_coauthor": "When {A} published a paper titled {B} with {C}?",
    "what_research_interests": "What is/are the research interests of {A}?",
    "what_titles_coauthor_journal": "What are the papers' titles that {A} published with {B} in journal {C}?",
    "what_titles_coauthor": "What are the papers' titles that {A} published with {B}?",
    "what_titles_journal": "What are the papers' titles that {A} published in journal {C}?",
    "where_title_coauthor": "Where {A} published a paper titled {B} with {C}?",
    "where_title": "Where {A} published a paper titled {B}?",
    "where_coauthor": "Where {A} published a paper with {C}?",
}

QUESTION_TYPES = ("who", "when", "what", "where")


@dataclass
class QaItem:
    question: str
    question_type: str
    pattern_id: str
    slots: dict[str, str]
    answers: list[str]
    support: list[tuple[str, str, str]] = field(default_factory=list)


@dataclass
class _QaIndex:
    authors_of: dict[str, list[str]]
    papers_of: dict[str, list[str]]
    journals_of: dict[str, list[str]]
    years_of: dict[str, list[str]]
    interests_of: dict[str, list[str]]


def _qa_index(kg: KnowledgeGraph) -> _QaIndex:
    authors_of: dict[str, set[str]] = {}
    papers_of: dict[str, set[str]] = {}
    journals_of: dict[str, set[str]] = {}
    years_of: dict[str, set[str]] = {}
    interests_of: dict[str, set[str]] = {}
    for triple in kg.iter_triples():
        if triple.relation is Relation.AUTHOR_OF:
            authors_of.setdefault(triple.tail[1], set()).add(triple.head[1])
            papers_of.setdefault(triple.head[1], set()).add(triple.tail[1])
        elif triple.relation is Relation.PUBLISHED_JOURNAL:
            journals_of.setdefault(triple.head[1], set()).add(triple.tail[1])
        elif triple.relation is Relation.PUBLISHED_YEAR:
            years_of.setdefault(triple.head[1], set()).add(triple.tail[1])
        elif triple.relation is Relation.RESEARCH_INTEREST:
            interests_of.setdefault(triple.head[1], set()).add(triple.tail[1])

    def freeze(d: dict[str, set[str]]) -> dict[str, list[str]]:
        return {k: sorted(v) for k, v in sorted(d.items())}

    return _QaIndex(
        freeze(authors_of), freeze(papers_of), freeze(journals_of),
        freeze(years_of), freeze(interests_of),
    )


def _author_of(a: str, p: str) -> tuple[str, str, str]:
    return (a, Relation.AUTHOR_OF.value, p)


def _journal_of(p: str, j: str) -> tuple[str, str, str]:
    return (p, Relation.PUBLISHED_JOURNAL.value, j)


def _year_of(p: str, y: str) -> tuple[str, str, str]:
    return (p, Relation.PUBLISHED_YEAR.value, y)


def _instantiate_pattern(pattern_id: str, index: _QaIndex):
    """Yield (slots, answers, support) for every instantiation, in a
    deterministic order."""
    authors_of, papers_of = index.authors_of, index.papers_of
    journals_of, years_of = index.journals_of, index.years_of

    if pattern_id == "who_published_title_journal":
        for paper, authors in authors_of.items():
            for journal in journals_of.get(paper, []):
                support = [_journal_of(paper, journal)] + [_author_of(a, paper) for a in authors]
                yield {"B": paper, "C": journal}, authors, support

    elif pattern_id == "who_with_title_journal":
        for paper, authors in authors_of.items():
            if len(authors) < 2:
                continue
            for journal in journals_of.get(paper, []):
                for a in authors:
                    answers = [x for x in authors if x != a]
                    support = [_author_of(a, paper), _journal_of(paper, journal)]
                    support += [_author_of(x, paper) for x in answers]
                    yield {"A": a, "B": paper, "C": journal}, answers, support

    elif pattern_id == "who_with_title":
        for paper, authors in authors_of.items():
            if len(authors) < 2:
                continue
            for a in authors:
                answers = [x for x in authors if x != a]
                support = [_author_of(a, paper)] + [_author_of(x, paper) for x in answers]
                yield {"A": a, "B": paper}, answers, support

    elif pattern_id == "who_with_journal":
        for a, papers in papers_of.items():
            by_journal: dict[str, tuple[set[str], list]] = {}
            for p in papers:
                for journal in journals_of.get(p, []):
                    answers, support = by_journal.setdefault(journal, (set(), []))
                    others = [x for x in authors_of[p] if x != a]
                    answers.update(others)
                    support.append(_author_of(a, p))
                    support.append(_journal_of(p, journal))
                    support.extend(_author_of(x, p) for x in others)
            for journal, (answers, support) in sorted(by_journal.items()):
                if answers:
                    yield {"A": a, "C": journal}, sorted(answers), support

    elif pattern_id == "when_title_journal":
        for paper, authors in authors_of.items():
            years = years_of.get(paper, [])
            if not years:
                continue
            for journal in journals_of.get(paper, []):
                for a in authors:
                    support = [_author_of(a, paper), _journal_of(paper, journal)]
                    support += [_year_of(paper, y) for y in years]
                    yield {"A": a, "B": paper, "C": journal}, years, support

    elif pattern_id == "when_title_coauthor_journal":
        for paper, authors in authors_of.items():
            years = years_of.get(paper, [])
            if not years or len(authors) < 2:
                continue
            for journal in journals_of.get(paper, []):
                for a in authors:
                    for c in authors:
                        if a == c:
                            continue
                        support = [
                            _author_of(a, paper),
                            _author_of(c, paper),
                            _journal_of(paper, journal),
                        ] + [_year_of(paper, y) for y in years]
                        yield {"A": a, "B": paper, "C": c, "D": journal}, years, support

    elif pattern_id == "when_title":
        for paper, authors in authors_of.items():
            years = years_of.get(paper, [])
            if not years:
                continue
            for a in authors:
                support = [_author_of(a, paper)] + [_year_of(paper, y) for y in years]
                yield {"A": a, "B": paper}, years, support

    elif pattern_id == "when_journal":
        for a, papers in papers_of.items():
            by_journal: dict[str, tuple[set[str], list]] = {}
            for p in papers:
                years = years_of.get(p, [])
                if not years:
                    continue
                for journal in journals_of.get(p, []):
                    answers, support = by_journal.setdefault(journal, (set(), []))
                    answers.update(years)
                    support.append(_author_of(a, p))
                    support.append(_journal_of(p, journal))
                    support.extend(_year_of(p, y) for y in years)
            for journal, (answers, support) in sorted(by_journal.items()):
                yield {"A": a, "C": journal}, sorted(answers), support

    elif pattern_id == "when_title_coauthor":
        for paper, authors in authors_of.items():
            years = years_of.get(paper, [])
            if not years or len(authors) < 2:
                continue
            for a in authors:
                for c in authors:
                    if a == c:
                        continue
                    support = [_author_of(a, paper), _author_of(c, paper)]
                    support += [_year_of(paper, y) for y in years]
                    yield {"A": a, "B": paper, "C": c}, years, support

    elif pattern_id == "what_research_interests":
        for a, interests in index.interests_of.items():
            support = [(a, Relation.RESEARCH_INTEREST.value, k) for k in interests]
            yield {"A": a}, interests, support

    elif pattern_id in ("what_titles_coauthor_journal", "what_titles_coauthor"):
        pair_papers: dict[tuple[str, str], list[str]] = {}
        for paper, authors in authors_of.items():
            for a in authors:
                for b in authors:
                    if a != b:
                        pair_papers.setdefault((a, b), []).append(paper)
        for (a, b), papers in sorted(pair_papers.items()):
            if pattern_id == "what_titles_coauthor":
                papers = sorted(papers)
                support = [t for p in papers for t in (_author_of(a, p), _author_of(b, p))]
                yield {"A": a, "B": b}, papers, support
            else:
                by_journal: dict[str, list[str]] = {}
                for p in papers:
                    for journal in journals_of.get(p, []):
                        by_journal.setdefault(journal, []).append(p)
                for journal, shared in sorted(by_journal.items()):
                    shared = sorted(shared)
                    support = []
                    for p in shared:
                        support += [_author_of(a, p), _author_of(b, p), _journal_of(p, journal)]
                    yield {"A": a, "B": b, "C": journal}, shared, support

    elif pattern_id == "what_titles_journal":
        for a, papers in papers_of.items():
            by_journal: dict[str, list[str]] = {}
            for p in papers:
                for journal in journals_of.get(p, []):
                    by_journal.setdefault(journal, []).append(p)
            for journal, mine in sorted(by_journal.items()):
                mine = sorted(mine)
                support = [t for p in mine for t in (_author_of(a, p), _journal_of(p, journal))]
                yield {"A": a, "C": journal}, mine, support

    elif pattern_id == "where_title_coauthor":
        for paper, authors in authors_of.items():
            journals = journals_of.get(paper, [])
            if not journals or len(authors) < 2:
                continue
            for a in authors:
                for c in authors:
                    if a == c:
                        continue
                    support = [_author_of(a, paper), _author_of(c, paper)]
                    support += [_journal_of(paper, j) for j in journals]
                    yield {"A": a, "B": paper, "C": c}, journals, support

    elif pattern_id == "where_title":
        for paper, authors in authors_of.items():
            journals = journals_of.get(paper, [])
            if not journals:
                continue
            for a in authors:
                support = [_author_of(a, paper)] + [_journal_of(paper, j) for j in journals]
                yield {"A": a, "B": paper}, journals, support

    elif pattern_id == "where_coauthor":
        pair_journals: dict[tuple[str, str], tuple[set[str], list]] = {}
        for paper, authors in authors_of.items():
            journals = journals_of.get(paper, [])
            if not journals:
                continue
            for a in authors:
                for c in authors:
                    if a == c:
                        continue
                    answers, support = pair_journals.setdefault((a, c), (set(), []))
                    answers.update(journals)
                    support.append(_author_of(a, paper))
                    support.append(_author_of(c, paper))
                    support.extend(_journal_of(paper, j) for j in journals)
        for (a, c), (answers, support) in sorted(pair_journals.items()):
            yield {"A": a, "C": c}, sorted(answers), support

    else:
        raise ValueError(f"unknown question pattern: {pattern_id}")


def load_qa_templates(path: str | Path) -> dict[str, str]:
    """Template file: JSON object mapping pattern id to a question template
    with {A}/{B}/{C}/{D} slot placeholders."""
    with open(path, encoding="utf-8") as fh:
        templates = json.load(fh)
    unknown = set(templates) - set(QA_TEMPLATES)
    if unknown:
        raise ValueError(f"unknown pattern ids in template file: {sorted(unknown)}")
    merged = dict(QA_TEMPLATES)
    merged.update(templates)
    return merged


def derive_techqa(
    kg10: KnowledgeGraph,
    per_type_limit: int = 1_000,
    seed: int = 0,
    templates: Mapping[str, str] | None = None,
) -> list[QaItem]:
    """Instantiate all question patterns over the graph; answers are the
    complete entity set satisfying each pattern's join, so every item can be
    re-verified against the graph alone."""
    if per_type_limit < 1:
        raise ValueError("per_type_limit must be >= 1")
    templates = dict(templates) if templates else QA_TEMPLATES
    index = _qa_index(kg10)

    by_type: dict[str, list[QaItem]] = {qt: [] for qt in QUESTION_TYPES}
    for pattern_id, template in templates.items():
        question_type = pattern_id.split("_", 1)[0]
        items = []
        for slots, answers, support in _instantiate_pattern(pattern_id, index):
            if not answers:
                continue
            items.append(
                QaItem(
                    question=template.format(**slots),
                    question_type=question_type,
                    pattern_id=pattern_id,
                    slots=dict(sorted(slots.items())),
                    answers=list(answers),
                    support=support,
                )
            )
        if not items:
            logger.warning("question pattern %s has no instantiation; omitted", pattern_id)
        by_type[question_type].extend(items)

    out: list[QaItem] = []
    for question_type in QUESTION_TYPES:
        items = by_type[question_type]
        rng = derived_rng(seed, question_type, "techqa")
        out.extend(sample_keep_order(rng, items, per_type_limit))
    return out


# -- splits ------------------------------------------------------------------


def split_dataset(
    items: Sequence[T], ratios: Sequence[float] = (8, 1, 1), seed: int = 0
) -> tuple[list[T], list[T], list[T]]:
    """Seeded shuffle followed by contiguous slicing.

    The partition is exact and each part's size differs from its ideal
    proportional share by less than 1.
    """
    if len(items) < 3:
        raise ValueError(f"need at least 3 items to split, got {len(items)}")
    if len(ratios) != 3 or any(r <= 0 for r in ratios):
        raise ValueError(f"ratios must be 3 positive numbers, got {ratios}")

    shuffled = list(items)
    derived_rng(seed, "split").shuffle(shuffled)

    total = sum(Fraction(str(r)) for r in ratios)
    n = len(shuffled)
    bounds = []
    acc = Fraction(0)
    for r in ratios:
        acc += Fraction(str(r))
        bounds.append(int(n * acc / total))
    train = shuffled[: bounds[0]]
    dev = shuffled[bounds[0] : bounds[1]]
    test = shuffled[bounds[1] : bounds[2]]
    return train, dev, test


# -- serialization -----------------------------------------------------------


def _write_jsonl(rows: Iterable[dict], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for row in rows:
            json.dump(row, fh, ensure_ascii=False, sort_keys=True)
            fh.write("\n")


def write_techterm(term_lists: Mapping[str, Sequence[str]], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("domain\trank\tkeyword\n")
        for domain in sorted(term_lists):
            for rank, keyword in enumerate(term_lists[domain]):
                fh.write(f"{domain}\t{rank}\t{keyword}\n")


def read_techterm(path: str | Path) -> dict[str, list[str]]:
    """Inverse of :func:`write_techterm`; rank order is the file order."""
    term_lists: dict[str, list[str]] = {}
    with open(path, encoding="utf-8") as fh:
        header = fh.readline()
        if header.rstrip("\n") != "domain\trank\tkeyword":
            raise ValueError(f"{path}: unexpected header {header!r}")
        for line_no, line in enumerate(fh, 2):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise ValueError(f"{path}:{line_no}: expected 3 columns")
            domain, _rank, keyword = parts
            term_lists.setdefault(domain, []).append(keyword)
    return term_lists


def write_techbiterm(pairs: Mapping[str, Sequence[BiTermPair]], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("domain\tchinese\tenglish\tconfidence\n")
        for domain in sorted(pairs):
            for pair in pairs[domain]:
                fh.write(f"{domain}\t{pair.chinese}\t{pair.english}\t{pair.confidence}\n")


def write_techabs(items: Sequence[LabeledAbstract], path: str | Path) -> None:
    _write_jsonl(({"domain": i.domain, "abstract": i.abstract} for i in items), path)


def write_techre(bags: Sequence[Bag], path: str | Path) -> None:
    _write_jsonl(
        (
            {
                "term1": b.term1,
                "term2": b.term2,
                "label": b.label,
                "domain": b.domain,
                "sentences": b.sentences,
            }
            for b in bags
        ),
        path,
    )


def write_techner(samples: Sequence[NerSample], path: str | Path) -> None:
    _write_jsonl(
        (
            {
                "sentence": s.sentence,
                "domain": s.domain,
                "spans": [[start, end, term] for start, end, term in s.spans],
            }
            for s in samples
        ),
        path,
    )


def write_techqa(items: Sequence[QaItem], path: str | Path) -> None:
    _write_jsonl(
        (
            {
                "question": i.question,
                "type": i.question_type,
                "pattern_id": i.pattern_id,
                "slots": i.slots,
                "answers": i.answers,
                "support": [list(t) for t in i.support],
            }
            for i in items
        ),
        path,
    )
