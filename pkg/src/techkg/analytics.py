"""Characteristic analyses of a built graph: duplicate-name statistics,
in-domain affiliation ambiguity, and relation typing.

Duplicate analysis works on surface forms on purpose.  Because entities are
identified by (kind, surface), same-name collisions are preserved rather than
resolved, and these reports measure how widespread they are.
"""

from __future__ import annotations

import json
import logging
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Collection, Iterable, Mapping, Sequence

from .graph import KnowledgeGraph
from .records import PaperRecord
from .relations import EntityKind, Relation
from .terms import TermScore, top_selection_by_domain

logger = logging.getLogger(__name__)
logger.addHandler(logging.NullHandler())

#: Lower bounds of the domain-count buckets; the top bucket is closed by the
#: number of domains under consideration.
BUCKET_BOUNDS = (1, 5, 10, 20, 30)

#: Comprehensive domains excluded by default from cross-domain author stats;
#: they accept papers from many fields and would inflate duplicate counts.
DEFAULT_EXCLUDED_DOMAINS = ("nature science", "social science")

#: tph/hpt boundary of the four-way relation typing.
CLASS_BOUNDARY = 1.5

RELATION_CLASSES = ("1-1", "1-n", "m-1", "m-n")


@dataclass
class Bucket:
    lo: int
    hi: int | None  # exclusive upper bound; None marks the closed top bucket
    count: int
    ratio: float
    label: str


@dataclass
class DuplicateReport:
    kind: str
    total: int
    duplicate: int
    ratio: float
    mean_domains: float  # dpa for authors, dpk for keywords
    buckets: list[Bucket]
    domain_count: int
    excluded_domains: tuple[str, ...] = ()


def duplicate_ratio(duplicate: int, total: int) -> float:
    return duplicate / total if total else 0.0


def _bucketize(domain_counts: Iterable[int], duplicate: int, domain_count: int) -> list[Bucket]:
    bounds = BUCKET_BOUNDS
    counts = [0] * len(bounds)
    for c in domain_counts:
        for i in range(len(bounds) - 1, -1, -1):
            if c >= bounds[i]:
                counts[i] += 1
                break
    buckets = []
    for i, lo in enumerate(bounds):
        hi = bounds[i + 1] if i + 1 < len(bounds) else None
        label = f"[{lo}, {hi})" if hi is not None else f"[{lo}, {domain_count}]"
        buckets.append(Bucket(lo, hi, counts[i], duplicate_ratio(counts[i], duplicate), label))
    return buckets


def entity_sets_by_domain(
    records: Iterable[PaperRecord], kind: EntityKind
) -> dict[str, set[str]]:
    """Surface forms of one entity kind grouped by paper domain.

    Only the Chinese fields feed the duplicate-name analysis: authors come
    from authors_zh, keywords from keywords_zh.
    """
    sets: dict[str, set[str]] = {}
    for record in records:
        if record.domain is None:
            raise ValueError(f"record {record.paper_id} has no domain; classify first")
        bucket = sets.setdefault(record.domain, set())
        if kind is EntityKind.AUTHOR:
            bucket.update(record.authors_zh)
        elif kind is EntityKind.KEYWORD:
            bucket.update(record.keywords_zh)
        else:
            raise ValueError(f"unsupported duplicate-analysis kind: {kind}")
    return sets


def cross_domain_duplicates(
    sets_by_domain: Mapping[str, Collection[str]],
    kind: EntityKind,
    excluded_domains: Collection[str] = (),
) -> DuplicateReport:
    """A surface form is a cross-domain duplicate when it appears in at least
    two non-excluded domains."""
    excluded = set(excluded_domains)
    domain_counts: Counter = Counter()
    considered = 0
    for domain, surfaces in sets_by_domain.items():
        if domain in excluded:
            continue
        considered += 1
        domain_counts.update(surfaces)

    total = len(domain_counts)
    dup_counts = [c for c in domain_counts.values() if c >= 2]
    duplicate = len(dup_counts)
    mean_domains = sum(dup_counts) / duplicate if duplicate else 0.0
    return DuplicateReport(
        kind=kind.value,
        total=total,
        duplicate=duplicate,
        ratio=duplicate_ratio(duplicate, total),
        mean_domains=mean_domains,
        buckets=_bucketize(dup_counts, duplicate, considered),
        domain_count=considered,
        excluded_domains=tuple(sorted(excluded)),
    )


def per_domain_bucket_rows(
    sets_by_domain: Mapping[str, Collection[str]],
    excluded_domains: Collection[str] = (),
) -> list[tuple[str, int, list[Bucket]]]:
    """Domain-distribution buckets restricted to each domain's own members:
    for every domain, how widely do its duplicated surfaces spread."""
    excluded = set(excluded_domains)
    domain_counts: Counter = Counter()
    considered = 0
    for domain, surfaces in sets_by_domain.items():
        if domain in excluded:
            continue
        considered += 1
        domain_counts.update(surfaces)

    rows = []
    for domain in sorted(sets_by_domain):
        if domain in excluded:
            continue
        dup_counts = [domain_counts[s] for s in sets_by_domain[domain] if domain_counts[s] >= 2]
        rows.append((domain, len(dup_counts), _bucketize(dup_counts, len(dup_counts), considered)))
    return rows


@dataclass
class CaseStats:
    duplicate: int
    ratio: float
    apa: float  # mean affiliations (or affiliation classes) per duplicate


@dataclass
class InDomainReport:
    domain: str
    total_authors: int
    worse: CaseStats
    better: CaseStats


def _containment_normalize(s: str) -> str:
    return s.casefold()


def _inclusion_classes(affiliations: Sequence[str]) -> int:
    """Number of equivalence classes once strings are merged whenever one
    contains the other (transitively)."""
    n = len(affiliations)
    normalized = [_containment_normalize(a) for a in affiliations]
    parent = list(range(n))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if normalized[i] in normalized[j] or normalized[j] in normalized[i]:
                ri, rj = find(i), find(j)
                if ri != rj:
                    parent[ri] = rj
    return len({find(i) for i in range(n)})


def _has_unrelated_pair(affiliations: Sequence[str]) -> bool:
    normalized = [_containment_normalize(a) for a in affiliations]
    for i in range(len(normalized)):
        for j in range(i + 1, len(normalized)):
            if normalized[i] not in normalized[j] and normalized[j] not in normalized[i]:
                return True
    return False


def in_domain_duplicates(records: Sequence[PaperRecord]) -> InDomainReport:
    """Extreme analysis of one domain's author names.

    Worse case: any author attached to two distinct affiliation strings is a
    duplicate.  Better case: only when two of the affiliations have no
    inclusion relationship (neither contains the other as a substring).
    Affiliation attachment follows extraction: the author x affiliation cross
    product of each paper.
    """
    domains = {r.domain for r in records}
    if len(domains) > 1:
        raise ValueError(f"records span multiple domains: {sorted(d or '?' for d in domains)}")
    domain = next(iter(domains)) if domains else ""

    affs_by_author: dict[str, set[str]] = {}
    for record in records:
        for author in record.authors_zh:
            affs_by_author.setdefault(author, set()).update(record.affiliations_zh)

    worse_sizes: list[int] = []
    better_sizes: list[int] = []
    for affs in affs_by_author.values():
        if len(affs) < 2:
            continue
        ordered = sorted(affs)
        worse_sizes.append(len(ordered))
        if _has_unrelated_pair(ordered):
            better_sizes.append(_inclusion_classes(ordered))

    total = len(affs_by_author)

    def case(sizes: list[int]) -> CaseStats:
        dup = len(sizes)
        return CaseStats(dup, duplicate_ratio(dup, total), sum(sizes) / dup if dup else 0.0)

    return InDomainReport(domain or "", total, case(worse_sizes), case(better_sizes))


@dataclass
class RelationTypeRow:
    relation: Relation
    triple_count: int
    distinct_heads: int
    distinct_tails: int
    tph: float
    hpt: float
    rel_class: str


@dataclass
class Aggregates:
    """Per-class triple shares plus the three mean-multiplicity figures.

    ``n_bar`` averages tph over 1-n relations, ``m_bar`` averages hpt over
    m-1 relations, and ``u_bar`` averages hpt/tph over m-n relations; the
    primary figures weight each relation by its triple count, and the
    unweighted per-relation means ride along for comparison.
    """

    class_triple_share: dict[str, float] = field(default_factory=dict)
    n_bar: float | None = None
    m_bar: float | None = None
    u_bar: float | None = None
    n_bar_unweighted: float | None = None
    m_bar_unweighted: float | None = None
    u_bar_unweighted: float | None = None


@dataclass
class RelationTypeReport:
    rows: list[RelationTypeRow]
    total_triples: int
    aggregates: Aggregates


def classify_class(tph: float, hpt: float) -> str:
    if tph < CLASS_BOUNDARY and hpt < CLASS_BOUNDARY:
        return "1-1"
    if tph >= CLASS_BOUNDARY and hpt >= CLASS_BOUNDARY:
        return "m-n"
    if tph >= CLASS_BOUNDARY:
        return "1-n"
    return "m-1"


def _aggregate(rows: Sequence[RelationTypeRow], total: int) -> Aggregates:
    agg = Aggregates()
    for cls in RELATION_CLASSES:
        cls_triples = sum(r.triple_count for r in rows if r.rel_class == cls)
        agg.class_triple_share[cls] = 100.0 * cls_triples / total if total else 0.0

    def means(cls: str, value) -> tuple[float | None, float | None]:
        members = [r for r in rows if r.rel_class == cls]
        if not members:
            return None, None
        weight = sum(r.triple_count for r in members)
        weighted = sum(value(r) * r.triple_count for r in members) / weight
        unweighted = sum(value(r) for r in members) / len(members)
        return weighted, unweighted

    agg.n_bar, agg.n_bar_unweighted = means("1-n", lambda r: r.tph)
    agg.m_bar, agg.m_bar_unweighted = means("m-1", lambda r: r.hpt)
    agg.u_bar, agg.u_bar_unweighted = means("m-n", lambda r: r.hpt / r.tph)
    return agg


def classify_relation_types(kg: KnowledgeGraph) -> RelationTypeReport:
    """tph_r = triples / distinct heads, hpt_r = triples / distinct tails,
    class per the 1.5 boundary.  Relations without triples are excluded."""
    if len(kg) == 0:
        raise ValueError("cannot classify relation types of an empty graph")

    heads: dict[str, set] = {}
    tails: dict[str, set] = {}
    counts: Counter = Counter()
    for (relation, head, tail) in kg._triples:
        heads.setdefault(relation, set()).add(head)
        tails.setdefault(relation, set()).add(tail)
        counts[relation] += 1

    rows = []
    for relation in Relation:
        n = counts.get(relation.value, 0)
        if n == 0:
            continue
        tph = n / len(heads[relation.value])
        hpt = n / len(tails[relation.value])
        rows.append(
            RelationTypeRow(
                relation,
                n,
                len(heads[relation.value]),
                len(tails[relation.value]),
                tph,
                hpt,
                classify_class(tph, hpt),
            )
        )
    total = sum(counts.values())
    return RelationTypeReport(rows, total, _aggregate(rows, total))


def relation_types_by_cutoff(
    kg: KnowledgeGraph,
    scores: Sequence[TermScore],
    fractions: Sequence[float],
) -> list[tuple[float, RelationTypeReport]]:
    """Relation typing of the graph restricted to top-fraction keywords, for
    several fractions at once.

    Equivalent to filtering the graph per fraction and classifying, but the
    triples touching no keyword endpoint are tallied only once.
    """
    kw = EntityKind.KEYWORD.value
    static: list[tuple[str, tuple, tuple]] = []
    keyword_bound: list[tuple[str, tuple, tuple]] = []
    for (relation, head, tail) in kg._triples:
        if head[0] == kw or tail[0] == kw:
            keyword_bound.append((relation, head, tail))
        else:
            static.append((relation, head, tail))

    out = []
    for fraction in fractions:
        survivors_by_domain = top_selection_by_domain(scores, fraction)
        survivors: set[str] = set()
        for s in survivors_by_domain.values():
            survivors.update(s)

        heads: dict[str, set] = {}
        tails: dict[str, set] = {}
        counts: Counter = Counter()
        for relation, head, tail in static:
            heads.setdefault(relation, set()).add(head)
            tails.setdefault(relation, set()).add(tail)
            counts[relation] += 1
        for relation, head, tail in keyword_bound:
            if head[0] == kw and head[1] not in survivors:
                continue
            if tail[0] == kw and tail[1] not in survivors:
                continue
            heads.setdefault(relation, set()).add(head)
            tails.setdefault(relation, set()).add(tail)
            counts[relation] += 1

        rows = []
        for relation in Relation:
            n = counts.get(relation.value, 0)
            if n == 0:
                continue
            tph = n / len(heads[relation.value])
            hpt = n / len(tails[relation.value])
            rows.append(
                RelationTypeRow(
                    relation,
                    n,
                    len(heads[relation.value]),
                    len(tails[relation.value]),
                    tph,
                    hpt,
                    classify_class(tph, hpt),
                )
            )
        total = sum(counts.values())
        out.append((fraction, RelationTypeReport(rows, total, _aggregate(rows, total))))
    return out


def keyword_duplicates_by_cutoff(
    scores: Sequence[TermScore],
    fractions: Sequence[float],
    excluded_domains: Collection[str] = (),
) -> list[tuple[float, DuplicateReport]]:
    """Cross-domain keyword duplicate statistics under several top-fraction
    cutoffs (each domain's keyword set restricted to its own selection)."""
    out = []
    for fraction in fractions:
        sets = top_selection_by_domain(scores, fraction)
        out.append(
            (fraction, cross_domain_duplicates(sets, EntityKind.KEYWORD, excluded_domains))
        )
    return out


# -- serialization ---------------------------------------------------------


def pct(value: float) -> str:
    return f"{100.0 * value:.2f}"


def write_duplicate_table(report: DuplicateReport, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("total\tduplicate\tduplicate_ratio_pct\tmean_domains\n")
        fh.write(
            f"{report.total}\t{report.duplicate}\t{pct(report.ratio)}\t{report.mean_domains:.2f}\n"
        )


def write_bucket_table(report: DuplicateReport, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("domain_distribution\tduplicate_count\tduplicate_ratio_pct\n")
        for bucket in reversed(report.buckets):
            fh.write(f"{bucket.label}\t{bucket.count}\t{pct(bucket.ratio)}\n")
        fh.write(f"Total\t{report.duplicate}\t{pct(duplicate_ratio(report.duplicate, report.duplicate))}\n")


def write_in_domain_table(reports: Sequence[InDomainReport], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(
            "domain\ttotal\tworse_duplicate\tbetter_duplicate\t"
            "worse_ratio_pct\tbetter_ratio_pct\tworse_apa\tbetter_apa\n"
        )
        for r in reports:
            fh.write(
                f"{r.domain}\t{r.total_authors}\t{r.worse.duplicate}\t{r.better.duplicate}\t"
                f"{pct(r.worse.ratio)}\t{pct(r.better.ratio)}\t"
                f"{r.worse.apa:.2f}\t{r.better.apa:.2f}\n"
            )


def write_cutoff_duplicate_table(
    reports: Sequence[tuple[float, DuplicateReport]], path: str | Path
) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("tfidf_setting\ttotal\tduplicate\tduplicate_ratio_pct\tmean_domains\n")
        for fraction, report in reports:
            fh.write(
                f"Top-{100 * fraction:g}%\t{report.total}\t{report.duplicate}\t"
                f"{pct(report.ratio)}\t{report.mean_domains:.2f}\n"
            )


def write_per_domain_bucket_table(
    rows: Sequence[tuple[str, int, list[Bucket]]], path: str | Path
) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        header = None
        for domain, duplicate, buckets in rows:
            if header is None:
                header = "domain\t" + "\t".join(b.label for b in buckets) + "\n"
                fh.write(header)
            cells = [f"{b.count}/{pct(b.ratio)}" for b in buckets]
            fh.write(domain + "\t" + "\t".join(cells) + "\n")


def write_relation_type_table(
    reports: Sequence[tuple[float, RelationTypeReport]], path: str | Path
) -> None:
    def fmt(value: float | None) -> str:
        return "" if value is None else f"{value:.2f}"

    with open(path, "w", encoding="utf-8") as fh:
        fh.write("tfidf_setting\t1-1_pct\t1-n_pct\tn_bar\tm-1_pct\tm_bar\tm-n_pct\tu_bar\n")
        for fraction, report in reports:
            agg = report.aggregates
            share = agg.class_triple_share
            fh.write(
                f"Top-{100 * fraction:g}%\t{share['1-1']:.2f}\t{share['1-n']:.2f}\t{fmt(agg.n_bar)}\t"
                f"{share['m-1']:.2f}\t{fmt(agg.m_bar)}\t{share['m-n']:.2f}\t{fmt(agg.u_bar)}\n"
            )


def _bucket_dict(bucket: Bucket) -> dict:
    return {
        "label": bucket.label,
        "lo": bucket.lo,
        "hi": bucket.hi,
        "count": bucket.count,
        "ratio": bucket.ratio,
    }


def duplicate_report_dict(report: DuplicateReport) -> dict:
    return {
        "kind": report.kind,
        "total": report.total,
        "duplicate": report.duplicate,
        "ratio": report.ratio,
        "mean_domains": report.mean_domains,
        "domain_count": report.domain_count,
        "excluded_domains": list(report.excluded_domains),
        "buckets": [_bucket_dict(b) for b in report.buckets],
    }


def relation_type_report_dict(report: RelationTypeReport) -> dict:
    agg = report.aggregates
    return {
        "total_triples": report.total_triples,
        "rows": [
            {
                "relation": r.relation.value,
                "triples": r.triple_count,
                "distinct_heads": r.distinct_heads,
                "distinct_tails": r.distinct_tails,
                "tph": r.tph,
                "hpt": r.hpt,
                "class": r.rel_class,
            }
            for r in report.rows
        ],
        "class_triple_share": agg.class_triple_share,
        "n_bar": agg.n_bar,
        "m_bar": agg.m_bar,
        "u_bar": agg.u_bar,
        "n_bar_unweighted": agg.n_bar_unweighted,
        "m_bar_unweighted": agg.m_bar_unweighted,
        "u_bar_unweighted": agg.u_bar_unweighted,
    }


def in_domain_report_dict(report: InDomainReport) -> dict:
    def case(c: CaseStats) -> dict:
        return {"duplicate": c.duplicate, "ratio": c.ratio, "apa": c.apa}

    return {
        "domain": report.domain,
        "total_authors": report.total_authors,
        "worse": case(report.worse),
        "better": case(report.better),
    }


def write_analytics_dump(payload: dict, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, ensure_ascii=False, sort_keys=True, indent=2)
        fh.write("\n")
