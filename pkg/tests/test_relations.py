from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from corpus_gen import make_record, random_corpus
from techkg.records import PaperRecord
from techkg.relations import (
    CONFIDENCE_RELATIONS,
    SYMMETRIC_RELATIONS,
    ExtractionConfig,
    OrderedPairCount,
    Relation,
    Triple,
    aggregate_cooccurrence,
    aggregate_coauthorships,
    aggregate_direct_translations,
    cooccurrence_counts,
    corpus_pair_counters,
    extract_paper_local_triples,
    mine_hierarchical,
    mine_keyword_translations,
    ordered_pair_counts,
    ordered_pair_stats,
    paper_entity_mentions,
)

CONFIG = ExtractionConfig()


def relation_counter(triples) -> Counter:
    return Counter(t.relation for t in triples)


def test_relation_enum_has_exactly_16_members():
    assert len(Relation) == 16


def test_symmetric_relations_are_exactly_three():
    assert SYMMETRIC_RELATIONS == {
        Relation.CO_AUTHOR,
        Relation.TRANSLATION_OF,
        Relation.CO_OCCURRENCE_WITH,
    }
    for relation in Relation:
        assert relation.symmetric == (relation in SYMMETRIC_RELATIONS)


def test_confidence_relations():
    assert CONFIDENCE_RELATIONS == {
        Relation.CO_OCCURRENCE_WITH,
        Relation.CO_AUTHOR,
        Relation.TRANSLATION_OF,
        Relation.HIERARCHICAL,
    }


def test_appendix_shape_family_counts(appendix_paper):
    triples = extract_paper_local_triples(appendix_paper, CONFIG)
    counts = relation_counter(triples)
    assert counts == Counter(
        {
            Relation.AUTHOR_OF: 3,
            Relation.FIRST_AUTHOR: 1,
            Relation.SECOND_AUTHOR: 1,
            Relation.CO_AUTHOR: 3,
            Relation.RESEARCH_INTEREST: 3,
            Relation.AFFILIATION: 6,
            Relation.BELONGED_DOMAIN: 3,
            Relation.CO_OCCURRENCE_WITH: 3,
            Relation.PUBLISHED_YEAR: 1,
            Relation.CONTAINED_CHN_KEYWORDS: 1,
            Relation.CONTAINED_ENG_KEYWORDS: 1,
            Relation.OTHER_AUTHOR: 1,
            Relation.ALL_AUTHORS: 1,
            Relation.PUBLISHED_JOURNAL: 1,
            Relation.TRANSLATION_OF: 4,  # 1 title + 3 authors
        }
    )
    assert len(triples) == 33


def test_single_author_suppresses_pair_relations():
    record = make_record(0, "d1", authors_zh=["张三"], keywords_zh=["k1"])
    counts = relation_counter(extract_paper_local_triples(record, CONFIG))
    assert Relation.CO_AUTHOR not in counts
    assert Relation.SECOND_AUTHOR not in counts
    assert Relation.OTHER_AUTHOR not in counts
    assert counts[Relation.FIRST_AUTHOR] == 1


def test_no_authors_suppresses_all_author_relations():
    record = make_record(0, "d1", keywords_zh=["k1", "k2"])
    counts = relation_counter(extract_paper_local_triples(record, CONFIG))
    for relation in (
        Relation.AUTHOR_OF, Relation.FIRST_AUTHOR, Relation.SECOND_AUTHOR,
        Relation.OTHER_AUTHOR, Relation.CO_AUTHOR, Relation.RESEARCH_INTEREST,
        Relation.AFFILIATION, Relation.ALL_AUTHORS,
    ):
        assert relation not in counts
    assert counts[Relation.BELONGED_DOMAIN] == 2


def test_invalid_year_suppresses_published_year():
    record = make_record(0, "d1", year=None)
    counts = relation_counter(extract_paper_local_triples(record, CONFIG))
    assert Relation.PUBLISHED_YEAR not in counts


def test_two_paper_fixture_matches_hand_enumerated_golden():
    p1 = PaperRecord(
        paper_id="p1", title_zh="甲", journal="J1", year=2019, domain="d1",
        title_en="Alpha", authors_zh=["安", "博"], authors_en=["An", "Bo"],
        affiliations_zh=["大学一"], keywords_zh=["k1", "k2"], keywords_en=["e1", "e2"],
    )
    p2 = PaperRecord(
        paper_id="p2", title_zh="乙", journal="J2", year=2020, domain="d2",
        authors_zh=["博"], affiliations_zh=[], keywords_zh=["k2"],
    )
    golden_p1 = {
        ("author", "安", "author_of", "paper", "甲"),
        ("author", "博", "author_of", "paper", "甲"),
        ("author", "安", "first_author", "paper", "甲"),
        ("author", "博", "second_author", "paper", "甲"),
        ("author", "博", "co_author", "author", "安"),  # 博 U+535A < 安 U+5B89
        ("author", "安", "research_interest", "keyword", "k1"),
        ("author", "安", "research_interest", "keyword", "k2"),
        ("author", "安", "affiliation", "affiliation", "大学一"),
        ("author", "博", "affiliation", "affiliation", "大学一"),
        ("keyword", "k1", "belonged_domain", "domain", "d1"),
        ("keyword", "k2", "belonged_domain", "domain", "d1"),
        ("keyword", "k1", "co_occurrence_with", "keyword", "k2"),
        ("paper", "甲", "published_year", "year", "2019"),
        ("paper", "甲", "contained_chn_keywords", "composite", "k1+k2"),
        ("paper", "甲", "contained_eng_keywords", "composite", "e1+e2"),
        ("paper", "甲", "all_authors", "composite", "安+博"),
        ("paper", "甲", "published_journal", "journal", "J1"),
        ("title", "Alpha", "translation_of", "paper", "甲"),  # Alpha < 甲
        ("author", "An", "translation_of", "author", "安"),
        ("author", "Bo", "translation_of", "author", "博"),
    }
    golden_p2 = {
        ("author", "博", "author_of", "paper", "乙"),
        ("author", "博", "first_author", "paper", "乙"),
        ("author", "博", "research_interest", "keyword", "k2"),
        ("keyword", "k2", "belonged_domain", "domain", "d2"),
        ("paper", "乙", "published_year", "year", "2020"),
        ("paper", "乙", "contained_chn_keywords", "composite", "k2"),
        ("paper", "乙", "all_authors", "composite", "博"),
        ("paper", "乙", "published_journal", "journal", "J2"),
    }
    got = {
        oracles.triple_to_tuple(t)
        for t in extract_paper_local_triples(p1, CONFIG)
        + extract_paper_local_triples(p2, CONFIG)
    }
    assert got == golden_p1 | golden_p2


def test_local_triples_match_oracle_on_random_corpus():
    for record in random_corpus(seed=23, n_papers=40):
        got = Counter(
            oracles.triple_to_tuple(t) for t in extract_paper_local_triples(record, CONFIG)
        )
        assert got == oracles.local_triples(record)


def test_all_authors_scope_emits_cross_product():
    record = make_record(0, "d1", authors_zh=["a", "b"], keywords_zh=["k1", "k2"])
    config = ExtractionConfig(research_interest_scope="all_authors")
    counts = relation_counter(extract_paper_local_triples(record, config))
    assert counts[Relation.RESEARCH_INTEREST] == 4


def test_duplicate_keywords_deduplicated_before_pairing():
    record = make_record(0, "d1", keywords_zh=["a", "b", "a"])
    triples = extract_paper_local_triples(record, CONFIG)
    co = [t for t in triples if t.relation is Relation.CO_OCCURRENCE_WITH]
    assert len(co) == 1
    assert {co[0].head[1], co[0].tail[1]} == {"a", "b"}
    # composite keeps the raw list, position intact
    composite = next(t for t in triples if t.relation is Relation.CONTAINED_CHN_KEYWORDS)
    assert composite.tail[1] == "a+b+a"


def test_no_self_cooccurrence():
    record = make_record(0, "d1", keywords_zh=["a", "a"])
    triples = extract_paper_local_triples(record, CONFIG)
    assert all(t.relation is not Relation.CO_OCCURRENCE_WITH for t in triples)


def test_composite_join_configurable():
    record = make_record(0, "d1", authors_zh=["a", "b"])
    config = ExtractionConfig(composite_join=" ⊕ ")
    triples = extract_paper_local_triples(record, config)
    composite = next(t for t in triples if t.relation is Relation.ALL_AUTHORS)
    assert composite.tail[1] == "a ⊕ b"


def test_symmetric_triples_canonicalized():
    record = make_record(0, "d1", authors_zh=["乙", "甲"])  # reverse lexicographic
    triples = extract_paper_local_triples(record, CONFIG)
    co = next(t for t in triples if t.relation is Relation.CO_AUTHOR)
    assert co.head[1] <= co.tail[1]


@st.composite
def paper_shapes(draw):
    m = draw(st.integers(min_value=0, max_value=6))
    s = draw(st.integers(min_value=0, max_value=4))
    n = draw(st.integers(min_value=0, max_value=6))
    l = draw(st.integers(min_value=0, max_value=6))
    bilingual_title = draw(st.booleans())
    n_authors_en = draw(st.integers(min_value=0, max_value=6))
    n_affs_en = draw(st.integers(min_value=0, max_value=4))
    return PaperRecord(
        paper_id="p", title_zh="t", journal="j", year=2019, domain="d",
        title_en="te" if bilingual_title else None,
        authors_zh=[f"a{i}" for i in range(m)],
        authors_en=[f"ae{i}" for i in range(n_authors_en)],
        affiliations_zh=[f"o{i}" for i in range(s)],
        affiliations_en=[f"oe{i}" for i in range(n_affs_en)],
        keywords_zh=[f"ck{i}" for i in range(n)],
        keywords_en=[f"ek{i}" for i in range(l)],
    )


@given(paper_shapes())
def test_family_counts_satisfy_closed_forms(record):
    m, s, n = len(record.authors_zh), len(record.affiliations_zh), len(record.keywords_zh)
    l = len(record.keywords_en)
    counts = relation_counter(extract_paper_local_triples(record, CONFIG))
    assert counts[Relation.AUTHOR_OF] == m
    assert counts[Relation.FIRST_AUTHOR] == (1 if m >= 1 else 0)
    assert counts[Relation.SECOND_AUTHOR] == (1 if m >= 2 else 0)
    assert counts[Relation.OTHER_AUTHOR] == max(0, m - 2)
    assert counts[Relation.CO_AUTHOR] == m * (m - 1) // 2
    assert counts[Relation.RESEARCH_INTEREST] == (n if m >= 1 else 0)
    assert counts[Relation.AFFILIATION] == m * s
    assert counts[Relation.BELONGED_DOMAIN] == n
    assert counts[Relation.CO_OCCURRENCE_WITH] == n * (n - 1) // 2
    assert counts[Relation.PUBLISHED_YEAR] == 1
    assert counts[Relation.CONTAINED_CHN_KEYWORDS] == (1 if n >= 1 else 0)
    assert counts[Relation.CONTAINED_ENG_KEYWORDS] == (1 if l >= 1 else 0)
    assert counts[Relation.ALL_AUTHORS] == (1 if m >= 1 else 0)
    assert counts[Relation.PUBLISHED_JOURNAL] == 1
    expected_translations = (
        (1 if record.title_en is not None else 0)
        + min(m, len(record.authors_en))
        + min(s, len(record.affiliations_en))
    )
    assert counts[Relation.TRANSLATION_OF] == expected_translations


# -- hierarchical mining -------------------------------------------------------


def test_ordered_pairs_of_single_list():
    record = make_record(
        0, "d1", keywords_zh=["自然语言处理", "神经机器翻译", "注意力机制"]
    )
    counts = ordered_pair_counts([record])
    assert counts == Counter(
        {
            ("自然语言处理", "神经机器翻译"): 1,
            ("自然语言处理", "注意力机制"): 1,
            ("神经机器翻译", "注意力机制"): 1,
        }
    )


def test_hierarchical_threshold_is_strict():
    records = [make_record(i, "d1", keywords_zh=["a", "b"]) for i in range(5)]
    assert mine_hierarchical(records, threshold=5) == []
    triples = mine_hierarchical(records, threshold=4)
    assert len(triples) == 1
    assert triples[0].head[1] == "a" and triples[0].tail[1] == "b"
    assert triples[0].confidence == 5


def test_hierarchical_both_directions_can_qualify():
    records = [make_record(i, "d1", keywords_zh=["a", "b"]) for i in range(3)]
    records += [make_record(10 + i, "d1", keywords_zh=["b", "a"]) for i in range(3)]
    triples = mine_hierarchical(records, threshold=2)
    directed = {(t.head[1], t.tail[1]) for t in triples}
    assert directed == {("a", "b"), ("b", "a")}


def test_hierarchical_matches_bruteforce_on_20_papers():
    records = random_corpus(seed=31, n_papers=20, keyword_pool=6, max_keywords=4)
    oracle = oracles.ordered_pair_scan(records)
    for threshold in (1, 2, 3):
        got = {(t.head[1], t.tail[1], t.confidence) for t in mine_hierarchical(records, threshold)}
        expected = {(k1, k2, n) for (k1, k2), n in oracle.items() if n > threshold}
        assert got == expected


def test_hierarchical_requires_positive_threshold():
    with pytest.raises(ValueError):
        mine_hierarchical([], threshold=0)


# -- co-occurrence aggregation ---------------------------------------------------


def test_cooccurrence_confidence_counts_papers():
    records = [make_record(i, "d1", keywords_zh=["a", "b"]) for i in range(3)]
    triples = aggregate_cooccurrence(records)
    assert len(triples) == 1
    assert triples[0].confidence == 3


def test_never_cooccurring_pair_absent():
    records = [
        make_record(0, "d1", keywords_zh=["a"]),
        make_record(1, "d1", keywords_zh=["b"]),
    ]
    assert aggregate_cooccurrence(records) == []


def test_cooccurrence_matches_quadratic_oracle():
    records = random_corpus(seed=37, n_papers=30, keyword_pool=8, max_keywords=5)
    got = Counter(
        {(t.head[1], t.tail[1]): t.confidence for t in aggregate_cooccurrence(records)}
    )
    assert got == oracles.cooccurrence_scan(records)


def test_ordered_pair_count_invariant():
    records = random_corpus(seed=41, n_papers=25, keyword_pool=6, max_keywords=5)
    co = cooccurrence_counts(records)
    for stat in ordered_pair_stats(records):
        assert isinstance(stat, OrderedPairCount)
        reverse = ordered_pair_counts(records).get((stat.k2, stat.k1), 0)
        assert stat.ordered_count + reverse <= stat.co_count or (
            stat.ordered_count + reverse == stat.co_count
        )
        # keyword lists produced by the generator never repeat, so equality holds
        assert stat.ordered_count + reverse == stat.co_count


# -- keyword translation mining ---------------------------------------------------


def test_translation_candidates_positional_up_to_shorter_list():
    record = make_record(
        0, "d1", keywords_zh=["c1", "c2", "c3"], keywords_en=["e1", "e2", "e3", "e4", "e5"]
    )
    triples = mine_keyword_translations([record] * 2, threshold=1)
    pairs = {tuple(sorted((t.head[1], t.tail[1]))) for t in triples}
    assert pairs == {("c1", "e1"), ("c2", "e2"), ("c3", "e3")}


def test_translation_threshold_is_strict():
    records = [make_record(i, "d1", keywords_zh=["c"], keywords_en=["e"]) for i in range(2)]
    assert mine_keyword_translations(records, threshold=2) == []
    assert len(mine_keyword_translations(records, threshold=1)) == 1


def test_translation_matches_bruteforce_on_10_papers():
    records = random_corpus(seed=43, n_papers=10, keyword_pool=5, max_keywords=4)
    oracle = oracles.positional_translation_scan(records)
    got = {
        tuple(sorted((t.head[1], t.tail[1]))): t.confidence
        for t in mine_keyword_translations(records, threshold=2)
    }
    expected = {
        tuple(sorted(pair)): n for pair, n in oracle.items() if n > 2
    }
    assert got == expected


# -- corpus-level confidence aggregation ------------------------------------------


def test_coauthor_confidence_counts_joint_papers():
    records = [make_record(i, "d1", authors_zh=["甲", "乙"]) for i in range(4)]
    triples = aggregate_coauthorships(records)
    assert len(triples) == 1
    assert triples[0].confidence == 4
    assert Counter(
        {(t.head[1], t.tail[1]): t.confidence for t in triples}
    ) == oracles.coauthor_scan(records)


def test_direct_translation_confidence_counts_supporting_papers():
    records = [
        make_record(i, "d1", authors_zh=["张三"], authors_en=["San Zhang"])
        for i in range(3)
    ]
    triples = aggregate_direct_translations(records)
    author_pairs = [t for t in triples if t.head[0] == "author"]
    assert len(author_pairs) == 1
    assert author_pairs[0].confidence == 3


# -- threshold antitonicity ---------------------------------------------------------


def test_raising_thresholds_never_adds_triples():
    records = random_corpus(seed=47, n_papers=40, keyword_pool=6, max_keywords=5)
    previous_h = None
    previous_t = None
    for threshold in range(1, 11):
        h = {(t.head, t.tail) for t in mine_hierarchical(records, threshold)}
        t_ = {(t.head, t.tail) for t in mine_keyword_translations(records, threshold)}
        if previous_h is not None:
            assert h <= previous_h
            assert t_ <= previous_t
        previous_h, previous_t = h, t_


# -- sharded counting ------------------------------------------------------------


def test_corpus_counters_identical_across_worker_counts():
    records = random_corpus(seed=53, n_papers=60)
    single = corpus_pair_counters(records, workers=1)
    sharded = corpus_pair_counters(records, workers=2)
    assert single.ordered == sharded.ordered
    assert single.cooccurrence == sharded.cooccurrence
    assert single.coauthor == sharded.coauthor
    assert single.direct_translation == sharded.direct_translation
    assert single.translation_candidates == sharded.translation_candidates


def test_paper_entity_mentions_cover_all_surfaces(appendix_paper):
    ids = paper_entity_mentions(appendix_paper, CONFIG)
    surfaces = {s for _, s in ids}
    assert appendix_paper.title_zh in surfaces
    assert appendix_paper.title_en in surfaces
    assert set(appendix_paper.authors_zh) <= surfaces
    assert set(appendix_paper.authors_en) <= surfaces
    assert set(appendix_paper.keywords_zh) <= surfaces
    assert set(appendix_paper.keywords_en) <= surfaces
    assert "2018" in surfaces
    assert appendix_paper.journal in surfaces
    assert "computer science" in surfaces
