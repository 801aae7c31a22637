#!/usr/bin/env python3
"""Regenerate the bundled 50-paper fixture corpus under tests/data/.

The corpus is hand-designed (no RNG): it exercises cross-domain duplicate
names, affiliation inclusion, keyword hierarchies, bilingual pairs, nested
terminologies, and co-mention sentences for every derivation.  The script
asserts those properties hold before writing anything.  Two deliberately bad
lines ride along: one malformed JSON line and one record missing its journal.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

REPO = Path(__file__).resolve().parent.parent
DATA = REPO / "tests" / "data"
sys.path.insert(0, str(REPO / "src"))

from techkg.derive import derive_techkg10, derive_techner, derive_techqa, derive_techre
from techkg.derive import LabeledAbstract, QA_TEMPLATES, derive_techterm
from techkg.graph import build_graph
from techkg.records import classify_all, load_journal_map, parse_records
from techkg.relations import ExtractionConfig, Relation
from techkg.terms import build_domain_documents, compute_tfidf

JOURNALS = {
    "计算机学报": "computer science",
    "软件学报": "computer science",
    "钢铁研究学报": "metallurgical industry",
    "交通运输工程学报": "traffic transportation",
    "自然科学进展": "nature science",
    "社会科学战线": "social science",
}

CS_AUTHORS = ["张伟", "王芳", "李娜", "刘洋", "陈静", "李宁"]
CS_AUTHORS_EN = ["Wei Zhang", "Fang Wang", "Na Li", "Yang Liu", "Jing Chen", "Ning Li"]
METAL_AUTHORS = ["赵敏", "黄磊", "李宁", "周涛"]
TRAFFIC_AUTHORS = ["吴斌", "郑强", "李宁", "王芳"]

AFFILIATIONS = [
    "东北大学",
    "计算机科学与工程学院，东北大学",
    "清华大学",
    "北京交通大学",
    "中南大学",
]

CS_KEYWORDS = [
    ("机器学习", "machine learning"),
    ("深度学习", "deep learning"),
    ("神经网络", "neural network"),
    ("机器翻译", "machine translation"),
    ("神经机器翻译", "neural machine translation"),
    ("知识图谱", "knowledge graph"),
    ("数据挖掘", "data mining"),
    ("自然语言处理", "natural language processing"),
]
METAL_KEYWORDS = [
    ("连铸", "continuous casting"),
    ("轧制", "rolling"),
    ("钢铁冶金", "ferrous metallurgy"),
    ("数值模拟", "numerical simulation"),
]
TRAFFIC_KEYWORDS = [
    ("交通流", "traffic flow"),
    ("智能交通", "intelligent transportation"),
    ("数值模拟", "numerical simulation"),
    ("机器学习", "machine learning"),
]


def cs_paper(i, authors, keywords, year, journal="计算机学报", second_affil=None):
    zh = [k for k, _ in keywords]
    en = [e for _, e in keywords]
    affs = ["东北大学"] if second_affil is None else ["东北大学", second_affil]
    sentences = [f"本文研究{zh[0]}与{zh[1]}的结合方法。"]
    if len(zh) >= 3:
        sentences.append(f"实验在{zh[2]}任务上验证了{zh[0]}的效果。")
    sentences.append(f"结果表明{zh[0]}与{zh[1]}均优于基线。")
    idx = CS_AUTHORS.index(authors[0])
    return {
        "paper_id": f"cs{i:03d}",
        "title_zh": f"基于{zh[0]}的{zh[1]}方法研究{i:02d}",
        "title_en": f"A {en[0]} approach to {en[1]} ({i:02d})",
        "authors_zh": authors,
        "authors_en": [CS_AUTHORS_EN[CS_AUTHORS.index(a)] for a in authors],
        "affiliations_zh": affs,
        "affiliations_en": ["Northeastern University"],
        "keywords_zh": zh,
        "keywords_en": en,
        "abstract_zh": "".join(sentences),
        "journal": journal,
        "year": year,
    }


def plain_paper(pid, title, authors, affs, keywords, journal, year, domain_word):
    zh = [k for k, _ in keywords]
    en = [e for _, e in keywords]
    abstract = (
        f"针对{domain_word}问题，本文分析了{zh[0]}与{zh[1]}的相互作用。"
        f"研究显示{zh[0]}对{domain_word}有显著影响。"
    )
    return {
        "paper_id": pid,
        "title_zh": title,
        "authors_zh": authors,
        "affiliations_zh": affs,
        "keywords_zh": zh,
        "keywords_en": en,
        "abstract_zh": abstract,
        "journal": journal,
        "year": year,
    }


def build_records() -> list[dict]:
    records = []

    # 18 computer science papers; dense keyword repetitions drive the
    # hierarchy/translation counters and the distant-supervision bags.
    base = CS_KEYWORDS
    cs_specs = [
        (["张伟", "王芳"], [base[0], base[1], base[2]], 2015),
        (["张伟", "李娜", "刘洋"], [base[0], base[1], base[5]], 2016),
        (["王芳", "陈静"], [base[0], base[1], base[3]], 2016),
        (["李宁", "张伟"], [base[0], base[1], base[6]], 2017),
        (["刘洋"], [base[0], base[2], base[7]], 2017),
        (["陈静", "李娜"], [base[0], base[1], base[2]], 2018),
        (["张伟", "王芳", "李宁"], [base[3], base[4], base[7]], 2018),
        (["李娜"], [base[3], base[4], base[0]], 2018),
        (["王芳"], [base[3], base[4], base[1]], 2019),
        (["刘洋", "陈静"], [base[3], base[4], base[2]], 2019),
        (["张伟"], [base[5], base[6], base[0]], 2019),
        (["李宁"], [base[5], base[6], base[1]], 2019),
        (["王芳", "李娜"], [base[0], base[1], base[7]], 2020),
        (["陈静"], [base[0], base[2], base[5]], 2020),
        (["刘洋", "张伟"], [base[0], base[1], base[4]], 2020),
        (["李娜", "王芳"], [base[7], base[0], base[3]], 2021),
        (["张伟", "陈静"], [base[0], base[1], base[6]], 2021),
        (["王芳"], [base[4], base[3], base[2]], 2021),
    ]
    for i, (authors, keywords, year) in enumerate(cs_specs):
        journal = "软件学报" if i % 5 == 4 else "计算机学报"
        second = "计算机科学与工程学院，东北大学" if i % 3 == 1 else (
            "清华大学" if i % 3 == 2 else None
        )
        records.append(cs_paper(i, authors, keywords, year, journal, second))

    # 12 metallurgical papers
    mk = METAL_KEYWORDS
    for i in range(12):
        authors = [METAL_AUTHORS[i % 4]]
        if i % 2 == 0:
            authors.append(METAL_AUTHORS[(i + 1) % 4])
        keywords = [mk[i % 4], mk[(i + 1) % 4]]
        affs = ["中南大学"] if i % 3 else ["东北大学"]
        records.append(
            plain_paper(
                f"mt{i:03d}", f"钢铁冶金过程研究{i:02d}", authors, affs,
                keywords, "钢铁研究学报", 2016 + i % 5, "冶金",
            )
        )

    # 10 traffic papers
    tk = TRAFFIC_KEYWORDS
    for i in range(10):
        authors = [TRAFFIC_AUTHORS[i % 4]]
        if i % 2 == 0:
            authors.append(TRAFFIC_AUTHORS[(i + 2) % 4])
        keywords = [tk[i % 4], tk[(i + 1) % 4]]
        records.append(
            plain_paper(
                f"tr{i:03d}", f"交通流建模研究{i:02d}", authors, ["北京交通大学"],
                keywords, "交通运输工程学报", 2015 + i % 6, "交通",
            )
        )

    # 4 nature science + 4 social science (the excluded comprehensive domains)
    for i in range(4):
        records.append(
            plain_paper(
                f"ns{i:03d}", f"综合自然科学研究{i:02d}", ["李宁", "张伟"][: 1 + i % 2],
                ["东北大学"], [("数值模拟", "numerical simulation"), ("机器学习", "machine learning")],
                "自然科学进展", 2017 + i, "自然科学",
            )
        )
    for i in range(4):
        records.append(
            plain_paper(
                f"ss{i:03d}", f"社会科学研究{i:02d}", ["李宁"],
                ["清华大学"], [("知识图谱", "knowledge graph"), ("数据挖掘", "data mining")],
                "社会科学战线", 2018 + i, "社会科学",
            )
        )

    # 2 papers in an unmapped journal
    for i in range(2):
        records.append(
            plain_paper(
                f"un{i:03d}", f"边缘领域研究{i:02d}", ["周涛"], ["中南大学"],
                [("边缘计算", "edge computing"), ("数值模拟", "numerical simulation")],
                "未知期刊", 2019 + i, "边缘",
            )
        )

    # one paper whose year is present but not a 4-digit integer: kept, no
    # published_year triple
    records[7]["year"] = 99
    assert len(records) == 50
    return records


FIXTURE_CONFIG = {
    "inputs": ["fixture_corpus.jsonl"],
    "journal_map": "journal_map.tsv",
    "output_dir": "out",
    "seed": 20180923,
    "hierarchical_threshold": 2,
    "translation_threshold": 1,
    "re_cooccurrence_threshold": 2,
    "top_fraction": 0.5,
    "min_mentions": 1,
    "techterm_per_domain": 10,
    "techbiterm_per_domain": 10,
    "techabs_per_domain": 10,
    "techre_max_bags_per_domain": 50,
    "techre_max_sentences_per_bag": 6,
    "techner_per_domain": 30,
    "techqa_per_type_limit": 25,
}


def validate(records: list[dict]) -> None:
    """Re-run the pipeline pieces and assert the fixture is rich enough."""
    lines = [json.dumps(r, ensure_ascii=False) for r in records]
    parsed = parse_records(lines).records
    assert len(parsed) == 50
    journal_map = load_journal_map(DATA / "journal_map.tsv")
    classified, unmapped = classify_all(parsed, journal_map)
    assert unmapped == 2

    config = ExtractionConfig(hierarchical_threshold=2, translation_threshold=1)
    kg = build_graph(classified, config)
    scores = compute_tfidf(build_domain_documents(classified))
    kg.attach_term_scores(scores)

    assert any(kg.triples_of(Relation.HIERARCHICAL)), "no hierarchical triples"
    keyword_translations = [
        t for t in kg.triples_of(Relation.TRANSLATION_OF)
        if t.head[0] == "keyword" and t.tail[0] == "keyword"
    ]
    assert keyword_translations, "no mined keyword translations"

    kg10 = derive_techkg10(kg, scores, min_mentions=1, fraction=0.5)
    abstracts = [
        LabeledAbstract(r.domain, r.abstract_zh) for r in classified if r.abstract_zh
    ]
    bags = derive_techre(kg10, abstracts, threshold=2, seed=20180923)
    labels = {b.label for b in bags}
    assert labels == {"hierarchical", "NA"}, f"bag labels {labels}"

    term_lists = derive_techterm(scores, per_domain=10)
    cs_terms = term_lists["computer science"]
    assert "机器翻译" in cs_terms and "神经机器翻译" in cs_terms, cs_terms
    samples = derive_techner(term_lists, abstracts, per_domain=30, seed=20180923)
    nested = [
        s for s in samples if any(term == "神经机器翻译" for _, _, term in s.spans)
    ]
    assert nested, "no sentence exercises the nested longest-match rule"

    items = derive_techqa(kg10, per_type_limit=10_000, seed=20180923)
    assert {i.pattern_id for i in items} == set(QA_TEMPLATES), "missing QA patterns"

    bags_again = derive_techre(kg10, abstracts, threshold=2, seed=20180923)
    assert len(bags_again) >= 3, "need at least a few bags for the split step"


def main() -> None:
    DATA.mkdir(parents=True, exist_ok=True)
    with open(DATA / "journal_map.tsv", "w", encoding="utf-8") as fh:
        fh.write("# journal\tdomain\n")
        for journal, domain in JOURNALS.items():
            fh.write(f"{journal}\t{domain}\n")

    records = build_records()
    validate(records)

    with open(DATA / "fixture_corpus.jsonl", "w", encoding="utf-8") as fh:
        for i, record in enumerate(records):
            fh.write(json.dumps(record, ensure_ascii=False) + "\n")
            if i == 24:
                fh.write('{"paper_id": "broken", "title_zh":\n')  # malformed line
            if i == 39:
                no_journal = dict(record, paper_id="nj001")
                del no_journal["journal"]
                fh.write(json.dumps(no_journal, ensure_ascii=False) + "\n")

    with open(DATA / "fixture_config.json", "w", encoding="utf-8") as fh:
        json.dump(FIXTURE_CONFIG, fh, ensure_ascii=False, indent=2)
        fh.write("\n")

    print(f"wrote fixture corpus (52 lines), journal map, config under {DATA}")


if __name__ == "__main__":
    main()
