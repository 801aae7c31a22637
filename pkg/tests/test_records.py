import io
import json
from collections import Counter

import pytest
from hypothesis import given
from hypothesis import strategies as st

from techkg.records import (
    UNMAPPED_DOMAIN,
    JournalDomainMap,
    MalformedRecordError,
    PaperRecord,
    classify_all,
    classify_domain,
    load_journal_map,
    normalize_text,
    parse_csv_records,
    parse_records,
    parse_year,
    serialize_records,
)


def line(**fields) -> str:
    base = {"paper_id": "p1", "title_zh": "标题", "journal": "期刊", "year": 2019}
    base.update(fields)
    return json.dumps(base, ensure_ascii=False)


def test_author_whitespace_normalized():
    report = parse_records([line(authors_zh=["张三", " 李四 "])])
    assert report.records[0].authors_zh == ["张三", "李四"]


def test_internal_whitespace_collapsed_and_empties_dropped():
    report = parse_records([line(keywords_zh=["a  b\tc", "  ", ""])])
    assert report.records[0].keywords_zh == ["a b c"]


def test_missing_journal_rejected_and_counted():
    report = parse_records([line(journal=None)])
    assert report.records == []
    assert report.rejected_count == 1
    assert "journal" in report.rejected[0].reason


@pytest.mark.parametrize("field", ["paper_id", "title_zh", "journal"])
def test_each_required_field(field):
    report = parse_records([line(**{field: None})])
    assert report.rejected_count == 1


def test_absent_year_key_rejected_but_null_year_kept():
    raw = json.loads(line())
    del raw["year"]
    report = parse_records([json.dumps(raw, ensure_ascii=False)])
    assert report.rejected_count == 1

    # a present but unparseable year keeps the record without the field
    report = parse_records([line(year=None)])
    assert report.rejected_count == 0
    assert report.records[0].year is None


def test_three_line_file_with_one_malformed_lenient():
    lines = [line(paper_id="p1"), "{not json", line(paper_id="p3")]
    report = parse_records(lines)
    assert [r.paper_id for r in report.records] == ["p1", "p3"]
    assert report.malformed_count == 1
    assert report.malformed[0].line_no == 2


def test_strict_mode_aborts_on_malformed():
    with pytest.raises(MalformedRecordError, match="line 2"):
        parse_records([line(), "{not json"], strict=True)


def test_blank_lines_skipped():
    report = parse_records(["", line(), "   "])
    assert len(report.records) == 1
    assert report.malformed_count == 0


def test_wrong_list_type_is_malformed():
    report = parse_records([line(authors_zh="张三")])
    assert report.malformed_count == 1


@pytest.mark.parametrize(
    "raw,expected",
    [(2019, 2019), ("2019", 2019), (99, None), (12345, None), ("19a9", None), (True, None)],
)
def test_year_parsing_accepts_four_digit_integers_only(raw, expected):
    assert parse_year(raw) == expected


def test_invalid_year_keeps_record_without_year():
    report = parse_records([line(year=99)])
    assert report.rejected_count == 0
    assert report.records[0].year is None


JOURNAL_MAP = JournalDomainMap({"计算机学报": "computer science", "chinese journal of computers": "computer science"})


def test_classify_known_journal():
    record = PaperRecord("p1", "t", "Chinese Journal of Computers", 2019)
    assert classify_domain(record, JOURNAL_MAP).domain == "computer science"


def test_classify_is_case_and_whitespace_insensitive():
    record = PaperRecord("p1", "t", "  CHINESE  Journal of Computers ", 2019)
    # journal itself was normalized at parse time; lookup still folds case
    assert classify_domain(record, JOURNAL_MAP).domain == "computer science"


def test_classify_unknown_journal_goes_to_unmapped_and_counts():
    records = [PaperRecord("p1", "t", "未知期刊", 2019)]
    classified, unmapped = classify_all(records, JOURNAL_MAP)
    assert classified[0].domain == UNMAPPED_DOMAIN
    assert unmapped == 1


def test_classify_same_journal_same_domain():
    a = classify_domain(PaperRecord("p1", "t", "计算机学报", 2019), JOURNAL_MAP)
    b = classify_domain(PaperRecord("p2", "u", "计算机学报", 2020), JOURNAL_MAP)
    assert a.domain == b.domain


def test_classify_changes_only_domain(appendix_paper):
    classified = classify_domain(appendix_paper, JOURNAL_MAP)
    for field in (
        "paper_id", "title_zh", "title_en", "journal", "year", "authors_zh",
        "authors_en", "affiliations_zh", "affiliations_en", "keywords_zh",
        "keywords_en", "abstract_zh", "abstract_en",
    ):
        assert getattr(classified, field) == getattr(appendix_paper, field)


# -- round trip ---------------------------------------------------------------

_text = st.text(
    alphabet=st.characters(blacklist_categories=("Cs", "Cc")), min_size=1, max_size=8
).map(normalize_text).filter(bool)
_texts = st.lists(_text, max_size=3)


@st.composite
def records_strategy(draw):
    return PaperRecord(
        paper_id=draw(_text),
        title_zh=draw(_text),
        journal=draw(_text),
        year=draw(st.none() | st.integers(min_value=1000, max_value=9999)),
        title_en=draw(st.none() | _text),
        authors_zh=draw(_texts),
        authors_en=draw(_texts),
        affiliations_zh=draw(_texts),
        affiliations_en=draw(_texts),
        keywords_zh=draw(_texts),
        keywords_en=draw(_texts),
        abstract_zh=draw(st.none() | _text),
        abstract_en=draw(st.none() | _text),
        domain=draw(st.none() | _text),
    )


@given(st.lists(records_strategy(), max_size=5))
def test_parse_serialize_round_trip(records):
    buffer = io.StringIO()
    serialize_records(records, buffer)
    report = parse_records(buffer.getvalue().splitlines())
    assert report.records == records
    assert report.malformed_count == report.rejected_count == 0


@given(st.lists(records_strategy(), max_size=5))
def test_paper_id_multiset_preserved(records):
    buffer = io.StringIO()
    serialize_records(records, buffer)
    report = parse_records(buffer.getvalue().splitlines())
    assert Counter(r.paper_id for r in report.records) == Counter(
        r.paper_id for r in records
    )


# -- CSV adapter ---------------------------------------------------------------


def test_csv_adapter_matches_jsonl():
    csv_text = (
        "paper_id,title_zh,title_en,authors_zh,authors_en,affiliations_zh,"
        "affiliations_en,keywords_zh,keywords_en,abstract_zh,abstract_en,journal,year\n"
        'p1,标题,Title,张三|李四,San Zhang|Si Li,东北大学,,机器学习|深度学习,ML|DL,摘要。,,期刊,2019\n'
    )
    report = parse_csv_records(io.StringIO(csv_text))
    assert report.malformed_count == 0
    record = report.records[0]
    assert record.authors_zh == ["张三", "李四"]
    assert record.keywords_en == ["ML", "DL"]
    assert record.title_en == "Title"
    assert record.abstract_en is None
    assert record.year == 2019

    jsonl = parse_records(
        [
            line(
                title_zh="标题", title_en="Title", authors_zh=["张三", "李四"],
                authors_en=["San Zhang", "Si Li"], affiliations_zh=["东北大学"],
                keywords_zh=["机器学习", "深度学习"], keywords_en=["ML", "DL"],
                abstract_zh="摘要。", journal="期刊",
            )
        ]
    ).records[0]
    assert record == jsonl


def test_csv_wrong_column_count_is_malformed():
    report = parse_csv_records(io.StringIO("a,b,c\n"))
    assert report.malformed_count == 1


# -- journal map ----------------------------------------------------------------


def test_load_journal_map(tmp_path):
    path = tmp_path / "journals.tsv"
    path.write_text(
        "# comment\n计算机学报\tcomputer science\n\n钢铁研究\tmetallurgical industry\n",
        encoding="utf-8",
    )
    journal_map = load_journal_map(path)
    assert journal_map.lookup("计算机学报") == "computer science"
    assert journal_map.domains == {"computer science", "metallurgical industry"}


def test_journal_map_conflicting_domain_raises(tmp_path):
    path = tmp_path / "journals.tsv"
    path.write_text("期刊\ta\n期刊\tb\n", encoding="utf-8")
    with pytest.raises(ValueError, match="mapped to both"):
        load_journal_map(path)
