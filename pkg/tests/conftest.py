import sys
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, str(Path(__file__).parent))

from techkg.records import PaperRecord

settings.register_profile(
    "ci",
    derandomize=True,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("ci")

DATA_DIR = Path(__file__).parent / "data"


@pytest.fixture
def appendix_paper() -> PaperRecord:
    """The canonical m=3, s=2, n=3, l=3 paper with bilingual title and
    authors (no English affiliations)."""
    return PaperRecord(
        paper_id="p1",
        title_zh="面向技术文献的知识图谱构建",
        title_en="Building a Knowledge Graph from Technical Literature",
        journal="计算机学报",
        year=2018,
        domain="computer science",
        authors_zh=["张三", "李四", "王五"],
        authors_en=["San Zhang", "Si Li", "Wu Wang"],
        affiliations_zh=["东北大学", "清华大学"],
        keywords_zh=["自然语言处理", "神经机器翻译", "注意力机制"],
        keywords_en=["natural language processing", "neural machine translation", "attention mechanism"],
        abstract_zh="本文研究自然语言处理与神经机器翻译。注意力机制是核心方法。",
    )


@pytest.fixture
def data_dir() -> Path:
    return DATA_DIR
