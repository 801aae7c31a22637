"""techkg: builds a technology-oriented knowledge graph from bibliographic
paper records and derives its downstream datasets."""

from .records import (
    JournalDomainMap,
    PaperRecord,
    classify_domain,
    load_journal_map,
    parse_records,
    serialize_records,
)
from .relations import (
    EntityKind,
    ExtractionConfig,
    Relation,
    Triple,
    aggregate_cooccurrence,
    extract_paper_local_triples,
    mine_hierarchical,
    mine_keyword_translations,
)
from .terms import TermScore, build_domain_documents, compute_tfidf, select_top
from .graph import (
    Entity,
    KnowledgeGraph,
    build_graph,
    export_graph,
    import_graph,
    report_basic_stats,
)
from .analytics import (
    classify_relation_types,
    cross_domain_duplicates,
    in_domain_duplicates,
    keyword_duplicates_by_cutoff,
)
from .derive import (
    derive_techabs,
    derive_techbiterm,
    derive_techkg10,
    derive_techner,
    derive_techqa,
    derive_techre,
    derive_techterm,
    split_dataset,
)

__version__ = "0.1.0"
