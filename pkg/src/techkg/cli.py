"""Command-line pipeline: ingest -> build-kg -> stats -> derive -> split.

Every subcommand reads the prior stage's artifacts from the configured
output directory and writes a manifest (config hash, seed, input digests)
beside its outputs.  Reruns with identical inputs and config produce
byte-identical output trees; nothing here depends on wall-clock time or
absolute paths.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import os
import sys
from pathlib import Path
from typing import Sequence

from .analytics import (
    cross_domain_duplicates,
    duplicate_report_dict,
    entity_sets_by_domain,
    in_domain_duplicates,
    in_domain_report_dict,
    keyword_duplicates_by_cutoff,
    per_domain_bucket_rows,
    relation_type_report_dict,
    relation_types_by_cutoff,
    write_analytics_dump,
    write_bucket_table,
    write_cutoff_duplicate_table,
    write_duplicate_table,
    write_in_domain_table,
    write_per_domain_bucket_table,
    write_relation_type_table,
)
from .config import ConfigError, PipelineConfig, load_config
from .derive import (
    LabeledAbstract,
    SentenceSplitter,
    derive_techabs,
    derive_techbiterm,
    derive_techkg10,
    derive_techner,
    derive_techqa,
    derive_techre,
    derive_techterm,
    keyword_domains_from_scores,
    load_qa_templates,
    read_techterm,
    split_dataset,
    write_techabs,
    write_techbiterm,
    write_techner,
    write_techqa,
    write_techre,
    write_techterm,
)
from .graph import (
    KnowledgeGraph,
    build_graph,
    export_graph,
    import_graph,
    report_basic_stats,
    write_basic_stats,
)
from .records import (
    MalformedRecordError,
    PaperRecord,
    classify_all,
    load_journal_map,
    parse_csv_records,
    parse_records_file,
    serialize_records_file,
)
from .relations import EntityKind, Relation
from .terms import (
    build_domain_documents,
    compute_tfidf,
    read_scores_file,
    top_selection_by_domain,
    write_scores_file,
)

logger = logging.getLogger(__name__)

CONFIG_ENV_VAR = "TECHKG_CONFIG"

INGEST_DIR = "ingest"
KG_DIR = "kg"
STATS_DIR = "stats"
DATASETS_DIR = "datasets"
SPLITS_DIR = "splits"
RECORDS_FILE = "records.jsonl"
SCORES_FILE = "scores.tsv"

DATASET_NAMES = (
    "techkg10",
    "techterm",
    "techbiterm",
    "techabs",
    "techre",
    "techner",
    "techqa",
)


class MissingArtifactError(RuntimeError):
    def __init__(self, path: Path, needed_command: str):
        super().__init__(
            f"missing required artifact {path}; run `techkg {needed_command}` first"
        )
        self.needed_command = needed_command


def _sha256_file(path: Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def _manifest_key(path: Path, output_root: Path) -> str:
    """Output-dir-relative path for internal artifacts, bare file name for
    external inputs; keeps manifests independent of where the tree lives."""
    try:
        return path.resolve().relative_to(output_root.resolve()).as_posix()
    except ValueError:
        return path.name


def write_manifest(
    command: str,
    config: PipelineConfig,
    stage_dir: Path,
    inputs: Sequence[Path],
    outputs: Sequence[Path],
    extra: dict | None = None,
    filename: str = "manifest.json",
) -> Path:
    output_root = Path(config.output_dir)
    manifest = {
        "command": command,
        "config_sha256": config.digest(),
        "seed": config.seed,
        "inputs": {_manifest_key(p, output_root): _sha256_file(p) for p in inputs},
        "outputs": {_manifest_key(p, output_root): _sha256_file(p) for p in outputs},
    }
    if extra:
        manifest.update(extra)
    path = stage_dir / filename
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, ensure_ascii=False, sort_keys=True, indent=2)
        fh.write("\n")
    return path


def _require(path: Path, needed_command: str) -> Path:
    if not path.exists():
        raise MissingArtifactError(path, needed_command)
    return path


def _load_records(config: PipelineConfig) -> list[PaperRecord]:
    path = _require(Path(config.output_dir) / INGEST_DIR / RECORDS_FILE, "ingest")
    return parse_records_file(path, strict=True).records


def _load_graph(config: PipelineConfig) -> KnowledgeGraph:
    _require(Path(config.output_dir) / KG_DIR / "triples.tsv", "build-kg")
    return import_graph(Path(config.output_dir) / KG_DIR)


def _load_scores(config: PipelineConfig):
    path = _require(Path(config.output_dir) / KG_DIR / SCORES_FILE, "build-kg")
    return read_scores_file(path)


def _load_techkg10(config: PipelineConfig) -> KnowledgeGraph:
    directory = Path(config.output_dir) / DATASETS_DIR / "techkg10"
    _require(directory / "triples.tsv", "derive techkg10")
    return import_graph(directory)


def _corpus_abstracts(records: Sequence[PaperRecord]) -> list[LabeledAbstract]:
    return [
        LabeledAbstract(r.domain or "", r.abstract_zh)
        for r in records
        if r.abstract_zh is not None
    ]


def _splitter(config: PipelineConfig) -> SentenceSplitter:
    return SentenceSplitter(
        hard_terminators=config.hard_sentence_terminators,
        soft_terminators=config.soft_sentence_terminators,
    )


# -- subcommands -------------------------------------------------------------


def run_ingest(config: PipelineConfig) -> int:
    problems = []
    if not config.inputs:
        problems.append("inputs: at least one input file is required")
    if not config.journal_map:
        problems.append("journal_map: required")
    if not config.output_dir:
        problems.append("output_dir: required")
    if problems:
        raise ConfigError(problems)

    journal_map = load_journal_map(config.journal_map)
    stage_dir = Path(config.output_dir) / INGEST_DIR
    stage_dir.mkdir(parents=True, exist_ok=True)

    all_records: list[PaperRecord] = []
    malformed = rejected = 0
    for input_path in config.inputs:
        if config.input_format == "csv":
            with open(input_path, encoding="utf-8", newline="") as fh:
                report = parse_csv_records(fh, strict=config.strict)
        else:
            report = parse_records_file(input_path, strict=config.strict)
        malformed += report.malformed_count
        rejected += report.rejected_count
        all_records.extend(report.records)

    classified, unmapped = classify_all(all_records, journal_map)
    records_path = stage_dir / RECORDS_FILE
    serialize_records_file(classified, records_path)

    write_manifest(
        "ingest",
        config,
        stage_dir,
        inputs=[Path(p) for p in config.inputs] + [Path(config.journal_map)],
        outputs=[records_path],
        extra={
            "records": len(classified),
            "malformed": malformed,
            "rejected": rejected,
            "unmapped": unmapped,
        },
    )
    logger.info(
        "ingest: %d records (%d malformed, %d rejected, %d unmapped journals)",
        len(classified), malformed, rejected, unmapped,
    )
    return 0


def run_build_kg(config: PipelineConfig) -> int:
    records = _load_records(config)
    stage_dir = Path(config.output_dir) / KG_DIR
    stage_dir.mkdir(parents=True, exist_ok=True)

    kg = build_graph(records, config.extraction_config(), workers=config.workers)
    scores = compute_tfidf(build_domain_documents(records))
    kg.attach_term_scores(scores)

    export_graph(kg, stage_dir)
    scores_path = stage_dir / SCORES_FILE
    write_scores_file(scores, scores_path)

    records_path = Path(config.output_dir) / INGEST_DIR / RECORDS_FILE
    write_manifest(
        "build-kg",
        config,
        stage_dir,
        inputs=[records_path],
        outputs=[stage_dir / "triples.tsv", stage_dir / "entities.tsv", scores_path],
        extra={
            "papers": len(records),
            "triples": len(kg),
            "entities": len(kg.entity_ids()),
            "rejected_triples": kg.rejected_triples,
        },
    )
    logger.info("build-kg: %d triples over %d entities", len(kg), len(kg.entity_ids()))
    return 0


def run_stats(config: PipelineConfig) -> int:
    records = _load_records(config)
    kg = _load_graph(config)
    scores = _load_scores(config)
    stage_dir = Path(config.output_dir) / STATS_DIR
    stage_dir.mkdir(parents=True, exist_ok=True)

    basic = report_basic_stats(kg)
    write_basic_stats(basic, stage_dir / "table1_basic_stats.tsv")

    author_sets = entity_sets_by_domain(records, EntityKind.AUTHOR)
    author_report = cross_domain_duplicates(
        author_sets, EntityKind.AUTHOR, config.excluded_domains
    )
    write_duplicate_table(author_report, stage_dir / "table2_author_duplicates.tsv")
    write_bucket_table(author_report, stage_dir / "table3_author_domain_distribution.tsv")

    domains = config.in_domain_stat_domains or sorted(
        {r.domain for r in records if r.domain is not None}
    )
    by_domain: dict[str, list[PaperRecord]] = {}
    for record in records:
        by_domain.setdefault(record.domain or "", []).append(record)
    in_domain_reports = [
        in_domain_duplicates(by_domain[d]) for d in domains if d in by_domain
    ]
    write_in_domain_table(in_domain_reports, stage_dir / "table4_in_domain_authors.tsv")

    keyword_cutoffs = keyword_duplicates_by_cutoff(scores, config.tfidf_fractions)
    write_cutoff_duplicate_table(keyword_cutoffs, stage_dir / "table5_keyword_duplicates.tsv")

    keyword_sets = top_selection_by_domain(scores, config.top_fraction)
    bucket_rows = per_domain_bucket_rows(keyword_sets)
    write_per_domain_bucket_table(
        bucket_rows, stage_dir / "table6_keyword_domain_distribution.tsv"
    )

    typing_reports = relation_types_by_cutoff(kg, scores, config.tfidf_fractions)
    write_relation_type_table(typing_reports, stage_dir / "table7_relation_types.tsv")

    dump = {
        "basic_stats": {
            "rows": [
                {"relation": r.relation.value, "entities": r.entity_num, "triples": r.triplet_num}
                for r in basic.rows
            ],
            "total_entities": basic.total_entities,
            "total_triples": basic.total_triples,
        },
        "author_duplicates": duplicate_report_dict(author_report),
        "in_domain_authors": [in_domain_report_dict(r) for r in in_domain_reports],
        "keyword_duplicates_by_cutoff": [
            {"fraction": fraction, "report": duplicate_report_dict(report)}
            for fraction, report in keyword_cutoffs
        ],
        "relation_types_by_cutoff": [
            {"fraction": fraction, "report": relation_type_report_dict(report)}
            for fraction, report in typing_reports
        ],
    }
    write_analytics_dump(dump, stage_dir / "analytics.json")

    outputs = sorted(p for p in stage_dir.iterdir() if p.name != "manifest.json")
    write_manifest(
        "stats",
        config,
        stage_dir,
        inputs=[
            Path(config.output_dir) / INGEST_DIR / RECORDS_FILE,
            Path(config.output_dir) / KG_DIR / "triples.tsv",
            Path(config.output_dir) / KG_DIR / SCORES_FILE,
        ],
        outputs=outputs,
    )
    logger.info("stats: wrote %d report files", len(outputs))
    return 0


def run_derive(config: PipelineConfig, name: str) -> int:
    datasets_dir = Path(config.output_dir) / DATASETS_DIR
    datasets_dir.mkdir(parents=True, exist_ok=True)
    kg_inputs = [
        Path(config.output_dir) / KG_DIR / "triples.tsv",
        Path(config.output_dir) / KG_DIR / SCORES_FILE,
    ]

    if name == "techkg10":
        kg = _load_graph(config)
        scores = _load_scores(config)
        kg10 = derive_techkg10(kg, scores, config.min_mentions, config.top_fraction)
        out_dir = datasets_dir / "techkg10"
        export_graph(kg10, out_dir)
        write_manifest(
            "derive techkg10",
            config,
            out_dir,
            inputs=kg_inputs,
            outputs=[out_dir / "triples.tsv", out_dir / "entities.tsv"],
            extra={"triples": len(kg10), "entities": len(kg10.entity_ids())},
        )
        logger.info("techkg10: %d triples", len(kg10))
        return 0

    if name == "techterm":
        scores = _load_scores(config)
        term_lists = derive_techterm(scores, config.techterm_per_domain)
        out_path = datasets_dir / "techterm.tsv"
        write_techterm(term_lists, out_path)
        write_manifest(
            "derive techterm", config, datasets_dir,
            inputs=[kg_inputs[1]], outputs=[out_path],
            extra={"domains": len(term_lists)},
            filename="techterm_manifest.json",
        )
        return 0

    if name == "techbiterm":
        kg = _load_graph(config)
        scores = _load_scores(config)
        pairs = derive_techbiterm(
            kg.triples_of(Relation.TRANSLATION_OF),
            keyword_domains_from_scores(scores),
            config.techbiterm_per_domain,
        )
        out_path = datasets_dir / "techbiterm.tsv"
        write_techbiterm(pairs, out_path)
        write_manifest(
            "derive techbiterm", config, datasets_dir,
            inputs=kg_inputs, outputs=[out_path],
            extra={"domains": len(pairs)},
            filename="techbiterm_manifest.json",
        )
        return 0

    if name == "techabs":
        records = _load_records(config)
        items = derive_techabs(records, config.techabs_per_domain, config.seed or 0)
        out_path = datasets_dir / "techabs.jsonl"
        write_techabs(items, out_path)
        write_manifest(
            "derive techabs", config, datasets_dir,
            inputs=[Path(config.output_dir) / INGEST_DIR / RECORDS_FILE],
            outputs=[out_path],
            extra={"abstracts": len(items)},
            filename="techabs_manifest.json",
        )
        return 0

    if name == "techre":
        kg10 = _load_techkg10(config)
        records = _load_records(config)
        bags = derive_techre(
            kg10,
            _corpus_abstracts(records),
            threshold=config.re_cooccurrence_threshold,
            max_bags_per_domain=config.techre_max_bags_per_domain,
            max_sentences_per_bag=config.techre_max_sentences_per_bag,
            seed=config.seed or 0,
            splitter=_splitter(config),
            na_proportion=config.techre_na_proportion,
        )
        out_path = datasets_dir / "techre.jsonl"
        write_techre(bags, out_path)
        write_manifest(
            "derive techre", config, datasets_dir,
            inputs=[
                datasets_dir / "techkg10" / "triples.tsv",
                Path(config.output_dir) / INGEST_DIR / RECORDS_FILE,
            ],
            outputs=[out_path],
            extra={"bags": len(bags)},
            filename="techre_manifest.json",
        )
        return 0

    if name == "techner":
        term_path = _require(datasets_dir / "techterm.tsv", "derive techterm")
        records = _load_records(config)
        samples = derive_techner(
            read_techterm(term_path),
            _corpus_abstracts(records),
            per_domain=config.techner_per_domain,
            seed=config.seed or 0,
            splitter=_splitter(config),
        )
        out_path = datasets_dir / "techner.jsonl"
        write_techner(samples, out_path)
        write_manifest(
            "derive techner", config, datasets_dir,
            inputs=[term_path, Path(config.output_dir) / INGEST_DIR / RECORDS_FILE],
            outputs=[out_path],
            extra={"samples": len(samples)},
            filename="techner_manifest.json",
        )
        return 0

    if name == "techqa":
        kg10 = _load_techkg10(config)
        templates = load_qa_templates(config.qa_templates) if config.qa_templates else None
        items = derive_techqa(
            kg10,
            per_type_limit=config.techqa_per_type_limit,
            seed=config.seed or 0,
            templates=templates,
        )
        out_path = datasets_dir / "techqa.jsonl"
        write_techqa(items, out_path)
        write_manifest(
            "derive techqa", config, datasets_dir,
            inputs=[datasets_dir / "techkg10" / "triples.tsv"],
            outputs=[out_path],
            extra={"items": len(items)},
            filename="techqa_manifest.json",
        )
        return 0

    raise ValueError(f"unknown dataset: {name}")


def run_split(config: PipelineConfig, input_path: str, name: str | None) -> int:
    source = Path(input_path)
    if not source.exists():
        raise MissingArtifactError(source, f"derive {source.stem.replace('.jsonl', '')}")
    with open(source, encoding="utf-8") as fh:
        lines = [line.rstrip("\n") for line in fh if line.strip()]
    train, dev, test = split_dataset(lines, config.split_ratios, config.seed or 0)

    split_name = name or source.stem
    stage_dir = Path(config.output_dir) / SPLITS_DIR / split_name
    stage_dir.mkdir(parents=True, exist_ok=True)
    outputs = []
    for part_name, part in (("train", train), ("dev", dev), ("test", test)):
        path = stage_dir / f"{part_name}.jsonl"
        with open(path, "w", encoding="utf-8") as fh:
            for line in part:
                fh.write(line + "\n")
        outputs.append(path)

    write_manifest(
        "split",
        config,
        stage_dir,
        inputs=[source],
        outputs=outputs,
        extra={
            "ratios": list(config.split_ratios),
            "sizes": {"train": len(train), "dev": len(dev), "test": len(test)},
        },
    )
    logger.info(
        "split %s: %d/%d/%d items", split_name, len(train), len(dev), len(test)
    )
    return 0


def run_export(config: PipelineConfig, dest: str) -> int:
    kg = _load_graph(config)
    dest_dir = Path(dest)
    export_graph(kg, dest_dir)
    write_manifest(
        "export",
        config,
        dest_dir,
        inputs=[
            Path(config.output_dir) / KG_DIR / "triples.tsv",
            Path(config.output_dir) / KG_DIR / "entities.tsv",
        ],
        outputs=[dest_dir / "triples.tsv", dest_dir / "entities.tsv"],
    )
    return 0


# -- argument parsing ---------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--config",
        default=os.environ.get(CONFIG_ENV_VAR),
        help=f"path to the pipeline config (default: ${CONFIG_ENV_VAR})",
    )
    common.add_argument("--workers", type=int, default=None, help="worker override")
    common.add_argument(
        "--strict", action="store_true", default=None, help="abort on malformed records"
    )
    common.add_argument("--seed", type=int, default=None, help="seed override")
    common.add_argument("-v", "--verbose", action="store_true", help="debug logging")

    parser = argparse.ArgumentParser(
        prog="techkg",
        description="Build a technology knowledge graph from bibliographic records "
        "and derive its datasets.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("ingest", parents=[common], help="parse, normalize, classify records")
    sub.add_parser("build-kg", parents=[common], help="extract triples, score keywords")
    sub.add_parser("stats", parents=[common], help="duplicate-name and relation-typing reports")

    p_derive = sub.add_parser("derive", parents=[common], help="derive a released dataset")
    p_derive.add_argument("dataset", choices=DATASET_NAMES)

    p_split = sub.add_parser("split", parents=[common], help="train/dev/test split")
    p_split.add_argument("input", help="line-delimited dataset file to split")
    p_split.add_argument("--name", default=None, help="split directory name")

    p_export = sub.add_parser("export", parents=[common], help="re-export the graph")
    p_export.add_argument("--dest", required=True, help="destination directory")

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
    )

    if not args.config:
        print(
            f"error: no config given (use --config or ${CONFIG_ENV_VAR})", file=sys.stderr
        )
        return 2
    try:
        config = load_config(
            args.config,
            overrides={"workers": args.workers, "strict": args.strict, "seed": args.seed},
        )
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ConfigError as exc:
        for problem in exc.problems:
            print(f"config error: {problem}", file=sys.stderr)
        return 2

    try:
        if args.command == "ingest":
            return run_ingest(config)
        if args.command == "build-kg":
            return run_build_kg(config)
        if args.command == "stats":
            return run_stats(config)
        if args.command == "derive":
            return run_derive(config, args.dataset)
        if args.command == "split":
            return run_split(config, args.input, args.name)
        if args.command == "export":
            return run_export(config, args.dest)
    except ConfigError as exc:
        for problem in exc.problems:
            print(f"config error: {problem}", file=sys.stderr)
        return 2
    except MissingArtifactError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except MalformedRecordError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    raise AssertionError(f"unhandled command {args.command!r}")


if __name__ == "__main__":
    sys.exit(main())
