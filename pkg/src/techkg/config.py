"""Pipeline configuration: a JSON file validated into a dataclass.

The seed is mandatory so that every "randomly select" step is reproducible;
there is deliberately no wall-clock fallback.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

from .relations import ExtractionConfig


class ConfigError(ValueError):
    """Invalid configuration; ``problems`` lists field-level messages."""

    def __init__(self, problems: list[str]):
        self.problems = problems
        super().__init__("; ".join(problems))


DEFAULT_FRACTIONS = (1.0, 0.9, 0.8, 0.7, 0.6, 0.5, 0.4, 0.3, 0.2, 0.1)


@dataclass
class PipelineConfig:
    inputs: list[str] = field(default_factory=list)
    journal_map: str = ""
    output_dir: str = ""
    seed: int | None = None
    input_format: str = "jsonl"
    workers: int = 1
    strict: bool = False

    hierarchical_threshold: int = 3
    translation_threshold: int = 2
    re_cooccurrence_threshold: int = 10
    research_interest_scope: str = "first_author"
    composite_join: str = "+"

    top_fraction: float = 0.1
    min_mentions: int = 10
    tfidf_fractions: list[float] = field(default_factory=lambda: list(DEFAULT_FRACTIONS))
    excluded_domains: list[str] = field(
        default_factory=lambda: ["nature science", "social science"]
    )
    in_domain_stat_domains: list[str] | None = None

    techterm_per_domain: int = 10_000
    techbiterm_per_domain: int = 10_000
    techabs_per_domain: int = 100_000
    techre_max_bags_per_domain: int = 200_000
    techre_max_sentences_per_bag: int = 6
    techre_na_proportion: float | None = None
    techner_per_domain: int = 30_000
    techqa_per_type_limit: int = 1_000
    qa_templates: str | None = None
    split_ratios: list[float] = field(default_factory=lambda: [8.0, 1.0, 1.0])

    hard_sentence_terminators: str = "。！？"
    soft_sentence_terminators: str = ".!?"

    def extraction_config(self) -> ExtractionConfig:
        return ExtractionConfig(
            hierarchical_threshold=self.hierarchical_threshold,
            translation_threshold=self.translation_threshold,
            research_interest_scope=self.research_interest_scope,
            composite_join=self.composite_join,
        )

    def canonical_json(self) -> str:
        return json.dumps(
            dataclasses.asdict(self), ensure_ascii=False, sort_keys=True, separators=(",", ":")
        )

    def digest(self) -> str:
        return hashlib.sha256(self.canonical_json().encode("utf-8")).hexdigest()


_FIELD_TYPES = {f.name: f for f in dataclasses.fields(PipelineConfig)}


def validate_config(config: PipelineConfig) -> None:
    """Raise :class:`ConfigError` listing every invalid field."""
    problems: list[str] = []

    def check(condition: bool, message: str) -> None:
        if not condition:
            problems.append(message)

    check(config.seed is not None, "seed: required (runs must be reproducible)")
    if config.seed is not None:
        check(isinstance(config.seed, int) and not isinstance(config.seed, bool), "seed: must be an integer")

    check(config.input_format in ("jsonl", "csv"), "input_format: must be 'jsonl' or 'csv'")
    check(isinstance(config.workers, int) and config.workers >= 1, "workers: must be >= 1")

    for name in ("hierarchical_threshold", "translation_threshold", "re_cooccurrence_threshold"):
        value = getattr(config, name)
        check(isinstance(value, int) and value >= 1, f"{name}: must be an integer >= 1")

    check(
        config.research_interest_scope in ("first_author", "all_authors"),
        "research_interest_scope: must be 'first_author' or 'all_authors'",
    )
    check(bool(config.composite_join), "composite_join: must be non-empty")

    def check_fraction(name: str, value: float) -> None:
        check(
            isinstance(value, (int, float)) and 0 < value <= 1,
            f"{name}: must be in (0, 1], got {value!r}",
        )

    check_fraction("top_fraction", config.top_fraction)
    for i, fraction in enumerate(config.tfidf_fractions):
        check_fraction(f"tfidf_fractions[{i}]", fraction)
    check(len(config.tfidf_fractions) > 0, "tfidf_fractions: must not be empty")

    check(isinstance(config.min_mentions, int) and config.min_mentions >= 0, "min_mentions: must be >= 0")

    for name in (
        "techterm_per_domain",
        "techbiterm_per_domain",
        "techabs_per_domain",
        "techre_max_bags_per_domain",
        "techre_max_sentences_per_bag",
        "techner_per_domain",
        "techqa_per_type_limit",
    ):
        value = getattr(config, name)
        check(isinstance(value, int) and value >= 1, f"{name}: must be an integer >= 1")

    if config.techre_na_proportion is not None:
        check(
            0 < config.techre_na_proportion < 1,
            "techre_na_proportion: must be in (0, 1) when set",
        )

    check(
        len(config.split_ratios) == 3 and all(r > 0 for r in config.split_ratios),
        "split_ratios: must be 3 positive numbers",
    )

    if problems:
        raise ConfigError(problems)


def load_config(path: str | Path, overrides: dict | None = None) -> PipelineConfig:
    """Load, apply CLI overrides, and validate."""
    with open(path, encoding="utf-8") as fh:
        try:
            raw = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError([f"{path}: not valid JSON ({exc})"]) from exc
    if not isinstance(raw, dict):
        raise ConfigError([f"{path}: top level must be a JSON object"])

    unknown = set(raw) - set(_FIELD_TYPES)
    if unknown:
        raise ConfigError([f"unknown config key: {k}" for k in sorted(unknown)])

    config = PipelineConfig(**raw)
    if overrides:
        for key, value in overrides.items():
            if value is not None:
                setattr(config, key, value)
    validate_config(config)
    return config
