import json
import shutil
from pathlib import Path

import pytest

from techkg.cli import main
from techkg.config import ConfigError, PipelineConfig, load_config, validate_config
from techkg.graph import import_graph

FIXTURE_FILES = ("fixture_corpus.jsonl", "journal_map.tsv", "fixture_config.json")

FULL_RUN = [
    ["ingest"],
    ["build-kg"],
    ["stats"],
    ["derive", "techkg10"],
    ["derive", "techterm"],
    ["derive", "techbiterm"],
    ["derive", "techabs"],
    ["derive", "techre"],
    ["derive", "techner"],
    ["derive", "techqa"],
    ["split", "out/datasets/techre.jsonl"],
]


@pytest.fixture
def workdir(tmp_path, monkeypatch, data_dir):
    for name in FIXTURE_FILES:
        shutil.copy(data_dir / name, tmp_path / name)
    monkeypatch.chdir(tmp_path)
    return tmp_path


def run(*argv) -> int:
    return main([*argv, "--config", "fixture_config.json"])


def run_everything():
    for argv in FULL_RUN:
        assert run(*argv) == 0


def tree_digest(root: Path) -> dict:
    import hashlib

    out = {}
    for path in sorted(root.rglob("*")):
        if path.is_file():
            out[str(path.relative_to(root))] = hashlib.sha256(path.read_bytes()).hexdigest()
    return out


# -- config validation ---------------------------------------------------------


def test_missing_seed_is_field_level_error(tmp_path):
    path = tmp_path / "c.json"
    path.write_text('{"output_dir": "out"}', encoding="utf-8")
    with pytest.raises(ConfigError) as excinfo:
        load_config(path)
    assert any(p.startswith("seed:") for p in excinfo.value.problems)


def test_invalid_threshold_and_fraction_reported_together():
    config = PipelineConfig(seed=1, hierarchical_threshold=0, top_fraction=1.5)
    with pytest.raises(ConfigError) as excinfo:
        validate_config(config)
    problems = excinfo.value.problems
    assert any(p.startswith("hierarchical_threshold:") for p in problems)
    assert any(p.startswith("top_fraction:") for p in problems)


def test_unknown_config_key_rejected(tmp_path):
    path = tmp_path / "c.json"
    path.write_text('{"seed": 1, "typo_key": 2}', encoding="utf-8")
    with pytest.raises(ConfigError, match="typo_key"):
        load_config(path)


def test_cli_reports_config_errors_with_exit_2(workdir, capsys):
    config = json.loads(Path("fixture_config.json").read_text(encoding="utf-8"))
    del config["seed"]
    Path("bad.json").write_text(json.dumps(config), encoding="utf-8")
    code = main(["ingest", "--config", "bad.json"])
    assert code == 2
    assert "seed" in capsys.readouterr().err


def test_cli_without_config_fails(monkeypatch, capsys, tmp_path):
    monkeypatch.chdir(tmp_path)
    monkeypatch.delenv("TECHKG_CONFIG", raising=False)
    assert main(["ingest"]) == 2
    assert "config" in capsys.readouterr().err


def test_config_path_from_environment(workdir, monkeypatch):
    monkeypatch.setenv("TECHKG_CONFIG", "fixture_config.json")
    assert main(["ingest"]) == 0


# -- stage dependencies -----------------------------------------------------------


def test_stats_before_build_kg_names_missing_command(workdir, capsys):
    assert run("ingest") == 0
    code = run("stats")
    assert code == 1
    assert "build-kg" in capsys.readouterr().err


def test_build_kg_before_ingest_names_ingest(workdir, capsys):
    code = run("build-kg")
    assert code == 1
    assert "`techkg ingest`" in capsys.readouterr().err


def test_techre_requires_techkg10(workdir, capsys):
    assert run("ingest") == 0
    assert run("build-kg") == 0
    code = run("derive", "techre")
    assert code == 1
    assert "derive techkg10" in capsys.readouterr().err


def test_techner_requires_techterm(workdir, capsys):
    assert run("ingest") == 0
    assert run("build-kg") == 0
    code = run("derive", "techner")
    assert code == 1
    assert "derive techterm" in capsys.readouterr().err


# -- manifests and determinism ------------------------------------------------------


def test_ingest_counts_in_manifest(workdir):
    assert run("ingest") == 0
    manifest = json.loads(Path("out/ingest/manifest.json").read_text(encoding="utf-8"))
    assert manifest["records"] == 50
    assert manifest["malformed"] == 1
    assert manifest["rejected"] == 1
    assert manifest["unmapped"] == 2
    assert manifest["seed"] == 20180923
    assert "fixture_corpus.jsonl" in manifest["inputs"]
    assert "ingest/records.jsonl" in manifest["outputs"]


def test_identical_build_runs_are_byte_identical(workdir):
    assert run("ingest") == 0
    assert run("build-kg") == 0
    first = tree_digest(Path("out/kg"))
    shutil.rmtree("out/kg")
    assert run("build-kg") == 0
    assert tree_digest(Path("out/kg")) == first


def test_full_pipeline_reruns_byte_identical(workdir):
    run_everything()
    first = tree_digest(Path("out"))
    shutil.rmtree("out")
    run_everything()
    assert tree_digest(Path("out")) == first


def test_split_sizes_and_manifest(workdir):
    run_everything()
    manifest = json.loads(
        Path("out/splits/techre/manifest.json").read_text(encoding="utf-8")
    )
    sizes = manifest["sizes"]
    n = sum(sizes.values())
    lines = sum(
        len(Path(f"out/splits/techre/{part}.jsonl").read_text(encoding="utf-8").splitlines())
        for part in ("train", "dev", "test")
    )
    assert lines == n
    assert manifest["ratios"] == [8.0, 1.0, 1.0]
    for part, share in (("train", 0.8), ("dev", 0.1), ("test", 0.1)):
        assert abs(sizes[part] - share * n) < 1 or sizes[part] == round(share * n)


def test_cli_export_round_trips(workdir):
    assert run("ingest") == 0
    assert run("build-kg") == 0
    assert run("export", "--dest", "out/reexport") == 0
    assert import_graph(Path("out/reexport")) == import_graph(Path("out/kg"))
    assert (
        Path("out/reexport/triples.tsv").read_bytes()
        == Path("out/kg/triples.tsv").read_bytes()
    )


def test_strict_mode_aborts_on_malformed_line(workdir, capsys):
    code = main(["ingest", "--config", "fixture_config.json", "--strict"])
    assert code == 1
    assert "line 26" in capsys.readouterr().err


def test_seed_override_changes_sampled_output(workdir):
    run_everything()
    first = Path("out/datasets/techabs.jsonl").read_text(encoding="utf-8")
    assert main(["derive", "techabs", "--config", "fixture_config.json", "--seed", "42"]) == 0
    second = Path("out/datasets/techabs.jsonl").read_text(encoding="utf-8")
    assert first != second  # 20 of 18+? sampled differently under the new seed
    assert len(first.splitlines()) == len(second.splitlines())


def test_golden_output_tree(workdir, data_dir):
    golden_root = data_dir / "golden"
    if not golden_root.exists():
        pytest.skip("golden tree not generated")
    run_everything()
    got = tree_digest(Path("out"))
    expected = tree_digest(golden_root)
    assert got == expected
