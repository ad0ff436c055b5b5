import json
import os

import pytest

from src.core.experiment_config import ExperimentConfig
from src.core.experiment_runner import run_experiment
from src.storage.artifact_manifest import file_sha256


@pytest.fixture
def conditioning_config(tmp_path):
    return ExperimentConfig(experiment="conditioning", seed=4, output_dir=str(tmp_path / "out"))


def test_artifact_directory(conditioning_config, tmp_path):
    outcome = run_experiment(conditioning_config)

    assert outcome.directory == os.path.join(str(tmp_path / "out"), "conditioning")
    assert outcome.passed
    assert sorted(os.listdir(outcome.directory)) == ["conditioning.csv", "manifest.json", "summary.md"]


def test_manifest_lists_hashes(conditioning_config):
    outcome = run_experiment(conditioning_config)
    with open(os.path.join(outcome.directory, "manifest.json"), encoding="utf-8") as file:
        manifest = json.load(file)

    assert manifest["seeds"] == {"root": 4}
    assert manifest["config"]["experiment"] == "conditioning"
    assert manifest["failures"] == []
    assert manifest["files"] == [
        {"path": "conditioning.csv", "sha256": file_sha256(os.path.join(outcome.directory, "conditioning.csv"))}
    ]


def test_summary_lines(conditioning_config):
    outcome = run_experiment(conditioning_config)
    with open(os.path.join(outcome.directory, "summary.md"), encoding="utf-8") as file:
        summary = file.read()

    assert summary.startswith("# Experiment conditioning\n")
    assert "- PASS closed_form_equals_tau:" in summary
    assert "- PASS partial_sum_converges:" in summary


def test_rerun_is_byte_identical(conditioning_config):
    first = run_experiment(conditioning_config)
    with open(first.files[0], "rb") as file:
        before = file.read()
    second = run_experiment(conditioning_config.with_overrides(threads=3))
    with open(second.files[0], "rb") as file:
        assert file.read() == before


def test_bottleneck_tables_do_not_depend_on_threads(tmp_path):
    cfg = ExperimentConfig(
        experiment="bottleneck-trend",
        seed=6,
        lambdas=(6.0,),
        n_list=(4, 5),
        n_samples=3,
        output_dir=str(tmp_path / "single"),
    )
    single = run_experiment(cfg)
    pooled = run_experiment(cfg.with_overrides(threads=4, output_dir=str(tmp_path / "pooled")))

    def digests(outcome):
        return {os.path.basename(path): file_sha256(path) for path in outcome.files}

    assert digests(single) == digests(pooled)


def test_invalid_configuration(tmp_path):
    cfg = ExperimentConfig(experiment="phase-diagram", output_dir=str(tmp_path))
    with pytest.raises(ValueError) as excinfo:
        run_experiment(cfg)
    assert "requires 'lambdas'" in str(excinfo.value)
    assert "Missing 'seed'" in str(excinfo.value)
    assert not os.listdir(tmp_path)
