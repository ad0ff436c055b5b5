from dataclasses import dataclass
import logging
import os

from src.core.experiment_config import ExperimentConfig, validate_config
from src.core.experiment_registry import ExperimentRegistry, ExperimentResult
from src.storage.artifact_manifest import ArtifactManifest
from src.storage.local_data_storage import LocalDataStorage
from src.storage.storage_format import StorageFormat

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ExperimentOutcome:
    directory: str
    result: ExperimentResult
    files: list[str]

    @property
    def passed(self) -> bool:
        return self.result.all_passed


def run_experiment(cfg: ExperimentConfig) -> ExperimentOutcome:
    """
    Run a configured experiment and write its artifact directory `<output_dir>/<experiment>/`.

    The directory receives one CSV per result table, manifest.json and summary.md. CSV content depends only on the
    configuration, so a rerun reproduces it byte for byte whatever the thread count.

    Raises:
        ValueError: If the configuration is not runnable; every violation is listed.
    """
    errors = validate_config(cfg)
    if errors:
        raise ValueError("\n".join(errors))

    directory = os.path.join(cfg.output_dir, cfg.experiment)
    os.makedirs(directory, exist_ok=True)
    logger.info(f"Running experiment '{cfg.experiment}' into {directory}")

    result = ExperimentRegistry.run(cfg)

    storage = LocalDataStorage()
    files = [
        storage.save_data(rows, file_path=os.path.join(directory, table), storage_format=StorageFormat.CSV)
        for table, rows in result.tables.items()
        if rows
    ]

    manifest = ArtifactManifest(directory)
    manifest.write_manifest(config=cfg.as_dict(), seeds={"root": cfg.seed}, files=files, failures=result.failures)
    summary = manifest.write_summary(
        title=f"Experiment {cfg.experiment}",
        description=ExperimentRegistry.get_description(cfg.experiment),
        check_lines=[check.as_line() for check in result.checks],
        failures=result.failures,
    )

    outcome = ExperimentOutcome(directory=directory, result=result, files=files)
    status = "all checks passed" if outcome.passed else "some checks FAILED"
    logger.info(f"Experiment '{cfg.experiment}' finished: {status}; summary in {summary}")
    return outcome
