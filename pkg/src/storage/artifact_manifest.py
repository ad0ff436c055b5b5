import hashlib
import json
import logging
import os

from src.utils.constants import PACKAGE_VERSION

MANIFEST_FILE_NAME = "manifest.json"
SUMMARY_FILE_NAME = "summary.md"


def file_sha256(file_path: str) -> str:
    digest = hashlib.sha256()
    with open(file_path, "rb") as file:
        for chunk in iter(lambda: file.read(1 << 16), b""):
            digest.update(chunk)
    return digest.hexdigest()


class ArtifactManifest:
    """Writes manifest.json (config, version, seeds, per-file hashes) and summary.md into an artifact directory."""

    def __init__(self, directory: str):
        self.logger = logging.getLogger(self.__class__.__name__)
        self.directory = directory

    def write_manifest(self, config: dict, seeds: dict[str, int], files: list[str], failures: list[str]) -> str:
        """
        Args:
            config (dict): The configuration the artifacts were produced from.
            seeds (dict[str, int]): Every root seed used by the run, by role.
            files (list[str]): Paths of the produced files; they are listed relative to the directory.
            failures (list[str]): Tasks that raised, one line each.

        Returns:
            str: Path of the manifest.
        """
        entries = [
            {"path": os.path.relpath(path, self.directory), "sha256": file_sha256(path)} for path in sorted(files)
        ]
        manifest = {
            "package_version": PACKAGE_VERSION,
            "config": config,
            "seeds": seeds,
            "files": entries,
            "failures": failures,
        }
        path = os.path.join(self.directory, MANIFEST_FILE_NAME)
        with open(path, "w", encoding="utf-8") as file:
            json.dump(manifest, file, indent=4, sort_keys=True)
            file.write("\n")
        self.logger.info(f"Manifest with {len(entries)} file(s) written to {path}")
        return path

    def write_summary(self, title: str, description: str, check_lines: list[str], failures: list[str]) -> str:
        """One PASS/FAIL/INFO line per check, then the failed tasks."""
        lines = [f"# {title}", "", description, "", "## Checks", ""]
        lines.extend(f"- {line}" for line in check_lines or ["(no checks)"])
        if failures:
            lines.extend(["", "## Failed tasks", ""])
            lines.extend(f"- {failure}" for failure in failures)

        path = os.path.join(self.directory, SUMMARY_FILE_NAME)
        with open(path, "w", encoding="utf-8") as file:
            file.write("\n".join(lines) + "\n")
        return path
