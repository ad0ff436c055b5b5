import hashlib
import json

from src.storage.artifact_manifest import ArtifactManifest, file_sha256
from src.utils.constants import PACKAGE_VERSION


def test_file_sha256(tmp_path):
    path = tmp_path / "data.csv"
    path.write_bytes(b"n,ratio\n3,1.5\n")
    assert file_sha256(str(path)) == hashlib.sha256(b"n,ratio\n3,1.5\n").hexdigest()


def test_manifest(tmp_path):
    first = tmp_path / "b.csv"
    second = tmp_path / "a.csv"
    first.write_text("x\n1\n", encoding="utf-8")
    second.write_text("y\n2\n", encoding="utf-8")

    path = ArtifactManifest(str(tmp_path)).write_manifest(
        config={"experiment": "conditioning", "seed": 3},
        seeds={"root": 3},
        files=[str(first), str(second)],
        failures=["task: broke"],
    )
    with open(path, encoding="utf-8") as file:
        manifest = json.load(file)

    assert manifest["package_version"] == PACKAGE_VERSION
    assert manifest["seeds"] == {"root": 3}
    assert [entry["path"] for entry in manifest["files"]] == ["a.csv", "b.csv"]
    assert manifest["files"][1]["sha256"] == file_sha256(str(first))
    assert manifest["failures"] == ["task: broke"]


def test_summary(tmp_path):
    path = ArtifactManifest(str(tmp_path)).write_summary(
        title="Experiment conditioning",
        description="Cycle means.",
        check_lines=["PASS a: ok", "INFO b: note"],
        failures=["task: broke"],
    )
    with open(path, encoding="utf-8") as file:
        lines = file.read().splitlines()

    assert lines[0] == "# Experiment conditioning"
    assert "- PASS a: ok" in lines
    assert "- INFO b: note" in lines
    assert lines[-3:] == ["## Failed tasks", "", "- task: broke"]


def test_summary_without_checks(tmp_path):
    path = ArtifactManifest(str(tmp_path)).write_summary("T", "D", [], [])
    with open(path, encoding="utf-8") as file:
        assert "- (no checks)" in file.read()
