import os

from src.storage.storage_manager import store_data


def test_store_success(tmp_path):
    assert store_data([{"a": 1}], storage_format="csv", file_path=str(tmp_path / "rows"))
    assert os.path.isfile(tmp_path / "rows.csv")


def test_store_reports_bad_rows(tmp_path):
    assert not store_data(["not a row"], storage_format="csv", file_path=str(tmp_path / "rows"))
    assert not os.listdir(tmp_path)


def test_store_reports_unwritable_path(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("", encoding="utf-8")
    assert not store_data([{"a": 1}], storage_format="json", file_path=str(blocker / "rows"))
