import pytest

from src.storage.storage_format import StorageFormat


@pytest.mark.parametrize(
    ("value", "expected"),
    [(StorageFormat.JSON, StorageFormat.JSON), ("csv", StorageFormat.CSV), ("JSON", StorageFormat.JSON)],
)
def test_resolve(value, expected):
    assert StorageFormat.resolve(value) is expected


def test_resolve_rejects_unknown_format():
    with pytest.raises(ValueError, match="Supported formats are: csv, json"):
        StorageFormat.resolve("parquet")


def test_suffix():
    assert StorageFormat.CSV.suffix == ".csv"
    assert StorageFormat.JSON == "json"
