import csv
import json
import logging
import math
import os

import numpy as np

from .storage_format import StorageFormat


def _format_cell(value):
    """Floats keep repr precision; non-finite values become the literals inf, -inf and nan."""
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, float):
        return repr(value)
    if value is None:
        return ""
    return value


def _json_safe(value):
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, float) and not math.isfinite(value):
        return repr(value)
    if isinstance(value, dict):
        return {k: _json_safe(v) for k, v in value.items()}
    if isinstance(value, list | tuple):
        return [_json_safe(v) for v in value]
    return value


class LocalDataStorage:
    """
    A class to write result tables locally in either CSV or JSON format.

    Files are overwritten, so rerunning a computation with the same inputs reproduces them byte for byte.
    """

    def __init__(
        self, default_file_path: str = "results.csv", default_storage_format: StorageFormat = StorageFormat.CSV
    ):
        """
        Initialize LocalDataStorage.

        Args:
            default_file_path (str): Default file path to use if none is provided in `save_data`.
            default_storage_format (StorageFormat): Default file format to use if none is provided in `save_data`.
        """
        self.logger = logging.getLogger(self.__class__.__name__)
        self.default_file_path = default_file_path
        self.default_storage_format = default_storage_format

    def save_data(
        self,
        data: dict | list[dict],
        file_path: str | None = None,
        storage_format: StorageFormat | str | None = None,
    ) -> str:
        """
        Save result rows to a local file.

        Args:
            data (dict | list[dict]): One row or a list of rows.
            file_path (str, optional): Target path; the format's extension is appended when missing.
            storage_format (StorageFormat | str, optional): "csv" or "json". Defaults to `self.default_storage_format`.

        Returns:
            str: The path that was written.

        Raises:
            ValueError: If the data is not a dict or a list of dicts, or the format is unknown.
            OSError: If the file cannot be written.
        """
        if isinstance(data, dict):
            data = [data]

        if not isinstance(data, list) or not all(isinstance(item, dict) for item in data):
            raise ValueError("Data must be a dictionary or a list of dictionaries.")

        target_file_path = file_path or self.default_file_path
        format_to_use = StorageFormat.resolve(storage_format or self.default_storage_format)
        if not target_file_path.endswith(format_to_use.suffix):
            target_file_path += format_to_use.suffix

        self._ensure_directory_exists(target_file_path)

        if format_to_use == StorageFormat.CSV:
            self._save_as_csv(data, target_file_path)
        else:
            self._save_as_json(data, target_file_path)
        return target_file_path

    def _save_as_csv(self, data: list[dict], file_path: str):
        """Save rows in CSV format; the header is the union of the row keys in order of first appearance."""
        fieldnames = list(dict.fromkeys(key for row in data for key in row))
        try:
            with open(file_path, mode="w", newline="", encoding="utf-8") as file:
                writer = csv.DictWriter(file, fieldnames=fieldnames, restval="", lineterminator="\n")
                writer.writeheader()
                writer.writerows({key: _format_cell(value) for key, value in row.items()} for row in data)

            self.logger.info(f"Successfully saved {len(data)} record(s) to {file_path}")

        except OSError as e:
            self.logger.error(f"Error saving data to {file_path}: {e!s}", exc_info=True)
            raise

    def _save_as_json(self, data: list[dict], file_path: str):
        """Save rows in JSON format."""
        try:
            with open(file_path, "w", encoding="utf-8") as file:
                json.dump(_json_safe(data), file, indent=4)
                file.write("\n")

            self.logger.info(f"Successfully saved {len(data)} record(s) to {file_path}")

        except OSError as e:
            self.logger.error(f"Error saving data to {file_path}: {e!s}", exc_info=True)
            raise

    def _ensure_directory_exists(self, file_path: str):
        """Ensures the directory for the given file path exists. If it doesn't exist, creates it."""
        directory = os.path.dirname(file_path)
        if directory and not os.path.exists(directory):
            os.makedirs(directory)
