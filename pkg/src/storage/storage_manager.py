import logging

from src.storage.local_data_storage import LocalDataStorage
from src.storage.storage_format import StorageFormat

logger = logging.getLogger("StorageManager")


def store_data(data: list, storage_format: StorageFormat | str, file_path: str) -> bool:
    """Handles storing command results; returns False (after logging) when nothing could be written."""
    try:
        storage = LocalDataStorage()
        written = storage.save_data(data=data, file_path=file_path, storage_format=storage_format)
        logger.info(f"Successfully stored {len(data)} records in {written}.")
        return True

    except (OSError, ValueError) as e:
        logger.error(f"Error during data storage: {e!s}")
        return False
