import logging
import os

from src.utils.setup_logging import setup_logger


def test_console_only():
    assert setup_logger(log_level=logging.WARNING) is None
    root = logging.getLogger()
    assert root.level == logging.WARNING
    assert len(root.handlers) == 1


def test_file_handler(tmp_path):
    path = setup_logger(log_level=logging.INFO, save_to_file=True, log_dir=str(tmp_path), log_file="run.log")
    logging.getLogger("Test").info("hello")
    for handler in logging.getLogger().handlers:
        handler.flush()
    assert path == os.path.join(tmp_path, "run.log")
    assert os.path.isfile(path)
    with open(path, encoding="utf-8") as file:
        assert "Test - INFO - hello" in file.read()
    setup_logger(log_level=logging.WARNING)
