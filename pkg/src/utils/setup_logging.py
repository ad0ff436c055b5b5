import logging
from logging.handlers import RotatingFileHandler
import os

DEFAULT_LOG_DIR = "logs"
DEFAULT_LOG_FILE_NAME = "hardcore.log"
LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"


def _rotating_file_handler(
    log_dir: str, log_file: str, max_file_size: int, backup_count: int
) -> tuple[RotatingFileHandler, str]:
    os.makedirs(log_dir, exist_ok=True)
    path = os.path.join(log_dir, log_file)
    return RotatingFileHandler(path, maxBytes=max_file_size, backupCount=backup_count, encoding="utf-8"), path


def setup_logger(
    log_level: int = logging.INFO,
    save_to_file: bool = False,
    log_file: str = DEFAULT_LOG_FILE_NAME,
    log_dir: str = DEFAULT_LOG_DIR,
    max_file_size: int = 5 * 1024 * 1024,  # 5 MB
    backup_count: int = 5,
) -> str | None:
    """
    Route every logger of the run to the console and, with `save_to_file`, to a rotating file.

    Multistart searches, Monte Carlo batches and experiment runs report progress at INFO, so a file is the
    usual choice for anything that runs for minutes. Calling it again replaces the previous handlers.

    Args:
        log_level (int): The logging level (e.g., logging.INFO, logging.DEBUG).
        save_to_file (bool): Also write to `log_dir/log_file`.
        log_file (str): The name of the log file.
        log_dir (str): Directory of the log file, created when missing.
        max_file_size (int): Size in bytes at which the file is rotated.
        backup_count (int): Number of rotated files kept.

    Returns:
        str | None: Path of the log file, None for console-only logging.
    """
    formatter = logging.Formatter(LOG_FORMAT)
    handlers: list[logging.Handler] = [logging.StreamHandler()]

    log_file_path = None
    if save_to_file:
        file_handler, log_file_path = _rotating_file_handler(log_dir, log_file, max_file_size, backup_count)
        handlers.append(file_handler)

    for handler in handlers:
        handler.setFormatter(formatter)
    logging.basicConfig(level=log_level, handlers=handlers, force=True)

    level_name = logging.getLevelName(log_level)
    if log_file_path:
        logging.info(f"Logging at {level_name} to the console and {log_file_path}")
    else:
        logging.info(f"Logging at {level_name} to the console only")
    return log_file_path
