import logging
import sys

from src.cli.cli_argument_handler import CLIArgumentHandler
from src.core.command_dispatcher import CommandDispatcher
from src.storage.storage_manager import store_data
from src.utils.exit_code_enum import ExitCode
from src.utils.setup_logging import setup_logger


def main(argv: list[str] | None = None) -> int:
    """Main entry point for CLI usage; returns the process exit code."""
    args = CLIArgumentHandler().parse_and_validate_args(argv)
    setup_logger(log_level=getattr(logging, args["log_level"]), save_to_file=args["save_logs"])
    logger = logging.getLogger("Main")
    logger.info(f"Parsed arguments: {args}")

    try:
        result = CommandDispatcher().dispatch(args)

        if result.rows:
            file_path = args["out"] or result.default_file
            if not store_data(data=result.rows, storage_format=args["format"], file_path=file_path):
                return ExitCode.CHECK_FAILURE
        elif result.artifact_dir:
            logger.info(f"Artifacts written to {result.artifact_dir}")
        else:
            logger.warning("Command produced no rows.")

        if not result.passed:
            logger.error("One or more checks failed.")
            return ExitCode.CHECK_FAILURE
        return ExitCode.OK

    except ValueError as e:
        logger.error(f"Argument validation failed: {e!s}")
        return ExitCode.USAGE_ERROR

    except Exception as e:
        logger.error(f"Unexpected error: {e!s}", exc_info=True)
        return ExitCode.CHECK_FAILURE


if __name__ == "__main__":
    sys.exit(main())
