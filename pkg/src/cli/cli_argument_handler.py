import logging
import sys

from src.cli.cli_argument_parser import CLIArgumentParser
from src.cli.cli_argument_validator import CLIArgumentValidator
from src.utils.command_enum import CommandEnum
from src.utils.constants import DEFAULT_SEED
from src.utils.exit_code_enum import ExitCode
from src.utils.utils import parse_grid, parse_int_list


class CLIArgumentHandler:
    def __init__(self):
        self.logger = logging.getLogger(self.__class__.__name__)
        self.parser = CLIArgumentParser().get_parser()
        self.validator = CLIArgumentValidator()

    def parse_and_validate_args(self, argv: list[str] | None = None) -> dict:
        """Parses and validates command-line arguments, returning a structured dictionary."""
        args = self.parser.parse_args(argv)

        if not args.command:
            self.logger.error("No CLI args Command provided")
            self.parser.print_help()
            sys.exit(ExitCode.USAGE_ERROR)

        try:
            self.validator.validate_args(args)
        except ValueError as e:
            self.logger.error(f"CLI args validation failed: {e}")
            self.parser.print_help()
            sys.exit(ExitCode.USAGE_ERROR)

        parsed = vars(args).copy()
        if getattr(args, "lambda_grid", None) is not None:
            parsed["lambdas"] = parse_grid(args.lambda_grid)
        if getattr(args, "n_list", None) is not None:
            parsed["n_list"] = parse_int_list(args.n_list)

        # experiment keeps None so that only explicit flags override the configuration file
        if args.command != CommandEnum.EXPERIMENT.value:
            parsed["seed"] = DEFAULT_SEED if args.seed is None else args.seed
            parsed["threads"] = 1 if args.threads is None else args.threads

        parsed.setdefault("action", None)
        return parsed
