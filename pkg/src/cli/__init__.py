from src.cli.cli_argument_handler import CLIArgumentHandler

__all__ = ["CLIArgumentHandler"]
