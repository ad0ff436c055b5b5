import argparse
import logging
import os

from src.utils.command_enum import CommandEnum, DynamicsAction, MomentsAction
from src.utils.constants import MAX_BLOCK_SIZE, MAX_CYCLE_LENGTH, MIN_N_STARTS
from src.utils.utils import parse_grid, parse_int_list


class CLIArgumentValidator:
    def __init__(self):
        self.logger = logging.getLogger(self.__class__.__name__)

    def validate_args(self, args: argparse.Namespace):
        """Validates parsed CLI arguments, raising one ValueError that lists every problem."""
        self._validate_command(command=args.command)

        errors = []

        if hasattr(args, "d"):
            errors.extend(self._validate_degree(command=args.command, d=args.d))

        if hasattr(args, "n"):
            errors.extend(self._validate_positive("--n", args.n))

        if hasattr(args, "count"):
            errors.extend(self._validate_positive("--count", args.count))

        if hasattr(args, "i_max"):
            errors.extend(self._validate_i_max(command=args.command, i_max=args.i_max))

        if hasattr(args, "lambda_grid"):
            errors.extend(self._validate_lambda_grid(lambda_grid=args.lambda_grid))

        if hasattr(args, "lam"):
            errors.extend(self._validate_activity(lam=args.lam))

        if hasattr(args, "alpha"):
            errors.extend(self._validate_densities(alpha=args.alpha, beta=args.beta))

        if hasattr(args, "n_starts") and args.n_starts < MIN_N_STARTS:
            errors.append(f"'--n-starts' must be at least {MIN_N_STARTS}, got {args.n_starts}.")

        if hasattr(args, "n_list"):
            errors.extend(self._validate_n_list(action=args.action, n_list=args.n_list))

        if hasattr(args, "graph"):
            errors.extend(self._validate_input_file("--graph", args.graph))

        if hasattr(args, "config"):
            errors.extend(self._validate_input_file("--config", args.config))

        if hasattr(args, "t") and args.t < 0:
            errors.append(f"'--t' must be >= 0, got {args.t}.")

        if hasattr(args, "steps"):
            errors.extend(self._validate_dynamics(args=args))

        errors.extend(self._validate_common(seed=args.seed, threads=args.threads))

        if errors:
            raise ValueError("\n".join(errors))

    def _validate_command(self, command: str | None):
        """Validates the command argument."""
        if command not in CommandEnum.__members__.values():
            raise ValueError(
                f"Invalid command '{command}'. Supported commands are: {', '.join(e.value for e in CommandEnum)}."
            )

    def _validate_positive(self, flag: str, value: int) -> list[str]:
        return [] if value >= 1 else [f"'{flag}' must be a positive integer, got {value}."]

    def _validate_degree(self, command: str, d: int) -> list[str]:
        """gen accepts any d >= 1; everything built on the tree recursion needs d >= 3."""
        minimum = 1 if command == CommandEnum.GEN.value else 3
        if d < minimum:
            return [f"'--d' must be at least {minimum} for '{command}', got {d}."]
        return []

    def _validate_i_max(self, command: str, i_max: int | None) -> list[str]:
        if i_max is None:
            return []
        if i_max < 2 or i_max % 2:
            return [f"'--i-max' must be an even integer >= 2, got {i_max}."]
        if command == CommandEnum.GEN.value and i_max > MAX_CYCLE_LENGTH:
            return [f"'--i-max' is capped at {MAX_CYCLE_LENGTH} for cycle counting, got {i_max}."]
        return []

    def _validate_lambda_grid(self, lambda_grid: str) -> list[str]:
        try:
            values = parse_grid(lambda_grid)
        except ValueError as e:
            return [str(e)]
        if any(lam <= 0 for lam in values):
            return [f"All activities in '--lambda-grid' must be positive, got '{lambda_grid}'."]
        return []

    def _validate_activity(self, lam: float | None) -> list[str]:
        if lam is not None and not lam > 0:
            return [f"'--lambda' must be positive, got {lam}."]
        return []

    def _validate_densities(self, alpha: float | None, beta: float | None) -> list[str]:
        errors = []
        for flag, value in (("--alpha", alpha), ("--beta", beta)):
            if value is not None and not 0 < value < 1:
                errors.append(f"'{flag}' must lie in (0, 1), got {value}.")
        if alpha is not None and beta is not None and alpha + beta >= 1:
            errors.append(f"Densities must satisfy alpha + beta < 1, got {alpha} + {beta}.")
        return errors

    def _validate_n_list(self, action: str, n_list: str | None) -> list[str]:
        if action != MomentsAction.RATIO.value:
            return []
        if n_list is None:
            return ["'moments ratio' requires '--n-list'."]
        try:
            sizes = parse_int_list(n_list)
        except ValueError as e:
            return [str(e)]
        if any(n < 1 for n in sizes):
            return [f"All sizes in '--n-list' must be positive, got '{n_list}'."]
        return []

    def _validate_input_file(self, flag: str, file_path: str) -> list[str]:
        if not os.path.isfile(file_path):
            return [f"File given to '{flag}' does not exist: {file_path}"]
        return []

    def _validate_dynamics(self, args: argparse.Namespace) -> list[str]:
        errors = []
        if args.steps < 0:
            errors.append(f"'--steps' must be >= 0, got {args.steps}.")
        if args.sample_every < 1:
            errors.append(f"'--sample-every' must be >= 1, got {args.sample_every}.")
        if not 0 <= args.block_size <= MAX_BLOCK_SIZE:
            errors.append(f"'--block-size' must lie in [0, {MAX_BLOCK_SIZE}], got {args.block_size}.")
        if args.action == DynamicsAction.CROSSING.value and args.runs < 1:
            errors.append(f"'--runs' must be positive, got {args.runs}.")
        return errors

    def _validate_common(self, seed: int | None, threads: int | None) -> list[str]:
        errors = []
        if seed is not None and seed < 0:
            errors.append(f"'--seed' must be non-negative, got {seed}.")
        if threads is not None and threads < 1:
            errors.append(f"'--threads' must be positive, got {threads}.")
        return errors
