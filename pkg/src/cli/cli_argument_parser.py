import argparse

from src.cli.cli_help_message_generator import CLIHelpMessageGenerator
from src.storage.storage_format import StorageFormat
from src.utils.chain_init_enum import ChainInit
from src.utils.command_enum import CommandEnum, DynamicsAction, EnumerateAction, ExponentsAction, MomentsAction
from src.utils.constants import (
    CONDITIONING_I_MAX,
    DEFAULT_N_STARTS,
    DEFAULT_SAMPLE_EVERY,
    MAX_CYCLE_LENGTH,
    PHI1_GRID_POINTS,
)

LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR")


class CLIArgumentParser:
    """Handles parsing of command-line arguments."""

    def __init__(self):
        """Initialize the argument parser."""
        self.parser = argparse.ArgumentParser(
            prog="hardcore",
            description="Hard-core model on random regular bipartite graphs: thresholds, moments, bottlenecks.",
            epilog=CLIHelpMessageGenerator().generate(),
            formatter_class=argparse.RawTextHelpFormatter,
        )
        self._initialize_subparsers()

    def parse_args(self, args=None):
        """Parse command line arguments."""
        return self.parser.parse_args(args)

    def _initialize_subparsers(self):
        """Add subparsers for different commands."""
        subparsers = self.parser.add_subparsers(
            title="Commands",
            dest="command",
            help="Specify which computation to run.",
        )

        self._add_gen_parser(subparsers)
        self._add_tree_parser(subparsers)
        self._add_exponents_parser(subparsers)
        self._add_moments_parser(subparsers)
        self._add_enumerate_parser(subparsers)
        self._add_dynamics_parser(subparsers)
        self._add_experiment_parser(subparsers)

    def _add_gen_parser(self, subparsers):
        parser = subparsers.add_parser(CommandEnum.GEN.value, help="Sample graphs from RG(n, d) and count cycles.")
        self._add_common_arguments(parser)
        parser.add_argument("--n", type=int, required=True, help="Vertices per side.")
        parser.add_argument("--d", type=int, required=True, help="Degree (number of perfect matchings).")
        parser.add_argument("--count", type=int, default=1, help="Number of graphs to sample (default: 1).")
        parser.add_argument("--graph-dir", type=str, default="graphs", help="Directory for the graph files.")
        parser.add_argument(
            "--i-max",
            type=int,
            default=None,
            help=f"Also count cycles of every even length up to this bound (at most {MAX_CYCLE_LENGTH}).",
        )

    def _add_tree_parser(self, subparsers):
        parser = subparsers.add_parser(CommandEnum.TREE.value, help="Fixed points of the tree recursion.")
        self._add_common_arguments(parser)
        parser.add_argument("--d", type=int, required=True, help="Tree degree, at least 3.")
        parser.add_argument(
            "--lambda-grid", type=str, required=True, help="Activities as start:stop:step or a comma-separated list."
        )

    def _add_exponents_parser(self, subparsers):
        parser = subparsers.add_parser(CommandEnum.EXPONENTS.value, help="First and second-moment exponents.")
        parser.add_argument("action", choices=[a.value for a in ExponentsAction], help="What to compute.")
        self._add_common_arguments(parser)
        parser.add_argument("--d", type=int, required=True, help="Degree, at least 3.")
        parser.add_argument("--lambda", dest="lam", type=float, default=None, help="Activity.")
        self._add_density_arguments(parser)
        parser.add_argument(
            "--n-starts", type=int, default=DEFAULT_N_STARTS, help="Multistart count of the stationary search."
        )
        parser.add_argument(
            "--radius",
            type=float,
            default=None,
            help="Scan an (alpha, beta) grid of this half-width around (1/d, 1/d) instead of a single density.",
        )
        parser.add_argument(
            "--grid-points", type=int, default=PHI1_GRID_POINTS, help="Grid resolution of the Phi1 landscape."
        )

    def _add_moments_parser(self, subparsers):
        parser = subparsers.add_parser(CommandEnum.MOMENTS.value, help="Exact moments and their limiting ratio.")
        parser.add_argument("action", choices=[a.value for a in MomentsAction], help="What to compute.")
        self._add_common_arguments(parser)
        parser.add_argument("--d", type=int, required=True, help="Degree, at least 3.")
        parser.add_argument("--lambda", dest="lam", type=float, default=1.0, help="Activity (default: 1).")
        self._add_density_arguments(parser)
        parser.add_argument("--n-list", type=str, default=None, help="Comma-separated sizes for 'ratio'.")
        parser.add_argument(
            "--i-max",
            type=int,
            default=CONDITIONING_I_MAX,
            help=f"Longest cycle length of 'conditioning' (default: {CONDITIONING_I_MAX}).",
        )
        parser.add_argument(
            "--strict", action="store_true", help="Fail when a quadrature misses its tolerance ('tau')."
        )

    def _add_enumerate_parser(self, subparsers):
        parser = subparsers.add_parser(CommandEnum.ENUMERATE.value, help="Exact per-graph enumeration.")
        parser.add_argument("action", choices=[a.value for a in EnumerateAction], help="What to compute.")
        self._add_common_arguments(parser)
        self._add_graph_arguments(parser)
        parser.add_argument("--t", type=int, default=0, help="Occupancy-difference threshold of the barrier.")

    def _add_dynamics_parser(self, subparsers):
        parser = subparsers.add_parser(CommandEnum.DYNAMICS.value, help="Glauber and block dynamics.")
        parser.add_argument("action", choices=[a.value for a in DynamicsAction], help="What to run.")
        self._add_common_arguments(parser)
        self._add_graph_arguments(parser)
        parser.add_argument("--steps", type=int, required=True, help="Updates per run (censoring horizon).")
        parser.add_argument(
            "--init",
            type=str,
            choices=[i.value for i in ChainInit if i != ChainInit.GIVEN],
            default=ChainInit.EMPTY.value,
            help="Starting state of 'run' (default: empty).",
        )
        parser.add_argument(
            "--sample-every", type=int, default=DEFAULT_SAMPLE_EVERY, help="Recording period of 'run'."
        )
        parser.add_argument(
            "--block-size", type=int, default=0, help="Resample random blocks of this size (0: single-site)."
        )
        parser.add_argument("--runs", type=int, default=1, help="Independent runs of 'crossing'.")

    def _add_experiment_parser(self, subparsers):
        parser = subparsers.add_parser(CommandEnum.EXPERIMENT.value, help="Run a configured experiment.")
        self._add_common_arguments(parser)
        parser.add_argument("--config", type=str, required=True, help="JSON experiment configuration.")

    def _add_density_arguments(self, parser):
        parser.add_argument("--alpha", type=float, default=None, help="V1 density (default: 1/d).")
        parser.add_argument("--beta", type=float, default=None, help="V2 density (default: 1/d).")

    def _add_graph_arguments(self, parser):
        parser.add_argument("--graph", type=str, required=True, help="Graph file written by 'gen'.")
        parser.add_argument("--lambda", dest="lam", type=float, required=True, help="Activity.")

    def _add_common_arguments(self, parser):
        parser.add_argument("--seed", type=int, default=None, help="Root seed of every random stream.")
        parser.add_argument("--threads", type=int, default=None, help="Worker threads (default: 1).")
        parser.add_argument(
            "--out", type=str, default=None, help="Output file (artifact directory root for 'experiment')."
        )
        parser.add_argument(
            "--format",
            type=str,
            choices=[f.value for f in StorageFormat],
            default=StorageFormat.CSV.value,
            help="Storage format (csv or json, default: csv).",
        )
        parser.add_argument("--save-logs", action="store_true", help="Also write logs to logs/hardcore.log.")
        parser.add_argument("--log-level", type=str, choices=LOG_LEVELS, default="INFO", help="Logging level.")

    def get_parser(self) -> argparse.ArgumentParser:
        return self.parser
