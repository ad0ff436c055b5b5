from dataclasses import dataclass, field
import logging
import os

from src.core.cycle_conditioning import conditioning_summary
from src.core.exact_enumeration import (
    barrier_measures,
    conductance_from_barrier,
    exact_spectral_gap,
    occupancy_profile,
)
from src.core.experiment_config import ExperimentConfig
from src.core.experiment_runner import run_experiment
from src.core.exponents import DensityPoint
from src.core.glauber_dynamics import crossing_time, run_chain
from src.core.graph_generator import count_cycles, read_graph, sample_graph, write_graph
from src.core.moments import ratio_series, tau_by_quadrature
from src.core.polynomial_certificates import verify_appendix_polynomials
from src.core.stationary_points import find_stationary_points, phi1_landscape, unique_max_scan
from src.core.tree_gibbs import phase_diagram
from src.utils.chain_init_enum import ChainInit
from src.utils.command_enum import CommandEnum, DynamicsAction, EnumerateAction, ExponentsAction, MomentsAction
from src.utils.constants import DETAILED_BALANCE_TOL


@dataclass(frozen=True)
class CommandResult:
    """Rows to store, the default file they go to and whether every check of the command passed."""

    rows: list[dict] = field(default_factory=list)
    default_file: str = "results"
    passed: bool = True
    artifact_dir: str | None = None


class CommandDispatcher:
    """Maps a validated CLI argument dictionary onto the core computation it names."""

    def __init__(self):
        self.logger = logging.getLogger(self.__class__.__name__)
        self._handlers = {
            CommandEnum.GEN: self._run_gen,
            CommandEnum.TREE: self._run_tree,
            CommandEnum.EXPONENTS: self._run_exponents,
            CommandEnum.MOMENTS: self._run_moments,
            CommandEnum.ENUMERATE: self._run_enumerate,
            CommandEnum.DYNAMICS: self._run_dynamics,
            CommandEnum.EXPERIMENT: self._run_experiment,
        }

    def dispatch(self, args: dict) -> CommandResult:
        """
        Raises:
            ValueError: If the command is unknown or its arguments are rejected by the core layer.
        """
        command = CommandEnum(args["command"])
        self.logger.info(f"Dispatching '{command.value}' {args.get('action') or ''}".rstrip())
        return self._handlers[command](args)

    def _run_gen(self, args: dict) -> CommandResult:
        n, d, seed = args["n"], args["d"], args["seed"]
        rows = []
        for index in range(args["count"]):
            g = sample_graph(n, d, seed, index)
            file_path = os.path.join(args["graph_dir"], f"graph_n{n}_d{d}_s{seed}_{index}.txt")
            write_graph(g, file_path)
            row = {"index": index, "n": n, "d": d, "seed": seed, "graph_file": file_path}
            if args["i_max"] is not None:
                row.update({f"X{i}": count for i, count in count_cycles(g, args["i_max"]).counts.items()})
            rows.append(row)
        return CommandResult(rows=rows, default_file="graphs")

    def _run_tree(self, args: dict) -> CommandResult:
        points = phase_diagram(args["d"], args["lambdas"])
        return CommandResult(rows=[p.as_row() for p in points], default_file="tree")

    def _density(self, args: dict) -> tuple[float, float]:
        d = args["d"]
        alpha = 1 / d if args["alpha"] is None else args["alpha"]
        beta = 1 / d if args["beta"] is None else args["beta"]
        return alpha, beta

    def _run_exponents(self, args: dict) -> CommandResult:
        action = ExponentsAction(args["action"])
        d, seed, threads = args["d"], args["seed"], args["threads"]
        default_file = f"exponents_{action.value}"

        if action == ExponentsAction.PHI1_LANDSCAPE:
            if args["lam"] is None:
                raise ValueError("'exponents phi1-landscape' requires '--lambda'.")
            rows = phi1_landscape(args["lam"], d, grid_points=args["grid_points"])
            return CommandResult(rows=rows, default_file=default_file)

        if action == ExponentsAction.STATIONARY:
            lam = 1.0 if args["lam"] is None else args["lam"]
            if args["radius"] is not None:
                rows = unique_max_scan(d, args["radius"], n_starts=args["n_starts"], seed=seed, threads=threads)
                return CommandResult(rows=rows, default_file=f"{default_file}_scan")

            report = find_stationary_points(
                DensityPoint(*self._density(args)), lam, d, n_starts=args["n_starts"], seed=seed, threads=threads
            )
            if report.failed_starts:
                self.logger.warning(f"{len(report.failed_starts)} of {report.n_starts} starts did not converge")
            return CommandResult(rows=report.as_rows(), default_file=default_file)

        report = verify_appendix_polynomials(d)
        return CommandResult(
            rows=[check.as_row() for check in report.checks], default_file=default_file, passed=report.all_hold
        )

    def _run_moments(self, args: dict) -> CommandResult:
        action = MomentsAction(args["action"])
        d = args["d"]
        alpha, beta = self._density(args)
        default_file = f"moments_{action.value}"

        if action == MomentsAction.RATIO:
            rows = ratio_series(args["n_list"], alpha, beta, args["lam"], d, threads=args["threads"])
            return CommandResult(rows=rows, default_file=default_file)

        if action == MomentsAction.TAU:
            quadrature = tau_by_quadrature(alpha, beta, d, strict=args["strict"])
            return CommandResult(rows=[quadrature.as_row()], default_file=default_file)

        summary = conditioning_summary(alpha, beta, d, args["i_max"])
        return CommandResult(rows=summary.as_rows(), default_file=default_file)

    def _run_enumerate(self, args: dict) -> CommandResult:
        action = EnumerateAction(args["action"])
        g = read_graph(args["graph"])
        lam, threads = args["lam"], args["threads"]
        default_file = f"enumerate_{action.value}"

        if action == EnumerateAction.PROFILE:
            profile = occupancy_profile(g, lam, threads=threads)
            self.logger.info(f"ln Z = {profile.log_partition:.12f}")
            return CommandResult(rows=profile.as_rows(), default_file=default_file)

        if action == EnumerateAction.BARRIER:
            measures = barrier_measures(g, lam, args["t"], threads=threads)
            bound = conductance_from_barrier(measures)
            row = {**measures.as_row(), **{f"conductance_{k}": v for k, v in bound.as_row().items() if k != "t"}}
            return CommandResult(rows=[row], default_file=default_file)

        gap = exact_spectral_gap(g, lam)
        return CommandResult(
            rows=[gap.as_row()],
            default_file=default_file,
            passed=gap.detailed_balance_residual <= DETAILED_BALANCE_TOL,
        )

    def _run_dynamics(self, args: dict) -> CommandResult:
        action = DynamicsAction(args["action"])
        g = read_graph(args["graph"])
        default_file = f"dynamics_{action.value}"

        if action == DynamicsAction.RUN:
            trace = run_chain(
                g,
                args["lam"],
                args["steps"],
                init=ChainInit(args["init"]),
                sample_every=args["sample_every"],
                seed=args["seed"],
                block_size=args["block_size"],
            )
            return CommandResult(rows=trace.as_rows(), default_file=default_file)

        summary = crossing_time(g, args["lam"], args["steps"], args["runs"], args["seed"], threads=args["threads"])
        return CommandResult(rows=summary.as_rows(), default_file=default_file)

    def _run_experiment(self, args: dict) -> CommandResult:
        config = ExperimentConfig.from_file(args["config"]).with_overrides(
            seed=args["seed"], threads=args["threads"], output_dir=args["out"]
        )
        outcome = run_experiment(config)
        return CommandResult(passed=outcome.passed, artifact_dir=outcome.directory)
