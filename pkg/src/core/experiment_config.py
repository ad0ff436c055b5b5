from dataclasses import asdict, dataclass, fields
import json
import logging

from src.utils.constants import DEFAULT_N_STARTS, DEFAULT_OUTPUT_DIR, MAX_CYCLE_LENGTH, MIN_N_STARTS
from src.utils.experiment_name_enum import ExperimentName

logger = logging.getLogger(__name__)

GRID_FIELDS = ("lambdas", "n_list", "thresholds")

# Fields an experiment cannot run without.
REQUIRED_FIELDS: dict[ExperimentName, tuple[str, ...]] = {
    ExperimentName.PHASE_DIAGRAM: ("lambdas",),
    ExperimentName.PHI1_LANDSCAPE: ("lambdas",),
    ExperimentName.INTERIOR_MAXIMUM: (),
    ExperimentName.RATIO_CONVERGENCE: ("n_list",),
    ExperimentName.TAU_CONSISTENCY: (),
    ExperimentName.CONDITIONING: (),
    ExperimentName.CYCLE_STATISTICS: ("n_list",),
    ExperimentName.BOTTLENECK_TREND: ("lambdas", "n_list"),
    ExperimentName.CROSSING_TREND: ("lambdas", "n_list"),
}

# Experiments that turn the densities (alpha, beta) into integer occupancies (alpha n, beta n).
DENSITY_EXPERIMENTS = frozenset({ExperimentName.RATIO_CONVERGENCE})


@dataclass(frozen=True)
class ExperimentConfig:
    """
    One reproducible study.

    Attributes:
        experiment (str): Name of a registered experiment.
        d (int): Degree.
        seed (int | None): Root seed; every random stream of the run derives from it.
        lambdas (tuple[float, ...] | None): Activity grid.
        n_list (tuple[int, ...] | None): Graph sizes, in the order they are processed.
        n_samples (int): Monte Carlo samples (graphs or chain runs) per grid point.
        thresholds (tuple[float, ...]): Barrier densities tau; the integer threshold at size n is floor(tau n).
        output_dir (str): Root directory of the artifact directory.
        threads (int): Worker threads; results do not depend on it.
        alpha (float | None): V1 density, 1/d when unset.
        beta (float | None): V2 density, 1/d when unset.
        i_max (int): Longest cycle length counted by the cycle experiments.
        n_starts (int): Multistart count of the interior-maximum search.
        max_steps (int): Censoring horizon of the crossing-time runs.
        size_biased_n (int | None): Size of the size-biased cycle check, skipped when unset.
        grid_radius (float): Half-width of the density grid around (alpha, beta) for tau-consistency.
    """

    experiment: str
    d: int = 3
    seed: int | None = None
    lambdas: tuple[float, ...] | None = None
    n_list: tuple[int, ...] | None = None
    n_samples: int = 1
    thresholds: tuple[float, ...] = (0.0,)
    output_dir: str = DEFAULT_OUTPUT_DIR
    threads: int = 1
    alpha: float | None = None
    beta: float | None = None
    i_max: int = 4
    n_starts: int = DEFAULT_N_STARTS
    max_steps: int = 0
    size_biased_n: int | None = None
    grid_radius: float = 0.02

    @property
    def name(self) -> ExperimentName:
        return ExperimentName(self.experiment)

    @property
    def density(self) -> tuple[float, float]:
        alpha = 1 / self.d if self.alpha is None else self.alpha
        beta = 1 / self.d if self.beta is None else self.beta
        return alpha, beta

    def as_dict(self) -> dict:
        data = asdict(self)
        for key in GRID_FIELDS:
            if data[key] is not None:
                data[key] = list(data[key])
        return data

    def with_overrides(self, **overrides) -> "ExperimentConfig":
        """A copy with the given non-None fields replaced (CLI flags take precedence over the file)."""
        changes = {key: value for key, value in overrides.items() if value is not None}
        return ExperimentConfig.from_dict({**self.as_dict(), **changes})

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        """
        Raises:
            ValueError: If the document has unknown keys or lacks the experiment name.
        """
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ValueError(f"Unknown configuration keys: {', '.join(unknown)}.")
        if "experiment" not in data:
            raise ValueError("Configuration must name an 'experiment'.")

        values = dict(data)
        for key in GRID_FIELDS:
            if values.get(key) is not None:
                values[key] = tuple(values[key])
        return cls(**values)

    @classmethod
    def from_file(cls, file_path: str) -> "ExperimentConfig":
        """
        Load and validate a JSON configuration.

        Raises:
            ValueError: With every violation, one per line, if the file does not describe a runnable experiment.
        """
        try:
            with open(file_path, encoding="utf-8") as file:
                data = json.load(file)
        except json.JSONDecodeError as e:
            raise ValueError(f"Configuration file '{file_path}' is not valid JSON: {e}") from e

        if not isinstance(data, dict):
            raise ValueError(f"Configuration file '{file_path}' must hold a JSON object.")

        config = cls.from_dict(data)
        errors = validate_config(config)
        if errors:
            raise ValueError("\n".join(errors))
        logger.info(f"Loaded configuration '{config.experiment}' from {file_path}")
        return config


def _validate_name(cfg: ExperimentConfig) -> list[str]:
    valid = [e.value for e in ExperimentName]
    if cfg.experiment not in valid:
        return [f"Invalid experiment '{cfg.experiment}'. Supported experiments are: {', '.join(valid)}."]
    return []


def _validate_grids(cfg: ExperimentConfig) -> list[str]:
    errors = []
    for key in GRID_FIELDS:
        values = getattr(cfg, key)
        if values is not None and len(values) == 0:
            errors.append(f"Grid '{key}' is empty.")

    if cfg.experiment in {e.value for e in ExperimentName}:
        for key in REQUIRED_FIELDS[cfg.name]:
            if getattr(cfg, key) is None:
                errors.append(f"Experiment '{cfg.experiment}' requires '{key}'.")

    if cfg.lambdas and any(not lam > 0 for lam in cfg.lambdas):
        errors.append(f"All activities in 'lambdas' must be positive, got {list(cfg.lambdas)}.")
    if cfg.n_list and any(int(n) != n or n < 1 for n in cfg.n_list):
        errors.append(f"All sizes in 'n_list' must be positive integers, got {list(cfg.n_list)}.")
    if any(not 0 <= t <= 1 for t in cfg.thresholds):
        errors.append(f"Barrier densities in 'thresholds' must lie in [0, 1], got {list(cfg.thresholds)}.")
    return errors


def _validate_scalars(cfg: ExperimentConfig) -> list[str]:
    errors = []
    if cfg.seed is None:
        errors.append("Missing 'seed'. Every experiment needs a root seed.")
    elif not isinstance(cfg.seed, int) or cfg.seed < 0:
        errors.append(f"'seed' must be a non-negative integer, got {cfg.seed}.")
    if not isinstance(cfg.d, int) or cfg.d < 3:
        errors.append(f"'d' must be an integer >= 3, got {cfg.d}.")
    if cfg.n_samples < 1:
        errors.append(f"'n_samples' must be positive, got {cfg.n_samples}.")
    if cfg.threads < 1:
        errors.append(f"'threads' must be positive, got {cfg.threads}.")
    if cfg.i_max < 2 or cfg.i_max % 2 or cfg.i_max > MAX_CYCLE_LENGTH:
        errors.append(f"'i_max' must be an even integer in [2, {MAX_CYCLE_LENGTH}], got {cfg.i_max}.")
    if cfg.n_starts < MIN_N_STARTS:
        errors.append(f"'n_starts' must be at least {MIN_N_STARTS}, got {cfg.n_starts}.")
    if cfg.max_steps < 0:
        errors.append(f"'max_steps' must be >= 0, got {cfg.max_steps}.")
    elif cfg.experiment == ExperimentName.CROSSING_TREND.value and cfg.max_steps == 0:
        errors.append("Experiment 'crossing-trend' requires a positive 'max_steps'.")
    if cfg.grid_radius < 0:
        errors.append(f"'grid_radius' must be >= 0, got {cfg.grid_radius}.")
    return errors


def _validate_densities(cfg: ExperimentConfig) -> list[str]:
    if not isinstance(cfg.d, int) or cfg.d < 3:
        return []

    alpha, beta = cfg.density
    if not (alpha > 0 and beta > 0 and alpha + beta < 1):
        return [f"Densities must satisfy alpha, beta > 0 and alpha + beta < 1, got ({alpha}, {beta})."]

    errors = []
    sizes = []
    if cfg.experiment in {e.value for e in DENSITY_EXPERIMENTS} and cfg.n_list:
        sizes = [("n_list", n) for n in cfg.n_list]
    if cfg.size_biased_n is not None:
        sizes.append(("size_biased_n", cfg.size_biased_n))

    for key, n in sizes:
        if abs(alpha * n - round(alpha * n)) > 1e-9 or abs(beta * n - round(beta * n)) > 1e-9:
            errors.append(
                f"'{key}' value {n} does not give integer occupancies for densities ({alpha}, {beta}); "
                f"use a multiple of {cfg.d} for the default densities 1/d."
            )
    return errors


def validate_config(cfg: ExperimentConfig) -> list[str]:
    """
    Every reason why `cfg` cannot run; an empty list means it is runnable.

    Returns:
        list[str]: Human-readable violations, each naming the offending field.
    """
    errors = _validate_name(cfg)
    errors.extend(_validate_grids(cfg))
    errors.extend(_validate_scalars(cfg))
    errors.extend(_validate_densities(cfg))
    return errors
