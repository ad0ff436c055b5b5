import argparse

import pytest

from src.cli.cli_argument_validator import CLIArgumentValidator


@pytest.fixture
def validator():
    return CLIArgumentValidator()


def _common(**kwargs) -> argparse.Namespace:
    return argparse.Namespace(**{"seed": None, "threads": None, **kwargs})


def _dynamics(graph: str, **kwargs) -> argparse.Namespace:
    values = {
        "command": "dynamics",
        "action": "run",
        "graph": graph,
        "lam": 1.0,
        "steps": 10,
        "sample_every": 1,
        "block_size": 0,
        "runs": 1,
    }
    return _common(**{**values, **kwargs})


def test_valid_tree(validator):
    validator.validate_args(_common(command="tree", d=3, lambda_grid="3.5:5:0.1"))


def test_invalid_command(validator):
    with pytest.raises(ValueError, match="Invalid command 'mix'"):
        validator.validate_args(_common(command="mix"))


def test_gen_accepts_degree_one(validator):
    validator.validate_args(_common(command="gen", d=1, n=4, count=1, i_max=None))


def test_tree_needs_degree_three(validator):
    with pytest.raises(ValueError, match="at least 3"):
        validator.validate_args(_common(command="tree", d=2, lambda_grid="1,2"))


def test_errors_are_joined(validator):
    args = _common(command="gen", d=0, n=0, count=0, i_max=3, seed=-1, threads=0)
    with pytest.raises(ValueError) as excinfo:
        validator.validate_args(args)
    assert len(str(excinfo.value).splitlines()) == 6


def test_cycle_cap_only_for_gen(validator):
    with pytest.raises(ValueError, match="capped"):
        validator.validate_args(_common(command="gen", d=3, n=4, count=1, i_max=14))
    validator.validate_args(
        _common(
            command="moments",
            action="conditioning",
            d=3,
            lam=1.0,
            alpha=None,
            beta=None,
            n_list=None,
            i_max=40,
        )
    )


def test_non_positive_grid(validator):
    with pytest.raises(ValueError, match="must be positive"):
        validator.validate_args(_common(command="tree", d=3, lambda_grid="-1,2"))


def test_densities(validator):
    args = _common(command="moments", action="tau", d=3, lam=1.0, alpha=0.6, beta=0.5, n_list=None, i_max=40)
    with pytest.raises(ValueError, match=r"alpha \+ beta < 1"):
        validator.validate_args(args)


def test_ratio_needs_sizes(validator):
    args = _common(command="moments", action="ratio", d=3, lam=1.0, alpha=None, beta=None, n_list=None, i_max=40)
    with pytest.raises(ValueError, match="requires '--n-list'"):
        validator.validate_args(args)


def test_n_starts_floor(validator):
    args = _common(
        command="exponents", action="stationary", d=3, lam=None, alpha=None, beta=None, n_starts=10
    )
    with pytest.raises(ValueError, match="at least 100"):
        validator.validate_args(args)


def test_missing_graph_file(validator, tmp_path):
    with pytest.raises(ValueError, match="does not exist"):
        validator.validate_args(_dynamics(str(tmp_path / "absent.txt")))


def test_dynamics_limits(validator, tmp_path):
    graph = tmp_path / "g.txt"
    graph.write_text("1 1\n0\n", encoding="utf-8")
    validator.validate_args(_dynamics(str(graph)))

    with pytest.raises(ValueError) as excinfo:
        validator.validate_args(_dynamics(str(graph), steps=-1, sample_every=0, block_size=21))
    assert len(str(excinfo.value).splitlines()) == 3
