import pytest

from src.cli.cli_argument_handler import CLIArgumentHandler
from src.utils.constants import DEFAULT_SEED


@pytest.fixture
def handler():
    return CLIArgumentHandler()


def test_tree_grid_is_parsed(handler):
    args = handler.parse_and_validate_args(["tree", "--d", "3", "--lambda-grid", "3.5,4.5,6"])
    assert args["lambdas"] == [3.5, 4.5, 6.0]
    assert args["seed"] == DEFAULT_SEED
    assert args["threads"] == 1
    assert args["action"] is None


def test_size_list_is_parsed(handler):
    args = handler.parse_and_validate_args(["moments", "ratio", "--d", "3", "--n-list", "30,60", "--seed", "4"])
    assert args["n_list"] == [30, 60]
    assert args["seed"] == 4


def test_experiment_keeps_unset_overrides(handler, tmp_path):
    config = tmp_path / "c.json"
    config.write_text("{}", encoding="utf-8")
    args = handler.parse_and_validate_args(["experiment", "--config", str(config)])
    assert args["seed"] is None
    assert args["threads"] is None


def test_no_command_exits_with_usage_error(handler):
    with pytest.raises(SystemExit) as excinfo:
        handler.parse_and_validate_args([])
    assert excinfo.value.code == 2


def test_invalid_arguments_exit_with_usage_error(handler):
    with pytest.raises(SystemExit) as excinfo:
        handler.parse_and_validate_args(["tree", "--d", "2", "--lambda-grid", "1,2"])
    assert excinfo.value.code == 2


def test_missing_config_file(handler, tmp_path):
    with pytest.raises(SystemExit) as excinfo:
        handler.parse_and_validate_args(["experiment", "--config", str(tmp_path / "absent.json")])
    assert excinfo.value.code == 2
