import pytest

from src.cli.cli_argument_parser import CLIArgumentParser


@pytest.fixture
def parser():
    return CLIArgumentParser()


def test_gen_arguments(parser):
    args = parser.parse_args(["gen", "--n", "12", "--d", "3", "--seed", "7", "--count", "5", "--i-max", "6"])
    assert (args.command, args.n, args.d, args.seed, args.count, args.i_max) == ("gen", 12, 3, 7, 5, 6)
    assert args.graph_dir == "graphs"
    assert args.threads is None


def test_common_defaults(parser):
    args = parser.parse_args(["tree", "--d", "3", "--lambda-grid", "3.5:5:0.1"])
    assert args.format == "csv"
    assert args.log_level == "INFO"
    assert not args.save_logs
    assert args.out is None


def test_actions(parser):
    args = parser.parse_args(["moments", "tau", "--d", "3", "--strict"])
    assert args.action == "tau"
    assert args.strict
    assert args.lam == 1.0
    assert args.i_max == 40


def test_lambda_flag_maps_to_lam(parser):
    args = parser.parse_args(["enumerate", "gap", "--graph", "g.txt", "--lambda", "2.5"])
    assert args.lam == 2.5
    assert args.t == 0


def test_dynamics_rejects_given_init(parser):
    with pytest.raises(SystemExit):
        parser.parse_args(["dynamics", "run", "--graph", "g.txt", "--lambda", "1", "--steps", "5", "--init", "given"])


def test_unknown_action(parser):
    with pytest.raises(SystemExit):
        parser.parse_args(["exponents", "landscape", "--d", "3"])


def test_missing_required(parser):
    with pytest.raises(SystemExit):
        parser.parse_args(["experiment"])


def test_help_lists_every_command(parser):
    help_text = parser.get_parser().format_help()
    for command in ("gen", "tree", "exponents", "moments", "enumerate", "dynamics", "experiment"):
        assert command in help_text
