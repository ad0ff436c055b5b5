import math
from pathlib import Path

import pytest

from src.core import experiment_registry as registry
from src.core.experiment_config import ExperimentConfig
from src.core.experiment_registry import (
    AcceptanceCheck,
    ExperimentRegistry,
    ExperimentResult,
    _attempt,
    bottleneck_decay_rate,
)
from src.utils.experiment_name_enum import ExperimentName

CONFIG_DIR = Path(__file__).resolve().parents[2] / "configs"


def test_every_experiment_is_registered():
    assert sorted(ExperimentRegistry.registered_names()) == sorted(e.value for e in ExperimentName)
    assert all(ExperimentRegistry.get_description(name) for name in ExperimentRegistry.registered_names())


def test_unknown_description_is_empty():
    assert ExperimentRegistry.get_description("mixing") == ""
    assert not ExperimentRegistry.is_registered("mixing")


def test_unregistered_experiment_raises():
    with pytest.raises(ValueError, match="is not registered"):
        ExperimentRegistry.run(ExperimentConfig(experiment="mixing", seed=1))


class TestAcceptanceCheck:
    def test_lines(self):
        assert AcceptanceCheck("a", True, "fine").as_line() == "PASS a: fine"
        assert AcceptanceCheck("b", False, "off").as_line() == "FAIL b: off"
        assert AcceptanceCheck("c", False, "note", informational=True).as_line() == "INFO c: note"

    def test_informational_checks_never_fail(self):
        result = ExperimentResult(experiment=ExperimentName.CONDITIONING)
        result.check("trend", False, "flat", informational=True)
        assert result.all_passed
        result.check("value", False, "wrong")
        assert not result.all_passed


def test_attempt_records_failures():
    result = ExperimentResult(experiment=ExperimentName.CONDITIONING)

    def broken():
        raise ValueError("no convergence")

    assert _attempt(result, "solve", broken) is None
    assert result.failures == ["solve: no convergence"]
    assert _attempt(result, "add", lambda x, y: x + y, 1, y=2) == 3
    assert not result.all_passed


class TestRuns:
    def test_phase_diagram(self):
        cfg = ExperimentConfig(experiment="phase-diagram", seed=1, lambdas=(3.5, 4.5, 6.0))
        result = ExperimentRegistry.run(cfg)
        assert len(result.tables["phase_diagram"]) == 3
        assert [c.name for c in result.checks] == [
            "p_star_at_lambda_c",
            "unique_at_or_below_lambda_c",
            "pitchfork_above_lambda_c",
        ]
        assert result.all_passed

    def test_conditioning(self):
        result = ExperimentRegistry.run(ExperimentConfig(experiment="conditioning", seed=1))
        assert len(result.tables["conditioning"]) == 20
        assert result.all_passed

    def test_phi1_landscape(self):
        result = ExperimentRegistry.run(ExperimentConfig(experiment="phi1-landscape", seed=1, lambdas=(1.0, 6.0)))
        names = [c.name for c in result.checks]
        assert names == [
            "unique_symmetric_maximizer[lambda=1]",
            "two_tilted_maximizers[lambda=6]",
            "symmetric_point_is_saddle[lambda=6]",
        ]
        assert result.all_passed

    def test_bottleneck_trend_checks_both_regimes(self):
        cfg = ExperimentConfig(
            experiment="bottleneck-trend", seed=2, lambdas=(1.0, 6.0), n_list=(4, 6), n_samples=2, thresholds=(0.0,)
        )
        result = ExperimentRegistry.run(cfg)
        assert len(result.tables["bottleneck_trend"]) == 4
        assert len(result.tables["bottleneck_exponent"]) == 2
        assert [row["lambda"] for row in result.tables["bottleneck_decay"]] == [1.0, 6.0]
        assert [c.name for c in result.checks] == [
            "bottleneck_ratio_flat[lambda=1,tau=0]",
            "bottleneck_ratio_decreasing[lambda=6,tau=0]",
            "bottleneck_decay_contrast[tau=0]",
        ]
        assert not any(c.informational for c in result.checks)

    def test_crossing_trend(self):
        cfg = ExperimentConfig(
            experiment="crossing-trend", seed=2, lambdas=(1.0,), n_list=(4, 6), n_samples=3, max_steps=10_000
        )
        result = ExperimentRegistry.run(cfg)
        assert [row["n"] for row in result.tables["crossing_trend"]] == [4, 6]
        assert len(result.tables["crossing_times"]) == 6
        assert result.checks[0].informational

    @pytest.mark.slow
    @pytest.mark.parametrize("name", ["bottleneck_trend", "crossing_trend"])
    def test_shipped_trend_configs_pass(self, name):
        result = ExperimentRegistry.run(ExperimentConfig.from_file(str(CONFIG_DIR / f"{name}.json")))
        assert result.checks
        assert not any(c.informational for c in result.checks)
        assert result.all_passed, [c.as_line() for c in result.checks]

    @pytest.mark.slow
    def test_tau_consistency(self):
        result = ExperimentRegistry.run(ExperimentConfig(experiment="tau-consistency", seed=1, grid_radius=0.0))
        assert [c.name for c in result.checks] == ["tau_agreement", "three_regular_tau"]
        assert result.all_passed


def test_decay_rate_ignores_band_width():
    n_list = [9, 12, 15, 18, 21, 24]
    flat = [1.1 / math.sqrt(n) for n in n_list]
    assert bottleneck_decay_rate(n_list, flat, [0] * 6) == pytest.approx(0.0, abs=1e-12)

    decaying = [0.3 * math.exp(-0.03 * n) / math.sqrt(n) for n in n_list]
    assert bottleneck_decay_rate(n_list, decaying, [0] * 6) == pytest.approx(0.03)

    widened = [3 * r if n >= 20 else r for n, r in zip(n_list, flat, strict=True)]
    widths = [1 if n >= 20 else 0 for n in n_list]
    assert bottleneck_decay_rate(n_list, widened, widths) == pytest.approx(0.0, abs=1e-12)


def test_decay_rate_undefined():
    assert math.isnan(bottleneck_decay_rate([9], [0.5], [0]))
    assert math.isnan(bottleneck_decay_rate([9, 12], [0.5, 0.0], [0, 0]))


class TestBottleneckTrendVerdicts:
    N_LIST = (9, 12, 15, 18, 21, 24)

    @pytest.fixture
    def synthetic_ratios(self, monkeypatch):
        """Replaces enumeration by median ratios read from a table keyed by activity."""
        ratios = {}

        def median_barriers(profiles, n, threshold):
            return {
                "t": 0,
                "median_mu_IB": math.nan,
                "median_bottleneck_ratio": ratios[profiles[0]](n),
                "median_conductance_bound": math.nan,
                "applicable_bounds": 0,
            }

        monkeypatch.setattr(registry, "bottleneck_exponent", lambda *args: None)
        monkeypatch.setattr(registry, "sample_graphs", lambda n, d, seed, count, threads=1: [None] * count)
        monkeypatch.setattr(registry, "occupancy_profile", lambda g, lam, threads=1: lam)
        monkeypatch.setattr(registry, "_median_barriers", median_barriers)
        return ratios

    def _run(self):
        cfg = ExperimentConfig(
            experiment="bottleneck-trend", seed=1, lambdas=(4.4, 0.5), n_list=self.N_LIST, thresholds=(0.0,)
        )
        return ExperimentRegistry.run(cfg)

    def _verdicts(self, result):
        return {c.name.split("[")[0]: c.passed for c in result.checks}

    def test_contrast_passes(self, synthetic_ratios):
        synthetic_ratios[4.4] = lambda n: 0.3 * math.exp(-0.03 * n) / math.sqrt(n)
        synthetic_ratios[0.5] = lambda n: 1.1 / math.sqrt(n)
        result = self._run()
        assert self._verdicts(result) == {
            "bottleneck_ratio_decreasing": True,
            "bottleneck_ratio_flat": True,
            "bottleneck_decay_contrast": True,
        }
        assert result.all_passed

    def test_decay_in_uniqueness_regime_fails(self, synthetic_ratios):
        synthetic_ratios[4.4] = lambda n: 0.3 * math.exp(-0.03 * n) / math.sqrt(n)
        synthetic_ratios[0.5] = lambda n: math.exp(-0.05 * n) / math.sqrt(n)
        result = self._run()
        verdicts = self._verdicts(result)
        assert verdicts["bottleneck_ratio_decreasing"]
        assert not verdicts["bottleneck_ratio_flat"]
        assert not verdicts["bottleneck_decay_contrast"]
        assert not result.all_passed

    def test_flat_ratio_above_threshold_fails(self, synthetic_ratios):
        synthetic_ratios[4.4] = lambda n: 0.1
        synthetic_ratios[0.5] = lambda n: 1.1 / math.sqrt(n)
        result = self._run()
        verdicts = self._verdicts(result)
        assert not verdicts["bottleneck_ratio_decreasing"]
        assert verdicts["bottleneck_ratio_flat"]
        assert not verdicts["bottleneck_decay_contrast"]
        assert not result.all_passed
