# -*- coding: utf-8 -*-

import math
from dataclasses import replace

import numpy as np
import pytest

from pynlos import ConfigurationError
from pynlos import EstimatorConfig
from pynlos import GenerationError
from pynlos import Hypothesis
from pynlos import NoiseConfig
from pynlos import ScenarioParams
from pynlos import generate_scenario
from pynlos import monte_carlo
from pynlos import score
from pynlos.estimator import EstimateResult
from pynlos.simulator import ERROR_FIELDS
from pynlos.simulator import ExperimentParams
from pynlos.simulator import nearest_rank
from pynlos.simulator import summarize
from pynlos.simulator import trial_seeds
from pynlos.simulator import truth_as_result


class TestGenerateScenario:
    def test_preset_shaped(self):
        params = ScenarioParams(l_paths=5, range_r=50.0, alpha=math.pi / 3, bias=20.0)
        for seed in range(10):
            scenario = generate_scenario(params, seed)

            assert scenario.n_paths == 5
            assert scenario.ue.orientation_alpha == pytest.approx(math.pi / 3)
            assert scenario.ue.bias_b == 20.0
            assert np.linalg.norm(scenario.ue.position - scenario.bs) <= 50.0
            for sp in scenario.sps:
                d_bs = np.linalg.norm(sp - scenario.bs)
                d_ue = np.linalg.norm(sp - scenario.ue.position)
                assert min(d_bs, d_ue) >= 1.0
                assert d_bs + d_ue <= 100.0

    def test_random_state(self):
        scenario = generate_scenario(ScenarioParams(), 4)
        assert 0 <= scenario.ue.orientation_alpha < 2 * math.pi
        assert 0 <= scenario.ue.bias_b <= 50.0

    def test_deterministic(self):
        first = generate_scenario(ScenarioParams(), 7)
        second = generate_scenario(ScenarioParams(), 7)
        other = generate_scenario(ScenarioParams(), 8)

        assert np.array_equal(first.ue.position, second.ue.position)
        assert all(np.array_equal(a, b) for a, b in zip(first.sps, second.sps))
        assert not np.array_equal(first.ue.position, other.ue.position)

    def test_regions(self):
        params = ScenarioParams(
            l_paths=3,
            bs=(1.0, 2.0, 3.0),
            ue_region=((10.0, 10.0, 0.0), (10.0, 10.0, 0.0)),
            sp_region=((-20.0, -20.0, -5.0), (20.0, 20.0, 5.0)),
        )
        scenario = generate_scenario(params, 0)

        assert scenario.ue.position == pytest.approx([10.0, 10.0, 0.0])
        assert scenario.bs == pytest.approx([1.0, 2.0, 3.0])
        for sp in scenario.sps:
            assert np.all(np.abs(sp[:2]) <= 20.0)
            assert abs(sp[2]) <= 5.0

    def test_unreachable_ue_region(self):
        params = ScenarioParams(ue_region=((100.0, 100.0, 0.0), (110.0, 110.0, 0.0)))
        with pytest.raises(GenerationError):
            generate_scenario(params, 0)

    def test_sp_region_too_close(self):
        params = ScenarioParams(
            ue_region=((0.0, 0.0, 0.0), (0.0, 0.0, 0.0)),
            sp_region=((-0.1, -0.1, -0.1), (0.1, 0.1, 0.1)),
        )
        with pytest.raises(GenerationError):
            generate_scenario(params, 0)

    @pytest.mark.parametrize(
        "params",
        [
            ScenarioParams(l_paths=0),
            ScenarioParams(range_r=0.0),
            ScenarioParams(min_separation=-1.0),
            ScenarioParams(ue_region=((1.0, 0.0, 0.0), (0.0, 0.0, 0.0))),
        ],
    )
    def test_invalid_params(self, params):
        with pytest.raises(ConfigurationError):
            generate_scenario(params, 0)


class TestScore:
    def test_truth_scores_zero(self, scenario):
        report = score(scenario, truth_as_result(scenario))

        assert report.ue_error_m == 0.0
        assert report.alpha_error_rad == 0.0
        assert report.bias_error_m == 0.0
        assert report.sp_errors_m == [0.0] * 5
        assert report.radial_shift_m == 0.0

    def test_errors(self, scenario):
        result = EstimateResult(
            hypothesis_star=Hypothesis(math.pi / 3 + 0.2, 18.5),
            mu_ue=scenario.ue.position + np.array([3.0, 4.0, 0.0]),
            sigma_ue=np.zeros((3, 3)),
            sp_estimates=[sp + np.array([0.0, 0.0, 2.0]) for sp in scenario.sps],
            metric_star=0.1,
            feasible_fraction=1.0,
        )
        report = score(scenario, result)

        assert report.ue_error_m == pytest.approx(5.0)
        assert report.alpha_error_rad == pytest.approx(0.2)
        assert report.bias_error_m == pytest.approx(1.5)
        assert report.sp_errors_m == pytest.approx([2.0] * 5)
        assert report.mean_sp_error_m == pytest.approx(2.0)

    def test_alpha_error_is_circular(self, scenario):
        result = replace(
            truth_as_result(scenario),
            hypothesis_star=Hypothesis(math.pi / 3 - 2 * math.pi + 0.05, 20.0),
        )
        assert score(scenario, result).alpha_error_rad == pytest.approx(0.05)

        result = replace(
            truth_as_result(scenario), hypothesis_star=Hypothesis(math.pi / 3 + 6.2, 20.0)
        )
        assert score(scenario, result).alpha_error_rad == pytest.approx(2 * math.pi - 6.2)

    def test_radial_shift_toward_bs(self, scenario):
        truth = truth_as_result(scenario)

        def toward_bs(point):
            direction = scenario.bs - point
            return point + direction / np.linalg.norm(direction)

        result = replace(
            truth,
            mu_ue=toward_bs(scenario.ue.position),
            sp_estimates=[toward_bs(sp) for sp in scenario.sps],
        )
        assert score(scenario, result).radial_shift_m == pytest.approx(1.0)

    def test_count_mismatch(self, scenario):
        result = replace(truth_as_result(scenario), sp_estimates=[scenario.sps[0]])
        with pytest.raises(ConfigurationError):
            score(scenario, result)


class TestNearestRank:
    def test_deciles(self):
        values = list(range(1, 11))
        assert nearest_rank(values, 0.5) == 5
        assert nearest_rank(values, 0.9) == 9
        assert nearest_rank(values, 1.0) == 10

    def test_unsorted(self):
        assert nearest_rank([7.0, 1.0, 3.0], 0.5) == 3.0

    def test_empty(self):
        assert math.isnan(nearest_rank([], 0.5))


class TestSummarize:
    def test_failures_are_counted_not_scored(self):
        ok = {"status": "ok", "alpha_span": 2.0, "bias_span": 10.0}
        rows = [
            {"trial": 0, **ok, **dict.fromkeys(ERROR_FIELDS, 1.0)},
            {"trial": 1, **ok, **dict.fromkeys(ERROR_FIELDS, 3.0)},
            {"trial": 2, "status": "failed:EstimationFailure"},
        ]
        summary = summarize(rows)

        assert summary["trials"] == 3
        assert summary["failures"] == 1
        assert summary["ue_error"] == {"median": 1.0, "p90": 3.0}
        assert summary["alpha_error_over_span_median"] == 0.5
        assert summary["bias_error_over_span_median"] == 0.1


class TestMonteCarlo:
    def params(self):
        return ExperimentParams(
            scenario=ScenarioParams(l_paths=4, alpha=math.pi / 3, bias=20.0),
            noise=NoiseConfig(0.0, 0.0),
            estimator=EstimatorConfig(n_s=1),
        )

    def test_zero_noise_single_trial(self):
        rows, summary = monte_carlo(self.params(), trials=1, seed=0)

        assert len(rows) == 1
        assert rows[0]["trial"] == 0
        assert rows[0]["status"] == "ok"
        assert summary["trials"] == 1
        assert summary["failures"] == 0
        assert summary["ue_error"]["median"] == rows[0]["ue_error"]
        assert all(rows[0][name] >= 0 for name in ERROR_FIELDS if name != "radial_shift")
        assert rows[0]["alpha_span"] > 0

    def test_deterministic(self):
        params = ExperimentParams(
            scenario=ScenarioParams(l_paths=3),
            noise=NoiseConfig(),
            estimator=EstimatorConfig(n_s=2, refine=False),
        )
        first, _ = monte_carlo(params, trials=2, seed=5)
        second, _ = monte_carlo(params, trials=2, seed=5)

        assert first == second

    def test_trial_seeds(self):
        assert trial_seeds(0, 1) == trial_seeds(0, 1)
        assert trial_seeds(0, 1) != trial_seeds(0, 2)
        assert trial_seeds(0, 1) != trial_seeds(1, 1)
        assert len(set(trial_seeds(3, 4))) == 3

    def test_failed_trial_is_recorded(self):
        params = replace(self.params(), scenario=ScenarioParams(l_paths=1))
        rows, summary = monte_carlo(params, trials=2, seed=0)

        assert [row["status"] for row in rows] == ["failed:ConfigurationError"] * 2
        assert all(math.isnan(row["ue_error"]) for row in rows)
        assert summary["failures"] == 2
        assert math.isnan(summary["ue_error"]["median"])

    @pytest.mark.parametrize("trials", [0, -1])
    def test_invalid_trials(self, trials):
        with pytest.raises(ConfigurationError):
            monte_carlo(self.params(), trials=trials, seed=0)


@pytest.mark.slow
class TestAccuracy:
    def test_noise_free_recovery(self):
        params = ExperimentParams(
            scenario=ScenarioParams(l_paths=5),
            noise=NoiseConfig(0.0, 0.0),
            estimator=EstimatorConfig(n_s=1),
        )
        rows, _ = monte_carlo(params, trials=100, seed=0)

        located = [row["alpha_error"] < 0.01 and row["ue_error"] < 0.1 for row in rows]
        synchronized = [row["bias_error"] < 1.0 for row in rows]
        assert sum(located) >= 95
        assert sum(synchronized) >= 90

    def test_orientation_easier_than_bias(self):
        params = ExperimentParams(
            scenario=ScenarioParams(l_paths=5, alpha=math.pi / 3, bias=20.0),
            noise=NoiseConfig(0.1, 0.01),
            estimator=EstimatorConfig(n_s=10),
        )
        _, summary = monte_carlo(params, trials=20, seed=0)

        assert summary["alpha_error_over_span_median"] < summary["bias_error_over_span_median"]
