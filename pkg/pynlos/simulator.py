# -*- coding: utf-8 -*-
"""Scenario generation, scoring and Monte Carlo experiments."""

from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from dataclasses import field
from dataclasses import replace
from typing import List
from typing import Optional
from typing import Tuple

import numpy as np

from .estimator import EstimateResult
from .estimator import EstimatorConfig
from .estimator import Hypothesis
from .estimator import estimate
from .exceptions import ConfigurationError
from .exceptions import GenerationError
from .exceptions import NLOSError
from .geometry import TWO_PI
from .geometry import UeState
from .geometry import as_point
from .geometry import circular_difference
from .measurement import NoiseConfig
from .measurement import synthesize

logger = logging.getLogger(__name__)

MAX_ATTEMPTS = 1000

ERROR_FIELDS = ("ue_error", "alpha_error", "bias_error", "mean_sp_error", "radial_shift")


@dataclass(frozen=True, eq=False)
class Scenario:
    bs: np.ndarray
    ue: UeState
    sps: List[np.ndarray]
    range_r: float = 50.0

    def __post_init__(self):
        object.__setattr__(self, "bs", as_point(self.bs))
        object.__setattr__(self, "sps", [as_point(sp) for sp in self.sps])
        if self.range_r <= 0:
            raise ConfigurationError(f"Communication range must be positive, got {self.range_r}")

    @property
    def n_paths(self) -> int:
        return len(self.sps)


@dataclass(frozen=True)
class ScenarioParams:
    l_paths: int = 5
    range_r: float = 50.0
    alpha: Optional[float] = None
    bias: Optional[float] = None
    bs: Tuple[float, float, float] = (0.0, 0.0, 0.0)
    # boxes as ((xmin, ymin, zmin), (xmax, ymax, zmax)); None means side 2R around the BS
    ue_region: Optional[Tuple[Tuple[float, ...], Tuple[float, ...]]] = None
    sp_region: Optional[Tuple[Tuple[float, ...], Tuple[float, ...]]] = None
    min_separation: float = 1.0

    def region(self, box):
        if box is None:
            bs = np.asarray(self.bs, dtype=float)
            return bs - self.range_r, bs + self.range_r
        lo, hi = (np.asarray(corner, dtype=float).reshape(3) for corner in box)
        if np.any(hi < lo):
            raise ConfigurationError(f"Region bounds are not well formed: {box}")
        return lo, hi

    def validate(self):
        if self.l_paths < 1:
            raise ConfigurationError(f"At least one path is needed, got {self.l_paths}")
        if self.range_r <= 0:
            raise ConfigurationError(f"Communication range must be positive, got {self.range_r}")
        if self.min_separation < 0:
            raise ConfigurationError("Minimum separation must be non-negative")
        self.region(self.ue_region)
        self.region(self.sp_region)
        return self


@dataclass(frozen=True)
class ErrorReport:
    ue_error_m: float
    alpha_error_rad: float
    bias_error_m: float
    sp_errors_m: List[float]
    radial_shift_m: float

    @property
    def mean_sp_error_m(self) -> float:
        return float(np.mean(self.sp_errors_m)) if self.sp_errors_m else 0.0

    def row(self):
        return {
            "ue_error": self.ue_error_m,
            "alpha_error": self.alpha_error_rad,
            "bias_error": self.bias_error_m,
            "mean_sp_error": self.mean_sp_error_m,
            "radial_shift": self.radial_shift_m,
        }


@dataclass(frozen=True)
class ExperimentParams:
    scenario: ScenarioParams = field(default_factory=ScenarioParams)
    noise: NoiseConfig = field(default_factory=NoiseConfig)
    estimator: EstimatorConfig = field(default_factory=EstimatorConfig)


def _uniform(rng, lo, hi):
    return lo + (hi - lo) * rng.random(3)


def generate_scenario(params: ScenarioParams, seed: int) -> Scenario:
    params = params.validate()
    rng = np.random.default_rng(np.random.SeedSequence([int(seed)]))
    bs = as_point(params.bs)
    ue_lo, ue_hi = params.region(params.ue_region)
    sp_lo, sp_hi = params.region(params.sp_region)

    for _ in range(MAX_ATTEMPTS):
        position = _uniform(rng, ue_lo, ue_hi)
        if np.linalg.norm(position - bs) <= params.range_r:
            break
    else:
        raise GenerationError("No UE position within range of the BS inside the UE region")

    alpha = params.alpha if params.alpha is not None else rng.uniform(0.0, TWO_PI)
    bias = params.bias if params.bias is not None else rng.uniform(0.0, params.range_r)

    # every path must fit the 2R window the estimator searches the bias in
    max_path = 2.0 * params.range_r
    sps = []
    for index in range(params.l_paths):
        for _ in range(MAX_ATTEMPTS):
            sp = _uniform(rng, sp_lo, sp_hi)
            d_bs = np.linalg.norm(sp - bs)
            d_ue = np.linalg.norm(sp - position)
            if min(d_bs, d_ue) >= max(params.min_separation, 1e-6) and d_bs + d_ue <= max_path:
                sps.append(sp)
                break
        else:
            raise GenerationError(f"Could not place scatter point {index} inside the SP region")

    return Scenario(
        bs=bs,
        ue=UeState(position, alpha, bias),
        sps=sps,
        range_r=params.range_r,
    )


def truth_as_result(scenario: Scenario) -> EstimateResult:
    return EstimateResult(
        hypothesis_star=Hypothesis(scenario.ue.orientation_alpha, scenario.ue.bias_b),
        mu_ue=scenario.ue.position.copy(),
        sigma_ue=np.zeros((3, 3)),
        sp_estimates=[sp.copy() for sp in scenario.sps],
        metric_star=0.0,
        feasible_fraction=1.0,
    )


def _radial(estimate_point, truth, bs):
    toward_bs = bs - truth
    norm = np.linalg.norm(toward_bs)
    if norm == 0:
        return 0.0
    return float((estimate_point - truth) @ (toward_bs / norm))


def score(scenario: Scenario, result: EstimateResult) -> ErrorReport:
    if len(result.sp_estimates) != scenario.n_paths:
        raise ConfigurationError(
            f"Estimate has {len(result.sp_estimates)} scatter points, "
            f"scenario has {scenario.n_paths}"
        )

    truth_ue = scenario.ue.position
    est_ue = as_point(result.mu_ue)
    sp_errors = [
        float(np.linalg.norm(as_point(est) - sp))
        for est, sp in zip(result.sp_estimates, scenario.sps)
    ]

    shifts = [_radial(est_ue, truth_ue, scenario.bs)]
    shifts.extend(
        _radial(as_point(est), sp, scenario.bs)
        for est, sp in zip(result.sp_estimates, scenario.sps)
    )

    return ErrorReport(
        ue_error_m=float(np.linalg.norm(est_ue - truth_ue)),
        alpha_error_rad=circular_difference(
            result.hypothesis_star.alpha, scenario.ue.orientation_alpha
        ),
        bias_error_m=abs(result.hypothesis_star.bias - scenario.ue.bias_b),
        sp_errors_m=sp_errors,
        radial_shift_m=float(np.mean(shifts)),
    )


def nearest_rank(values, q: float) -> float:
    """Nearest-rank quantile: the smallest value with at least q of the data at or below it."""
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        return math.nan
    return float(np.quantile(values, q, method="inverted_cdf"))


def trial_seeds(seed: int, trial: int):
    state = np.random.SeedSequence([int(seed), int(trial)]).generate_state(3)
    scenario_seed, noise_seed, sample_seed = state
    return int(scenario_seed), int(noise_seed), int(sample_seed)


def run_trial(params: ExperimentParams, seed: int, trial: int) -> dict:
    scenario_seed, noise_seed, sample_seed = trial_seeds(seed, trial)
    row = {"trial": trial, **{name: math.nan for name in ERROR_FIELDS}}
    try:
        scenario = generate_scenario(params.scenario, scenario_seed)
        measurements = synthesize(scenario, params.noise.covariance(), noise_seed)
        config = replace(params.estimator, seed=sample_seed, range_r=scenario.range_r)
        result = estimate(measurements, scenario.bs, config)
        report = score(scenario, result)
    except NLOSError as exc:
        logger.warning("Trial %d failed: %s", trial, exc)
        row["status"] = f"failed:{exc.__class__.__name__}"
        return row
    except Exception as exc:
        logger.error("Trial %d failed unexpectedly: %s: %s", trial, exc.__class__.__name__, exc)
        row["status"] = f"failed:{exc.__class__.__name__}"
        return row

    row.update(report.row())
    row["status"] = "ok"
    row["alpha_span"] = result.diagnostics["alpha_span"]
    row["bias_span"] = result.diagnostics["bias_span"]
    return row


def _ratio_median(rows, error, span):
    ratios = [row[error] / row[span] for row in rows if row.get(span)]
    return nearest_rank(ratios, 0.5)


def summarize(rows) -> dict:
    ok = [row for row in rows if row["status"] == "ok"]
    summary = {
        "trials": len(rows),
        "failures": len(rows) - len(ok),
    }
    for name in ERROR_FIELDS:
        values = [row[name] for row in ok]
        summary[name] = {"median": nearest_rank(values, 0.5), "p90": nearest_rank(values, 0.9)}

    summary["alpha_error_over_span_median"] = _ratio_median(ok, "alpha_error", "alpha_span")
    summary["bias_error_over_span_median"] = _ratio_median(ok, "bias_error", "bias_span")
    return summary


def monte_carlo(params: ExperimentParams, trials: int, seed: int, workers: int = 1):
    """Run independent trials; returns (rows, summary).

    Each trial derives its scenario, noise and sampling seeds from (seed, trial)
    alone, so results do not depend on scheduling.
    """
    if trials < 1:
        raise ConfigurationError(f"Number of trials must be at least 1, got {trials}")

    logger.info("Running %d Monte Carlo trials with seed %d", trials, seed)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(run_trial, [params] * trials, [seed] * trials, range(trials)))
    else:
        rows = [run_trial(params, seed, trial) for trial in range(trials)]

    return rows, summarize(rows)
