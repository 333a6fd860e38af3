# -*- coding: utf-8 -*-
"""Hypothesis evaluation by geometric consistency, search and map recovery."""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from dataclasses import field
from typing import List
from typing import Optional
from typing import Sequence

import numpy as np

from .exceptions import ConfigurationError
from .exceptions import EstimationFailure
from .geometry import TWO_PI
from .geometry import PairPoint
from .geometry import arrival_directions
from .geometry import as_point
from .geometry import closest_points
from .geometry import departure_directions
from .geometry import wrap_angle
from .measurement import AOA_AZ
from .measurement import AOA_EL
from .measurement import AOD_AZ
from .measurement import AOD_EL
from .measurement import TOA
from .measurement import MeasurementSampleSet
from .measurement import draw_samples

logger = logging.getLogger(__name__)

DEFAULT_ALPHA_NODES = 72
DEFAULT_BIAS_NODES = 41
# keeps the largest bias hypothesis short of the smallest TOA
BIAS_MARGIN = 0.1


@dataclass(frozen=True)
class Hypothesis:
    alpha: float
    bias: float

    def __post_init__(self):
        object.__setattr__(self, "alpha", wrap_angle(float(self.alpha)))
        object.__setattr__(self, "bias", float(self.bias))


@dataclass(frozen=True, eq=False)
class HypothesisEvaluation:
    hypothesis: Hypothesis
    metric: float
    mu_ue: np.ndarray
    sigma_ue: np.ndarray
    feasible_fraction: float
    pairs: tuple = ()
    distances: np.ndarray = field(default=None, repr=False)
    midpoints: np.ndarray = field(default=None, repr=False)
    used: np.ndarray = field(default=None, repr=False)
    # per-path segment endpoints, shape (L, n_s, 3), and their feasibility mask
    near: np.ndarray = field(default=None, repr=False)
    far: np.ndarray = field(default=None, repr=False)
    segment_feasible: np.ndarray = field(default=None, repr=False)

    @property
    def feasible(self) -> bool:
        return math.isfinite(self.metric)

    @property
    def pair_points(self) -> List[PairPoint]:
        points = []
        for k, pair in enumerate(self.pairs):
            for n in np.flatnonzero(self.used[k]):
                points.append(
                    PairPoint(
                        distance=float(self.distances[k, n]),
                        midpoint=self.midpoints[k, n].copy(),
                        pair=pair,
                        sample_index=int(n),
                    )
                )
        return points


@dataclass(frozen=True, eq=False)
class ErrorSurface:
    alpha_grid: np.ndarray
    bias_grid: np.ndarray
    metric: np.ndarray  # (len(alpha_grid), len(bias_grid))
    argmin: Hypothesis
    argmin_index: tuple = (0, 0)

    @property
    def shape(self):
        return self.metric.shape


@dataclass(frozen=True)
class RefineOptions:
    alpha_step: float = 0.05
    bias_step: float = 1.0
    alpha_tol: float = 1e-4
    bias_tol: float = 1e-3
    shrink: float = 0.5
    max_iter: int = 1000
    directions: int = 8

    def validate(self):
        if self.alpha_step <= 0 or self.bias_step <= 0:
            raise ConfigurationError("Refinement steps must be positive")
        if not 0 < self.shrink < 1:
            raise ConfigurationError(f"Shrink factor must be in (0, 1), got {self.shrink}")
        if self.directions < 4 or self.directions % 4:
            raise ConfigurationError("Number of poll directions must be a multiple of 4")
        if self.max_iter < 0:
            raise ConfigurationError("Iteration cap must be non-negative")
        return self


@dataclass(frozen=True)
class EstimatorConfig:
    n_s: int = 10
    seed: int = 0
    range_r: float = 50.0
    alpha_grid: Optional[Sequence[float]] = None
    bias_grid: Optional[Sequence[float]] = None
    search: str = "grid"
    coarse_bias: Optional[float] = None
    refine: bool = True
    refine_options: Optional[RefineOptions] = None
    workers: int = 1

    def validate(self):
        if self.n_s < 1:
            raise ConfigurationError(f"Number of samples must be at least 1, got {self.n_s}")
        if self.range_r <= 0:
            raise ConfigurationError(f"Communication range must be positive, got {self.range_r}")
        if self.search not in ("grid", "coarse"):
            raise ConfigurationError(f"Unknown search strategy: {self.search}")
        if self.workers < 1:
            raise ConfigurationError("Number of workers must be at least 1")
        return self


@dataclass(frozen=True, eq=False)
class EstimateResult:
    hypothesis_star: Hypothesis
    mu_ue: np.ndarray
    sigma_ue: np.ndarray
    sp_estimates: List[np.ndarray]
    metric_star: float
    feasible_fraction: float
    surface: Optional[ErrorSurface] = None
    diagnostics: dict = field(default_factory=dict)


def _segments(samples: np.ndarray, bs: np.ndarray, h: Hypothesis):
    rho = samples[..., TOA] - h.bias
    feasible = rho > 0
    rho = np.where(feasible, rho, 1.0)[..., None]

    near = bs + rho * departure_directions(samples[..., AOD_AZ], samples[..., AOD_EL])
    far = bs + rho * arrival_directions(samples[..., AOA_AZ], samples[..., AOA_EL], h.alpha)
    return near, far, feasible


def evaluate(samples: MeasurementSampleSet, bs, h: Hypothesis) -> HypothesisEvaluation:
    n_paths = samples.n_paths
    if n_paths < 2:
        raise ConfigurationError(f"At least two paths are needed, got {n_paths}")

    bs = as_point(bs)
    near, far, feasible = _segments(samples.samples, bs, h)

    li, lj = np.triu_indices(n_paths, 1)
    _, _, cp, cq = closest_points(near[li], far[li], near[lj], far[lj])
    distances = np.linalg.norm(cp - cq, axis=-1)
    midpoints = 0.5 * (cp + cq)
    used = feasible[li] & feasible[lj]
    pairs = tuple(zip(li.tolist(), lj.tolist()))

    details = dict(
        pairs=pairs,
        distances=distances,
        midpoints=midpoints,
        used=used,
        near=near,
        far=far,
        segment_feasible=feasible,
    )

    count = int(used.sum())
    if count == 0:
        return HypothesisEvaluation(
            h, math.inf, np.full(3, np.nan), np.full((3, 3), np.nan), 0.0, **details
        )

    points = midpoints[used]
    mu = points.sum(axis=0) / count
    deviations = points - mu
    sigma = deviations.T @ deviations / count
    sigma = 0.5 * (sigma + sigma.T)

    return HypothesisEvaluation(
        hypothesis=h,
        metric=float(distances[used].sum() / count),
        mu_ue=mu,
        sigma_ue=sigma,
        feasible_fraction=count / used.size,
        **details,
    )


def _grid(values, name):
    grid = np.atleast_1d(np.asarray(values, dtype=float))
    if grid.ndim != 1 or grid.size == 0:
        raise ConfigurationError(f"{name} grid must be a nonempty list of values")
    if not np.all(np.isfinite(grid)):
        raise ConfigurationError(f"{name} grid has non-finite values")
    if np.any(np.diff(grid) <= 0):
        raise ConfigurationError(f"{name} grid must be strictly increasing")
    return grid


def _argmin(metric: np.ndarray):
    finite = np.isfinite(metric)
    if not finite.any():
        return None
    best = metric[finite].min()
    # smallest bias first, then smallest alpha
    candidates = np.argwhere(metric == best)
    i, j = min(candidates.tolist(), key=lambda ij: (ij[1], ij[0]))
    return i, j


def grid_search(samples, bs, alpha_grid, bias_grid, workers: int = 1) -> ErrorSurface:
    alpha_grid = _grid(alpha_grid, "Alpha")
    bias_grid = _grid(bias_grid, "Bias")
    bs = as_point(bs)

    if bias_grid[-1] >= samples.min_toa:
        logger.warning(
            "Bias grid reaches %.4f m, beyond the smallest TOA %.4f m; those nodes lose paths",
            bias_grid[-1],
            samples.min_toa,
        )

    nodes = [(i, j) for i in range(alpha_grid.size) for j in range(bias_grid.size)]

    def _node(ij):
        i, j = ij
        return evaluate(samples, bs, Hypothesis(alpha_grid[i], bias_grid[j])).metric

    logger.info("Evaluating %dx%d hypothesis grid", alpha_grid.size, bias_grid.size)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            values = list(pool.map(_node, nodes))
    else:
        values = [_node(ij) for ij in nodes]

    metric = np.asarray(values, dtype=float).reshape(alpha_grid.size, bias_grid.size)

    index = _argmin(metric)
    if index is None:
        raise EstimationFailure("No feasible hypothesis on the search grid")

    i, j = index
    return ErrorSurface(
        alpha_grid=alpha_grid,
        bias_grid=bias_grid,
        metric=metric,
        argmin=Hypothesis(alpha_grid[i], bias_grid[j]),
        argmin_index=(i, j),
    )


def _poll_directions(count):
    angles = np.arange(count) * TWO_PI / count
    directions = np.round(np.stack([np.cos(angles), np.sin(angles)], axis=1), 12)
    return directions / np.abs(directions).max(axis=1, keepdims=True)


def refine(samples, bs, start: Hypothesis, options: RefineOptions = None, trace=None):
    """Pattern search over (alpha, bias) with shrinking steps.

    Accepted points are appended to `trace` as (alpha, bias, metric) when a
    list is given; the metric along the trace never increases.
    """
    options = (options or RefineOptions()).validate()
    bs = as_point(bs)
    directions = _poll_directions(options.directions)

    current = start
    value = evaluate(samples, bs, current).metric
    if trace is not None:
        trace.append((current.alpha, current.bias, value))

    alpha_step, bias_step = options.alpha_step, options.bias_step
    for iteration in range(options.max_iter):
        if alpha_step < options.alpha_tol and bias_step < options.bias_tol:
            break

        candidates = [
            Hypothesis(current.alpha + alpha_step * da, current.bias + bias_step * db)
            for da, db in directions
        ]
        values = [evaluate(samples, bs, h).metric for h in candidates]
        best = int(np.argmin(values))

        if values[best] < value:
            current, value = candidates[best], values[best]
            if trace is not None:
                trace.append((current.alpha, current.bias, value))
        else:
            alpha_step *= options.shrink
            bias_step *= options.shrink
    else:
        logger.info("Refinement stopped at the iteration cap (%d)", options.max_iter)

    logger.debug("Refined %s to %s, metric %.6g", start, current, value)
    return current


def _recover_sp(meas, h_star, mu_ue, bs):
    rho = meas.toa - h_star.bias
    u = departure_directions(meas.z[AOD_AZ], meas.z[AOD_EL])
    q = mu_ue - bs

    denom = 2.0 * (rho - float(u @ q))
    if rho > 0 and denom > 0:
        d = (rho * rho - float(q @ q)) / denom
        if 0 < d < rho:
            return bs + d * u, False

    # intersect the departure ray with the arrival ray traced back from the UE
    reach = rho if rho > 0 else 2.0 * float(np.linalg.norm(q)) + 1.0
    v = arrival_directions(meas.z[AOA_AZ], meas.z[AOA_EL], h_star.alpha)
    _, _, cp, cq = closest_points(bs, bs + reach * u, mu_ue, mu_ue - reach * v)
    return 0.5 * (cp + cq), True


def recover_sps(measurements, h_star: Hypothesis, mu_ue, bs, fallbacks=None):
    """Scatter point per path on its departure ray, consistent with the path delay.

    Paths that cannot satisfy the delay constraint fall back to the closest
    point between the departure and arrival rays; their flags are appended to
    `fallbacks` when a list is given.
    """
    bs = as_point(bs)
    mu_ue = as_point(mu_ue)

    sps = []
    for index, meas in enumerate(measurements):
        sp, fallback = _recover_sp(meas, h_star, mu_ue, bs)
        if fallback:
            logger.warning("Path %d: delay constraint unsatisfiable, using ray fallback", index)
        if fallbacks is not None:
            fallbacks.append(fallback)
        sps.append(sp)
    return sps


def default_grids(measurements, range_r: float):
    tau_min = min(meas.toa for meas in measurements)
    upper = tau_min - BIAS_MARGIN
    lower = max(0.0, tau_min - 2.0 * range_r)
    if upper <= lower:
        raise EstimationFailure(
            f"No feasible bias window: smallest TOA is {tau_min:.4f} m"
        )

    alpha_grid = np.arange(DEFAULT_ALPHA_NODES) * (TWO_PI / DEFAULT_ALPHA_NODES)
    bias_grid = np.linspace(lower, upper, DEFAULT_BIAS_NODES)
    return alpha_grid, bias_grid


def search_grids(measurements, config: EstimatorConfig):
    """Configured grids, falling back to the defaults derived from the measurements."""
    alpha_grid = config.alpha_grid
    bias_grid = config.bias_grid
    if alpha_grid is None or bias_grid is None:
        default_alpha, default_bias = default_grids(measurements, config.range_r)
        alpha_grid = default_alpha if alpha_grid is None else alpha_grid
        bias_grid = default_bias if bias_grid is None else bias_grid
    return _grid(alpha_grid, "Alpha"), _grid(bias_grid, "Bias")


def _spacing(grid, fallback):
    return float(np.min(np.diff(grid))) if len(grid) > 1 else fallback


def estimate(measurements, bs, config: EstimatorConfig = None) -> EstimateResult:
    config = (config or EstimatorConfig()).validate()
    if len(measurements) < 2:
        raise ConfigurationError(f"At least two paths are needed, got {len(measurements)}")

    bs = as_point(bs)
    samples = draw_samples(measurements, config.n_s, config.seed)

    alpha_grid, bias_grid = search_grids(measurements, config)

    if config.search == "coarse":
        coarse_bias = config.coarse_bias
        if coarse_bias is None:
            coarse_bias = 0.5 * (bias_grid[0] + bias_grid[-1])
        surface = grid_search(samples, bs, alpha_grid, [coarse_bias], workers=config.workers)
    else:
        surface = grid_search(samples, bs, alpha_grid, bias_grid, workers=config.workers)

    options = config.refine_options or RefineOptions(
        alpha_step=_spacing(alpha_grid, RefineOptions.alpha_step),
        bias_step=_spacing(bias_grid, RefineOptions.bias_step),
    )

    trace = []
    if config.refine:
        h_star = refine(samples, bs, surface.argmin, options, trace=trace)
    else:
        h_star = surface.argmin

    final = evaluate(samples, bs, h_star)
    if not final.feasible:
        raise EstimationFailure(f"Hypothesis {h_star} has no feasible path pair")

    fallbacks = []
    sps = recover_sps(measurements, h_star, final.mu_ue, bs, fallbacks=fallbacks)

    logger.info(
        "Estimate alpha=%.6f rad bias=%.4f m metric=%.6g", h_star.alpha, h_star.bias, final.metric
    )

    diagnostics = {
        "search": config.search,
        "n_s": config.n_s,
        "seed": config.seed,
        "grid_argmin": [surface.argmin.alpha, surface.argmin.bias],
        "alpha_span": float(alpha_grid[-1] - alpha_grid[0]),
        "bias_span": float(bias_grid[-1] - bias_grid[0]),
        "refinement_trace": [list(step) for step in trace],
        "sp_fallback": fallbacks,
        "feasible_fraction": final.feasible_fraction,
    }

    return EstimateResult(
        hypothesis_star=h_star,
        mu_ue=final.mu_ue,
        sigma_ue=final.sigma_ue,
        sp_estimates=sps,
        metric_star=final.metric,
        feasible_fraction=final.feasible_fraction,
        surface=surface,
        diagnostics=diagnostics,
    )
