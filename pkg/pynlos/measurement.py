# -*- coding: utf-8 -*-
"""Noisy path measurements and the per-seed sample sets used by the estimator."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .exceptions import ConfigurationError
from .geometry import forward_path
from .geometry import reflect_elevation
from .geometry import wrap_angle

logger = logging.getLogger(__name__)

# component layout of z: toa, aoa_az, aoa_el, aod_az, aod_el
TOA, AOA_AZ, AOA_EL, AOD_AZ, AOD_EL = range(5)
AZIMUTHS = (AOA_AZ, AOD_AZ)
ELEVATIONS = (AOA_EL, AOD_EL)

SYMMETRY_TOL = 1e-12

# stream tags keep noise synthesis and sampling draws apart for the same seed
_SYNTHESIS_STREAM = 1
_SAMPLING_STREAM = 2


def stream(seed, *key) -> np.random.Generator:
    """Independent generator for (seed, key...), regardless of call order."""
    return np.random.default_rng(np.random.SeedSequence([int(seed), *map(int, key)]))


def validate_covariance(sigma) -> np.ndarray:
    sigma = np.asarray(sigma, dtype=float)
    if sigma.shape != (5, 5):
        raise ConfigurationError(f"Covariance must be 5x5, got shape {sigma.shape}")
    if not np.all(np.isfinite(sigma)):
        raise ConfigurationError("Covariance has non-finite entries")
    if np.max(np.abs(sigma - sigma.T)) > SYMMETRY_TOL:
        raise ConfigurationError("Covariance is not symmetric")
    if np.any(np.diag(sigma) < 0):
        raise ConfigurationError("Covariance has negative variances")
    scale = max(1.0, float(np.trace(sigma)))
    if np.linalg.eigvalsh(sigma).min() < -SYMMETRY_TOL * scale:
        raise ConfigurationError("Covariance is not positive semidefinite")
    return sigma


def noise_factor(sigma) -> np.ndarray:
    """Matrix F with F F^T = sigma; zero covariance gives F = 0."""
    values, vectors = np.linalg.eigh(np.asarray(sigma, dtype=float))
    return vectors * np.sqrt(np.clip(values, 0.0, None))


def canonicalize(z) -> np.ndarray:
    """Wrap azimuths to [0, 2pi) and reflect elevations into [-pi/2, pi/2]."""
    z = np.array(z, dtype=float)
    for i in AZIMUTHS:
        z[..., i] = wrap_angle(z[..., i])
    for i in ELEVATIONS:
        z[..., i] = reflect_elevation(z[..., i])
    return z


@dataclass(frozen=True)
class NoiseConfig:
    toa_std: float = 0.1
    angle_std: float = 0.01

    def covariance(self) -> np.ndarray:
        if self.toa_std < 0 or self.angle_std < 0:
            raise ConfigurationError("Noise standard deviations must be non-negative")
        return np.diag([self.toa_std, *([self.angle_std] * 4)]) ** 2


@dataclass(frozen=True)
class PathMeasurement:
    z: np.ndarray
    sigma: np.ndarray

    def __post_init__(self):
        z = np.asarray(self.z, dtype=float).reshape(5)
        if not np.all(np.isfinite(z)):
            raise ConfigurationError(f"Measurement has non-finite entries: {z.tolist()}")
        object.__setattr__(self, "z", z)
        object.__setattr__(self, "sigma", validate_covariance(self.sigma))

    @property
    def toa(self) -> float:
        return float(self.z[TOA])

    @property
    def is_diagonal(self) -> bool:
        return not np.any(self.sigma - np.diag(np.diag(self.sigma)))


@dataclass(frozen=True)
class MeasurementSampleSet:
    samples: np.ndarray  # (L, n_s, 5)
    seed: int
    n_s: int

    @property
    def n_paths(self) -> int:
        return self.samples.shape[0]

    @property
    def min_toa(self) -> float:
        return float(self.samples[:, 0, TOA].min())


def _covariances(sigma_per_path, n_paths):
    sigmas = np.asarray(sigma_per_path, dtype=float)
    if sigmas.shape == (5, 5):
        sigmas = np.broadcast_to(sigmas, (n_paths, 5, 5))
    if sigmas.shape != (n_paths, 5, 5):
        raise ConfigurationError(
            f"Expected {n_paths} covariances of shape 5x5, got array of shape {sigmas.shape}"
        )
    return [validate_covariance(s) for s in sigmas]


def synthesize(scenario, sigma_per_path, seed: int):
    """One noisy measurement per scatter point of the scenario."""
    if not scenario.sps:
        raise ConfigurationError("Scenario has no scatter points")

    sigmas = _covariances(sigma_per_path, len(scenario.sps))
    measurements = []
    for index, (sp, sigma) in enumerate(zip(scenario.sps, sigmas)):
        truth = forward_path(scenario.bs, scenario.ue, sp).as_vector()
        noise = stream(seed, _SYNTHESIS_STREAM, index).standard_normal(5) @ noise_factor(sigma).T
        measurements.append(PathMeasurement(canonicalize(truth + noise), sigma))

    logger.debug("Synthesized %d path measurements with seed %d", len(measurements), seed)
    return measurements


def draw_samples(measurements, n_s: int, seed: int) -> MeasurementSampleSet:
    """Sample set shared by every hypothesis; sample 0 of each path is its mean."""
    if n_s < 1:
        raise ConfigurationError(f"Number of samples must be at least 1, got {n_s}")
    if not measurements:
        raise ConfigurationError("No measurements to sample from")

    samples = np.empty((len(measurements), n_s, 5))
    for path, meas in enumerate(measurements):
        samples[path, 0] = meas.z
        factor = noise_factor(meas.sigma)
        for n in range(1, n_s):
            draw = stream(seed, _SAMPLING_STREAM, path, n).standard_normal(5)
            samples[path, n] = canonicalize(meas.z + draw @ factor.T)

    samples.setflags(write=False)
    return MeasurementSampleSet(samples=samples, seed=int(seed), n_s=int(n_s))
