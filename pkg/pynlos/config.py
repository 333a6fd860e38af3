# -*- coding: utf-8 -*-
"""Run configuration for the command line: defaults < preset < config file < flags."""

import math
from dataclasses import dataclass
from dataclasses import fields
from dataclasses import replace
from typing import Optional
from typing import Tuple

from .estimator import EstimatorConfig
from .exceptions import ConfigurationError
from .measurement import NoiseConfig
from .parser import GridParser
from .simulator import ExperimentParams
from .simulator import ScenarioParams

PRESETS = {
    "paper-s3": {
        "paths": 5,
        "alpha": math.pi / 3,
        "bias": 20.0,
        "range_r": 50.0,
        "toa_std": 0.1,
        "angle_std": 0.01,
        "ns": 10,
    },
}


def _integer(value):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise TypeError(f"expected an integer, got {value!r}")
    if value != int(value):
        raise ValueError(f"expected an integer, got {value!r}")
    return int(value)


def _real(value):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise TypeError(f"expected a number, got {value!r}")
    if not math.isfinite(value):
        raise ValueError(f"expected a finite number, got {value!r}")
    return float(value)


def _flag(value):
    if not isinstance(value, bool):
        raise TypeError(f"expected true or false, got {value!r}")
    return value


def _text(value):
    if not isinstance(value, str):
        raise TypeError(f"expected a string, got {value!r}")
    return value


def _reals(value, size):
    if isinstance(value, (str, dict)):
        raise TypeError(f"expected a list of {size} numbers, got {value!r}")
    values = tuple(_real(v) for v in value)
    if len(values) != size:
        raise ValueError(f"expected {size} numbers, got {len(values)}")
    return values


def _hypotheses(value):
    if isinstance(value, (str, dict)):
        raise TypeError(f"expected a list of [alpha, bias] pairs, got {value!r}")
    return tuple(_reals(pair, 2) for pair in value)


CONVERTERS = {
    "seed": _integer,
    "ns": _integer,
    "paths": _integer,
    "trials": _integer,
    "workers": _integer,
    "alpha": _real,
    "bias": _real,
    "range_r": _real,
    "toa_std": _real,
    "angle_std": _real,
    "noise_free": _flag,
    "refine": _flag,
    "bs": lambda value: _reals(value, 3),
    "hypotheses": _hypotheses,
}


@dataclass(frozen=True)
class RunConfig:
    preset: Optional[str] = None
    seed: int = 0
    ns: int = 10
    out: Optional[str] = None
    scenario: Optional[str] = None
    measurements: Optional[str] = None
    paths: int = 5
    alpha: Optional[float] = None
    bias: Optional[float] = None
    range_r: float = 50.0
    bs: Tuple[float, float, float] = (0.0, 0.0, 0.0)
    toa_std: float = 0.1
    angle_std: float = 0.01
    noise_free: bool = False
    alpha_grid: Optional[str] = None
    bias_grid: Optional[str] = None
    search: str = "grid"
    refine: bool = True
    emit_surface: Optional[str] = None
    emit_points: Optional[str] = None
    hypotheses: Tuple[Tuple[float, float], ...] = ()
    trials: int = 100
    summary: Optional[str] = None
    workers: int = 1

    @classmethod
    def keys(cls):
        return {f.name for f in fields(cls)}

    @classmethod
    def from_sources(cls, config_file=None, flags=None):
        """Merge the sources; `None` flag values count as not given."""
        config_file = dict(config_file or {})
        flags = {k: v for k, v in (flags or {}).items() if v is not None}

        for name, source in (("config file", config_file), ("flags", flags)):
            unknown = set(source) - cls.keys()
            if unknown:
                raise ConfigurationError(f"Unknown keys in {name}: {sorted(unknown)}")

        preset = flags.get("preset", config_file.get("preset"))
        values = {}
        if preset is not None:
            if not isinstance(preset, str) or preset not in PRESETS:
                raise ConfigurationError(
                    f"Unknown preset {preset!r}, expected one of {sorted(PRESETS)}"
                )
            values.update(PRESETS[preset])
        values.update(config_file)
        values.update(flags)

        defaults = {f.name: f.default for f in fields(cls)}
        for key, value in values.items():
            if value is None and defaults[key] is None:
                continue
            try:
                values[key] = CONVERTERS.get(key, _text)(value)
            except (TypeError, ValueError, OverflowError) as exc:
                raise ConfigurationError(f"Invalid value for {key!r}: {exc}") from exc

        return cls(**values).validate()

    def validate(self):
        if self.ns < 1:
            raise ConfigurationError(f"--ns must be at least 1, got {self.ns}")
        if self.paths < 1:
            raise ConfigurationError(f"--paths must be at least 1, got {self.paths}")
        if self.trials < 1:
            raise ConfigurationError(f"--trials must be at least 1, got {self.trials}")
        if self.range_r <= 0:
            raise ConfigurationError(f"--range must be positive, got {self.range_r}")
        if self.toa_std < 0 or self.angle_std < 0:
            raise ConfigurationError("Noise standard deviations must be non-negative")
        if self.search not in ("grid", "coarse"):
            raise ConfigurationError(f"Unknown search strategy: {self.search}")
        if self.workers < 1:
            raise ConfigurationError(f"--workers must be at least 1, got {self.workers}")
        if self.emit_surface and self.search == "coarse":
            raise ConfigurationError(
                "--emit-surface needs the full grid search; use --search grid or the sweep command"
            )
        # surfaces syntax errors before any computation
        self.grids()
        return self

    def grids(self):
        parser = GridParser()
        alpha_grid = parser.parse(self.alpha_grid) if self.alpha_grid else None
        bias_grid = parser.parse(self.bias_grid) if self.bias_grid else None
        return alpha_grid, bias_grid

    def noise(self) -> NoiseConfig:
        if self.noise_free:
            return NoiseConfig(0.0, 0.0)
        return NoiseConfig(self.toa_std, self.angle_std)

    def scenario_params(self) -> ScenarioParams:
        return ScenarioParams(
            l_paths=self.paths,
            range_r=self.range_r,
            alpha=self.alpha,
            bias=self.bias,
            bs=self.bs,
        )

    def estimator_config(self, range_r=None) -> EstimatorConfig:
        alpha_grid, bias_grid = self.grids()
        return EstimatorConfig(
            n_s=self.ns,
            seed=self.seed,
            range_r=self.range_r if range_r is None else range_r,
            alpha_grid=alpha_grid,
            bias_grid=bias_grid,
            search=self.search,
            refine=self.refine,
            workers=self.workers,
        )

    def experiment_params(self) -> ExperimentParams:
        return ExperimentParams(
            scenario=self.scenario_params(),
            noise=self.noise(),
            # parallelism is per trial
            estimator=replace(self.estimator_config(), workers=1),
        )
