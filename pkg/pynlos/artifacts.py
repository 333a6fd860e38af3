# -*- coding: utf-8 -*-
"""JSON and CSV artifacts: scenarios, measurements, estimates, surfaces, experiments."""

import json
import math
from pathlib import Path

import numpy as np
import pandas as pd

from .estimator import ErrorSurface
from .estimator import EstimateResult
from .exceptions import ConfigurationError
from .geometry import UeState
from .measurement import PathMeasurement
from .simulator import ERROR_FIELDS
from .simulator import Scenario

EXPERIMENT_COLUMNS = ["trial", *ERROR_FIELDS, "status"]
POINT_COLUMNS = [
    "hypothesis",
    "alpha",
    "bias",
    "kind",
    "pair_l",
    "pair_l2",
    "sample",
    "distance",
    "x",
    "y",
    "z",
    "x_end",
    "y_end",
    "z_end",
]


def to_token(value):
    if value is None or isinstance(value, (bool, str)):
        return value

    elif isinstance(value, dict):
        return {str(k): to_token(v) for k, v in value.items()}

    elif isinstance(value, (list, tuple, np.ndarray)):
        return [to_token(v) for v in value]

    elif isinstance(value, (int, np.integer)):
        return int(value)

    elif isinstance(value, (float, np.floating)):
        # json has no inf/nan; they become null
        value = float(value)
        return value if math.isfinite(value) else None

    elif isinstance(value, np.bool_):
        return bool(value)

    raise TypeError(f"Cannot serialize {value.__class__.__name__}: {value!r}")


def dumps(document) -> str:
    return json.dumps(to_token(document), indent=2) + "\n"


def write_json(path, document):
    path = Path(path)
    path.write_text(dumps(document))
    return path


def read_json(path):
    return json.loads(Path(path).read_text())


def _vector(values, size, name):
    try:
        vector = np.asarray(values, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ConfigurationError(f"{name} must be a list of {size} numbers") from exc
    if vector.shape != (size,):
        raise ConfigurationError(f"{name} must have {size} entries, got shape {vector.shape}")
    if not np.all(np.isfinite(vector)):
        raise ConfigurationError(f"{name} has non-finite entries: {vector.tolist()}")
    return vector


def _scalar(value, name):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigurationError(f"{name} must be a number, got {value!r}")
    if not math.isfinite(value):
        raise ConfigurationError(f"{name} must be finite, got {value!r}")
    return float(value)


def _expect_keys(document, required, optional=(), name="document"):
    if not isinstance(document, dict):
        raise ConfigurationError(f"{name} must be a JSON object")
    missing = set(required) - set(document)
    unknown = set(document) - set(required) - set(optional)
    if missing:
        raise ConfigurationError(f"{name} is missing keys: {sorted(missing)}")
    if unknown:
        raise ConfigurationError(f"{name} has unknown keys: {sorted(unknown)}")


def scenario_to_dict(scenario: Scenario) -> dict:
    return {
        "bs": scenario.bs,
        "ue": {
            "pos": scenario.ue.position,
            "alpha": scenario.ue.orientation_alpha,
            "bias": scenario.ue.bias_b,
        },
        "sps": scenario.sps,
        "range_r": scenario.range_r,
    }


def scenario_from_dict(document) -> Scenario:
    _expect_keys(document, ("bs", "ue", "sps", "range_r"), name="scenario")
    _expect_keys(document["ue"], ("pos", "alpha", "bias"), name="scenario.ue")
    ue = document["ue"]
    if not isinstance(document["sps"], list):
        raise ConfigurationError("sps must be a list of points")
    return Scenario(
        bs=_vector(document["bs"], 3, "bs"),
        ue=UeState(
            _vector(ue["pos"], 3, "ue.pos"),
            _scalar(ue["alpha"], "ue.alpha"),
            _scalar(ue["bias"], "ue.bias"),
        ),
        sps=[_vector(sp, 3, "sp") for sp in document["sps"]],
        range_r=_scalar(document["range_r"], "range_r"),
    )


def measurements_to_list(measurements) -> list:
    """sigma_diag holds the variances on the covariance diagonal."""
    items = []
    for meas in measurements:
        if meas.is_diagonal:
            items.append({"z": meas.z, "sigma_diag": np.diag(meas.sigma)})
        else:
            items.append({"z": meas.z, "sigma_full": meas.sigma.reshape(25)})
    return items


def measurements_from_list(document) -> list:
    if not isinstance(document, list):
        raise ConfigurationError("Measurement document must be a JSON array")

    measurements = []
    for item in document:
        _expect_keys(item, ("z",), ("sigma_diag", "sigma_full"), name="measurement")
        if ("sigma_diag" in item) == ("sigma_full" in item):
            raise ConfigurationError("Measurement needs exactly one of sigma_diag, sigma_full")
        if "sigma_diag" in item:
            sigma = np.diag(_vector(item["sigma_diag"], 5, "sigma_diag"))
        else:
            sigma = _vector(item["sigma_full"], 25, "sigma_full").reshape(5, 5)
        measurements.append(PathMeasurement(_vector(item["z"], 5, "z"), sigma))
    return measurements


def estimate_to_dict(result: EstimateResult) -> dict:
    return {
        "alpha_star": result.hypothesis_star.alpha,
        "bias_star": result.hypothesis_star.bias,
        "mu_ue": result.mu_ue,
        "sigma_ue": np.asarray(result.sigma_ue).reshape(9),
        "sps": result.sp_estimates,
        "metric_star": result.metric_star,
        "feasible_fraction": result.feasible_fraction,
        "diagnostics": result.diagnostics,
    }


def surface_frame(surface: ErrorSurface) -> pd.DataFrame:
    alpha, bias = np.meshgrid(surface.alpha_grid, surface.bias_grid, indexing="ij")
    return pd.DataFrame(
        {
            "alpha": alpha.reshape(-1),
            "bias": bias.reshape(-1),
            "metric": surface.metric.reshape(-1),
        }
    )


def points_frame(evaluations) -> pd.DataFrame:
    """Segments and pair points for each (label, HypothesisEvaluation) in `evaluations`.

    Segment rows carry the AOD endpoint in x, y, z and the AOA endpoint in
    x_end, y_end, z_end. Pair rows carry the midpoint of the closest points.
    Infeasible samples and pairs are left out.
    """
    rows = []
    for label, evaluation in evaluations:
        head = {
            "hypothesis": label,
            "alpha": evaluation.hypothesis.alpha,
            "bias": evaluation.hypothesis.bias,
        }
        for path, sample in zip(*np.nonzero(evaluation.segment_feasible)):
            near = evaluation.near[path, sample]
            far = evaluation.far[path, sample]
            rows.append(
                {
                    **head,
                    "kind": "segment",
                    "pair_l": path,
                    "sample": sample,
                    **dict(zip(("x", "y", "z"), near)),
                    **dict(zip(("x_end", "y_end", "z_end"), far)),
                }
            )
        for point in evaluation.pair_points:
            rows.append(
                {
                    **head,
                    "kind": "pair",
                    "pair_l": point.pair[0],
                    "pair_l2": point.pair[1],
                    "sample": point.sample_index,
                    "distance": point.distance,
                    **dict(zip(("x", "y", "z"), point.midpoint)),
                }
            )

    frame = pd.DataFrame(rows, columns=POINT_COLUMNS)
    return frame.astype({"pair_l": "Int64", "pair_l2": "Int64", "sample": "Int64"})


def experiment_frame(rows) -> pd.DataFrame:
    return pd.DataFrame(
        [{column: row.get(column) for column in EXPERIMENT_COLUMNS} for row in rows],
        columns=EXPERIMENT_COLUMNS,
    )


def write_csv(path, frame: pd.DataFrame):
    path = Path(path)
    path.write_text(frame.to_csv(index=False, na_rep="nan"))
    return path
