# -*- coding: utf-8 -*-

import argparse
import json
import logging
import sys
from pathlib import Path

from . import artifacts
from .config import PRESETS
from .config import RunConfig
from .estimator import Hypothesis
from .estimator import estimate
from .estimator import evaluate
from .estimator import grid_search
from .estimator import search_grids
from .exceptions import ConfigurationError
from .exceptions import EstimationFailure
from .exceptions import GenerationError
from .exceptions import NLOSError
from .measurement import draw_samples
from .measurement import synthesize
from .simulator import generate_scenario
from .simulator import monte_carlo

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_ESTIMATION = 3
EXIT_IO = 4

DEFAULT_OUT = {
    "generate": "scenario.json",
    "measure": "measurements.json",
    "estimate": "estimate.json",
    "sweep": "surface.csv",
    "experiment": "experiment.csv",
}


def _bs(text):
    try:
        values = tuple(float(v) for v in text.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected x,y,z, got {text!r}") from exc
    if len(values) != 3:
        raise argparse.ArgumentTypeError(f"expected x,y,z, got {text!r}")
    return values


def _hypothesis(text):
    try:
        alpha, bias = (float(v) for v in text.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected alpha,bias, got {text!r}") from exc
    return alpha, bias


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file with run configuration")
    common.add_argument("--preset", choices=sorted(PRESETS))
    common.add_argument("--seed", type=int)
    common.add_argument("--ns", type=int, help="samples per path")
    common.add_argument("--out", help="output file")
    common.add_argument("-v", "--verbose", action="count", default=0)

    scene = argparse.ArgumentParser(add_help=False)
    scene.add_argument("--paths", type=int, help="number of NLOS paths")
    scene.add_argument("--alpha", type=float, help="UE orientation (rad)")
    scene.add_argument("--bias", type=float, help="clock bias (m)")
    scene.add_argument("--range", dest="range_r", type=float, help="communication range (m)")
    scene.add_argument("--bs", type=_bs, help="BS position x,y,z (m)")

    noise = argparse.ArgumentParser(add_help=False)
    noise.add_argument("--toa-std", type=float, help="TOA standard deviation (m)")
    noise.add_argument("--angle-std", type=float, help="angle standard deviation (rad)")
    noise.add_argument("--noise-free", action="store_const", const=True, default=None)

    inputs = argparse.ArgumentParser(add_help=False)
    inputs.add_argument("--scenario", help="scenario JSON")
    inputs.add_argument("--measurements", help="measurement JSON")

    search = argparse.ArgumentParser(add_help=False)
    search.add_argument("--alpha-grid", help="start:stop:count")
    search.add_argument("--bias-grid", help="start:stop:count")
    search.add_argument("--search", choices=["grid", "coarse"])
    search.add_argument("--workers", type=int)

    points = argparse.ArgumentParser(add_help=False)
    points.add_argument("--emit-points", help="write segments and pair points to this CSV")
    points.add_argument(
        "--hypothesis",
        dest="hypotheses",
        type=_hypothesis,
        action="append",
        help="extra alpha,bias hypothesis for --emit-points (repeatable)",
    )

    parser = argparse.ArgumentParser(
        prog="pynlos",
        description="NLOS-only positioning, synchronization and mapping",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    commands.add_parser("generate", parents=[common, scene], help="write a scenario")
    commands.add_parser(
        "measure", parents=[common, inputs, noise], help="synthesize noisy measurements"
    )

    cmd = commands.add_parser(
        "estimate",
        parents=[common, inputs, scene, noise, search, points],
        help="estimate UE and map",
    )
    cmd.add_argument("--emit-surface", help="also write the error surface CSV")
    cmd.add_argument("--no-refine", dest="refine", action="store_const", const=False)

    commands.add_parser(
        "sweep",
        parents=[common, inputs, scene, noise, search, points],
        help="write the error surface",
    )

    cmd = commands.add_parser(
        "experiment", parents=[common, scene, noise, search], help="run Monte Carlo trials"
    )
    cmd.add_argument("--trials", type=int)
    cmd.add_argument("--summary", help="summary JSON (default: --out with .json suffix)")
    cmd.add_argument("--no-refine", dest="refine", action="store_const", const=False)

    return parser


def _output(config, command):
    return Path(config.out or DEFAULT_OUT[command])


def _inputs(config):
    """Measurements, BS position, range and the scenario (if given) for estimate/sweep."""
    scenario = None
    if config.scenario:
        scenario = artifacts.scenario_from_dict(artifacts.read_json(config.scenario))

    if config.measurements:
        measurements = artifacts.measurements_from_list(artifacts.read_json(config.measurements))
    elif scenario is not None:
        measurements = synthesize(scenario, config.noise().covariance(), config.seed)
    else:
        raise ConfigurationError("Either --scenario or --measurements is required")

    if scenario is not None:
        return measurements, scenario.bs, scenario.range_r, scenario
    return measurements, config.bs, config.range_r, None


def _write_points(config, samples, bs, found, scenario):
    """Segments and pair points for the found hypothesis, the truth and any given ones."""
    hypotheses = [found]
    if scenario is not None:
        hypotheses.append(("truth", Hypothesis(scenario.ue.orientation_alpha, scenario.ue.bias_b)))
    hypotheses.extend(("given", Hypothesis(alpha, bias)) for alpha, bias in config.hypotheses)

    evaluations = [(label, evaluate(samples, bs, h)) for label, h in hypotheses]
    return artifacts.write_csv(config.emit_points, artifacts.points_frame(evaluations))


def cmd_generate(config):
    scenario = generate_scenario(config.scenario_params(), config.seed)
    document = artifacts.scenario_to_dict(scenario)
    return [artifacts.write_json(_output(config, "generate"), document)]


def cmd_measure(config):
    if not config.scenario:
        raise ConfigurationError("--scenario is required")
    scenario = artifacts.scenario_from_dict(artifacts.read_json(config.scenario))
    measurements = synthesize(scenario, config.noise().covariance(), config.seed)
    document = artifacts.measurements_to_list(measurements)
    return [artifacts.write_json(_output(config, "measure"), document)]


def cmd_estimate(config):
    measurements, bs, range_r, scenario = _inputs(config)
    estimator = config.estimator_config(range_r)
    result = estimate(measurements, bs, estimator)

    written = [
        artifacts.write_json(_output(config, "estimate"), artifacts.estimate_to_dict(result))
    ]
    if config.emit_surface:
        frame = artifacts.surface_frame(result.surface)
        written.append(artifacts.write_csv(config.emit_surface, frame))
    if config.emit_points:
        samples = draw_samples(measurements, estimator.n_s, estimator.seed)
        found = ("estimate", result.hypothesis_star)
        written.append(_write_points(config, samples, bs, found, scenario))
    return written


def cmd_sweep(config):
    measurements, bs, range_r, scenario = _inputs(config)
    estimator = config.estimator_config(range_r).validate()
    if len(measurements) < 2:
        raise ConfigurationError(f"At least two paths are needed, got {len(measurements)}")

    alpha_grid, bias_grid = search_grids(measurements, estimator)
    samples = draw_samples(measurements, estimator.n_s, estimator.seed)
    surface = grid_search(samples, bs, alpha_grid, bias_grid, workers=estimator.workers)

    written = [artifacts.write_csv(_output(config, "sweep"), artifacts.surface_frame(surface))]
    if config.emit_points:
        found = ("argmin", surface.argmin)
        written.append(_write_points(config, samples, bs, found, scenario))
    return written


def cmd_experiment(config):
    rows, summary = monte_carlo(
        config.experiment_params(), config.trials, config.seed, workers=config.workers
    )
    out = _output(config, "experiment")
    summary_path = Path(config.summary) if config.summary else out.with_suffix(".json")
    return [
        artifacts.write_csv(out, artifacts.experiment_frame(rows)),
        artifacts.write_json(summary_path, summary),
    ]


COMMANDS = {
    "generate": cmd_generate,
    "measure": cmd_measure,
    "estimate": cmd_estimate,
    "sweep": cmd_sweep,
    "experiment": cmd_experiment,
}


def load_config(args):
    flags = {
        key: value
        for key, value in vars(args).items()
        if key not in ("command", "config", "verbose")
    }
    config_file = None
    if args.config:
        config_file = artifacts.read_json(args.config)
        if not isinstance(config_file, dict):
            raise ConfigurationError("Config file must contain a JSON object")
    return RunConfig.from_sources(config_file, flags)


def main(argv=None):
    args = build_parser().parse_args(argv)

    level = [logging.WARNING, logging.INFO, logging.DEBUG][min(args.verbose, 2)]
    logging.basicConfig(level=level, format="%(asctime)s - %(levelname)s - %(message)s")

    try:
        config = load_config(args)
        written = COMMANDS[args.command](config)
    except (ConfigurationError, GenerationError) as exc:
        print(f"pynlos: invalid configuration: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (EstimationFailure, NLOSError) as exc:
        print(f"pynlos: estimation failed: {exc}", file=sys.stderr)
        return EXIT_ESTIMATION
    except (OSError, json.JSONDecodeError) as exc:
        print(f"pynlos: {exc}", file=sys.stderr)
        return EXIT_IO

    for path in written:
        logger.info("Wrote %s", path)
        print(path)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
