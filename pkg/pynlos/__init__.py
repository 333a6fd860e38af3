# -*- coding: utf-8 -*-

from pynlos.estimator import EstimateResult
from pynlos.estimator import EstimatorConfig
from pynlos.estimator import Hypothesis
from pynlos.estimator import RefineOptions
from pynlos.estimator import estimate
from pynlos.estimator import evaluate
from pynlos.estimator import grid_search
from pynlos.estimator import recover_sps
from pynlos.estimator import refine
from pynlos.exceptions import ConfigurationError
from pynlos.exceptions import DegenerateGeometryError
from pynlos.exceptions import EstimationFailure
from pynlos.exceptions import GenerationError
from pynlos.exceptions import GridSyntaxError
from pynlos.exceptions import InfeasibleRangeError
from pynlos.exceptions import InfeasibleSampleError
from pynlos.exceptions import NLOSError
from pynlos.geometry import PathTruth
from pynlos.geometry import Segment3
from pynlos.geometry import UeState
from pynlos.geometry import aoa_endpoint
from pynlos.geometry import aod_endpoint
from pynlos.geometry import forward_path
from pynlos.geometry import segment_closest
from pynlos.geometry import ue_segment
from pynlos.measurement import NoiseConfig
from pynlos.measurement import PathMeasurement
from pynlos.measurement import draw_samples
from pynlos.measurement import synthesize
from pynlos.parser import GridParser
from pynlos.simulator import Scenario
from pynlos.simulator import ScenarioParams
from pynlos.simulator import generate_scenario
from pynlos.simulator import monte_carlo
from pynlos.simulator import score

__title__ = "pynlos"
__version__ = "0.1.0"
__author__ = "Pedro Werneck"
__license__ = "MIT"


parse_grid = GridParser().parse

__all__ = [
    "forward_path",
    "aod_endpoint",
    "aoa_endpoint",
    "ue_segment",
    "segment_closest",
    "synthesize",
    "draw_samples",
    "evaluate",
    "grid_search",
    "refine",
    "recover_sps",
    "estimate",
    "generate_scenario",
    "score",
    "monte_carlo",
    "parse_grid",
    "EstimateResult",
    "EstimatorConfig",
    "Hypothesis",
    "NoiseConfig",
    "PathMeasurement",
    "PathTruth",
    "RefineOptions",
    "Scenario",
    "ScenarioParams",
    "Segment3",
    "UeState",
    "NLOSError",
    "ConfigurationError",
    "GridSyntaxError",
    "DegenerateGeometryError",
    "InfeasibleRangeError",
    "InfeasibleSampleError",
    "EstimationFailure",
    "GenerationError",
]
