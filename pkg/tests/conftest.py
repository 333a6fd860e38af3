# -*- coding: utf-8 -*-

import math

import numpy as np
import pytest

from pynlos import PathMeasurement
from pynlos import Scenario
from pynlos import UeState
from pynlos import forward_path


def make_scenario():
    """Fixed 3D scenario with five scatter points, alpha = pi/3 and B = 20 m."""
    return Scenario(
        bs=(0.0, 0.0, 0.0),
        ue=UeState((12.0, -7.0, 1.5), math.pi / 3, 20.0),
        sps=[
            (25.0, 10.0, 6.0),
            (-8.0, 18.0, 3.0),
            (5.0, -25.0, -2.0),
            (30.0, -15.0, 8.0),
            (-15.0, -10.0, 4.0),
        ],
        range_r=50.0,
    )


def noise_free(scenario):
    return [
        PathMeasurement(forward_path(scenario.bs, scenario.ue, sp).as_vector(), np.zeros((5, 5)))
        for sp in scenario.sps
    ]


@pytest.fixture(scope="session")
def scenario():
    return make_scenario()


@pytest.fixture(scope="session")
def measurements(scenario):
    return noise_free(scenario)
