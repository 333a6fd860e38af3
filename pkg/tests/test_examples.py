# -*- coding: utf-8 -*-

import math

import numpy as np
import pytest

from pynlos import Hypothesis
from pynlos import PathMeasurement
from pynlos import Segment3
from pynlos import UeState
from pynlos import aoa_endpoint
from pynlos import aod_endpoint
from pynlos import forward_path
from pynlos import recover_sps
from pynlos import segment_closest
from pynlos import ue_segment

BS = (0.0, 0.0, 0.0)
UE = UeState((10.0, 0.0, 0.0), 0.0, 0.0)
SP = (5.0, 5.0, 0.0)
RHO = 2 * math.sqrt(50)


class TestPlanarExample:
    def test_forward_path(self):
        truth = forward_path(BS, UE, SP)

        assert truth.toa == pytest.approx(14.1421356, abs=1e-6)
        assert truth.aod_az == pytest.approx(math.pi / 4)
        assert truth.aod_el == pytest.approx(0.0)
        assert truth.aoa_az == pytest.approx(7 * math.pi / 4)
        assert truth.aoa_el == pytest.approx(0.0)

    def test_forward_path_with_bias(self):
        truth = forward_path(BS, UeState((10.0, 0.0, 0.0), 0.0, 20.0), SP)
        unbiased = forward_path(BS, UE, SP)

        assert truth.toa == pytest.approx(34.1421356, abs=1e-6)
        assert truth.aoa_az == unbiased.aoa_az
        assert truth.aod_az == unbiased.aod_az

    def test_aod_endpoint(self):
        rep = aod_endpoint(BS, math.pi / 4, 0.0, RHO)
        assert rep == pytest.approx([10.0, 10.0, 0.0])

    def test_aod_endpoint_vertical(self):
        rep = aod_endpoint(BS, 0.0, math.pi / 2, 5.0)
        assert rep == pytest.approx([0.0, 0.0, 5.0])

    def test_aoa_endpoint(self):
        rep = aoa_endpoint(BS, 7 * math.pi / 4, 0.0, 0.0, RHO)
        assert rep == pytest.approx([10.0, -10.0, 0.0])

    def test_aoa_endpoint_straight_down(self):
        rep = aoa_endpoint((1.0, 2.0, 3.0), 0.4, math.pi / 2, 0.0, 6.0)
        assert rep == pytest.approx([1.0, 2.0, -3.0])

    def test_ue_segment(self):
        truth = forward_path(BS, UE, SP)
        segment = ue_segment(BS, truth, Hypothesis(0.0, 0.0))

        assert segment.a == pytest.approx([10.0, 10.0, 0.0])
        assert segment.b == pytest.approx([10.0, -10.0, 0.0])
        assert segment.point_at(0.5) == pytest.approx(UE.position)

    def test_recover_sp(self):
        meas = PathMeasurement(forward_path(BS, UE, SP).as_vector(), np.zeros((5, 5)))
        fallbacks = []
        (sp,) = recover_sps([meas], Hypothesis(0.0, 0.0), UE.position, BS, fallbacks=fallbacks)

        assert sp == pytest.approx([5.0, 5.0, 0.0])
        assert np.linalg.norm(sp) == pytest.approx(7.0710678, abs=1e-6)
        assert fallbacks == [False]


class TestSegmentExamples:
    def test_perpendicular_skew_pair(self):
        p = Segment3((0.0, 0.0, 0.0), (1.0, 0.0, 0.0))
        q = Segment3((0.5, -1.0, 1.0), (0.5, 1.0, 1.0))

        rep = segment_closest(p, q)
        assert rep.distance == pytest.approx(1.0)
        assert rep.midpoint == pytest.approx([0.5, 0.0, 0.5])

    def test_identical_segments(self):
        p = Segment3((1.0, 2.0, 3.0), (4.0, -1.0, 0.5))

        rep = segment_closest(p, p)
        assert rep.distance == pytest.approx(0.0, abs=1e-12)
        assert np.cross(rep.midpoint - p.a, p.b - p.a) == pytest.approx([0, 0, 0], abs=1e-9)
