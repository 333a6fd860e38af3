# -*- coding: utf-8 -*-
"""Forward model, segment constructions and the segment closest-point kernel.

Lengths are meters, angles radians. Points are float arrays of shape (3,).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from dataclasses import field
from typing import Tuple

import numpy as np

from .exceptions import DegenerateGeometryError
from .exceptions import InfeasibleRangeError
from .exceptions import InfeasibleSampleError

TWO_PI = 2.0 * math.pi
HALF_PI = 0.5 * math.pi

# squared length below which a segment is treated as a point
DEGENERATE_SQ = 1e-18
# relative tolerance on a*e - b*b for parallel supports
PARALLEL_TOL = 1e-12
# minimum separation for the forward model
COINCIDENT_TOL = 1e-9


def as_point(value) -> np.ndarray:
    point = np.asarray(value, dtype=float).reshape(3)
    if not np.all(np.isfinite(point)):
        raise DegenerateGeometryError(f"Point has non-finite components: {point.tolist()}")
    return point


def wrap_angle(angle):
    """Wrap to [0, 2*pi); works on scalars and arrays."""
    wrapped = np.mod(angle, TWO_PI)
    wrapped = np.where(wrapped >= TWO_PI, 0.0, wrapped)
    if np.ndim(wrapped) == 0:
        return float(wrapped)
    return wrapped


def reflect_elevation(elevation):
    """Reflect elevations outside [-pi/2, pi/2] back at the boundary."""
    el = np.asarray(elevation, dtype=float)
    el = np.where(el > HALF_PI, math.pi - el, el)
    el = np.where(el < -HALF_PI, -math.pi - el, el)
    el = np.clip(el, -HALF_PI, HALF_PI)
    if el.ndim == 0:
        return float(el)
    return el


def circular_difference(a, b):
    """Absolute angular distance on the circle, in [0, pi]."""
    delta = np.abs(np.mod(np.asarray(a) - np.asarray(b) + math.pi, TWO_PI) - math.pi)
    if np.ndim(delta) == 0:
        return float(delta)
    return delta


def departure_directions(az, el) -> np.ndarray:
    az = np.asarray(az, dtype=float)
    el = np.asarray(el, dtype=float)
    cos_el = np.cos(el)
    return np.stack([cos_el * np.cos(az), cos_el * np.sin(az), np.sin(el)], axis=-1)


def arrival_directions(az, el, alpha) -> np.ndarray:
    """Unit vectors from the scatter point toward the UE in the global frame.

    The measured AOA points from the UE to the scatter point in the UE frame;
    rotating by alpha and reversing the direction gives azimuth az + alpha and
    a negated vertical component.
    """
    az = np.asarray(az, dtype=float) + alpha
    el = np.asarray(el, dtype=float)
    cos_el = np.cos(el)
    return np.stack([cos_el * np.cos(az), cos_el * np.sin(az), -np.sin(el)], axis=-1)


@dataclass(frozen=True)
class UeState:
    position: np.ndarray
    orientation_alpha: float = 0.0
    bias_b: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "position", as_point(self.position))
        object.__setattr__(self, "orientation_alpha", wrap_angle(float(self.orientation_alpha)))
        if not math.isfinite(self.bias_b):
            raise DegenerateGeometryError(f"Clock bias must be finite, got {self.bias_b}")
        object.__setattr__(self, "bias_b", float(self.bias_b))


@dataclass(frozen=True)
class PathTruth:
    toa: float
    aoa_az: float
    aoa_el: float
    aod_az: float
    aod_el: float

    def as_vector(self) -> np.ndarray:
        return np.array([self.toa, self.aoa_az, self.aoa_el, self.aod_az, self.aod_el])

    @classmethod
    def from_vector(cls, z):
        return cls(*(float(v) for v in np.asarray(z, dtype=float).reshape(5)))


@dataclass(frozen=True)
class Segment3:
    a: np.ndarray
    b: np.ndarray
    degenerate: bool = False

    def __post_init__(self):
        object.__setattr__(self, "a", as_point(self.a))
        object.__setattr__(self, "b", as_point(self.b))
        d = self.b - self.a
        if not self.degenerate and float(d @ d) <= DEGENERATE_SQ:
            raise DegenerateGeometryError(
                f"Segment endpoints coincide at {self.a.tolist()}; pass degenerate=True"
            )

    def point_at(self, t: float) -> np.ndarray:
        return self.a + t * (self.b - self.a)

    @property
    def length(self) -> float:
        return float(np.linalg.norm(self.b - self.a))


@dataclass(frozen=True)
class PairPoint:
    distance: float
    midpoint: np.ndarray
    pair: Tuple[int, int] = (0, 1)
    sample_index: int = 0
    closest: Tuple[np.ndarray, np.ndarray] = field(default=None, repr=False, compare=False)


def forward_path(bs, ue: UeState, sp) -> PathTruth:
    bs = as_point(bs)
    sp = as_point(sp)
    x = ue.position

    bs_to_sp = sp - bs
    ue_to_sp = sp - x
    d_bs = float(np.linalg.norm(bs_to_sp))
    d_ue = float(np.linalg.norm(ue_to_sp))
    if d_bs < COINCIDENT_TOL or d_ue < COINCIDENT_TOL:
        raise DegenerateGeometryError(
            f"Scatter point {sp.tolist()} coincides with the BS or the UE position"
        )

    toa = d_bs + d_ue + ue.bias_b
    aoa_az = wrap_angle(math.pi + math.atan2(ue_to_sp[1], ue_to_sp[0]) - ue.orientation_alpha)
    aoa_el = math.asin(min(1.0, max(-1.0, ue_to_sp[2] / d_ue)))
    aod_az = wrap_angle(math.atan2(bs_to_sp[1], bs_to_sp[0]))
    aod_el = math.asin(min(1.0, max(-1.0, bs_to_sp[2] / d_bs)))

    return PathTruth(toa, aoa_az, aoa_el, aod_az, aod_el)


def _check_range(rho):
    if not rho > 0:
        raise InfeasibleRangeError(f"Path length must be positive, got {rho}")


def aod_endpoint(bs, aod_az: float, aod_el: float, rho: float) -> np.ndarray:
    _check_range(rho)
    return as_point(bs) + rho * departure_directions(aod_az, aod_el)


def aoa_endpoint(bs, aoa_az: float, aoa_el: float, alpha: float, rho: float) -> np.ndarray:
    _check_range(rho)
    return as_point(bs) + rho * arrival_directions(aoa_az, aoa_el, alpha)


def ue_segment(bs, sample, hypothesis) -> Segment3:
    """Segment on which the UE lies if the hypothesis holds for this sample.

    `sample` is a PathTruth or a 5-vector [toa, aoa_az, aoa_el, aod_az, aod_el].
    """
    if not isinstance(sample, PathTruth):
        sample = PathTruth.from_vector(sample)

    rho = sample.toa - hypothesis.bias
    if not rho > 0:
        raise InfeasibleSampleError(
            f"Bias {hypothesis.bias} leaves no path length for TOA {sample.toa}"
        )

    alpha = wrap_angle(hypothesis.alpha)
    near = aod_endpoint(bs, sample.aod_az, sample.aod_el, rho)
    far = aoa_endpoint(bs, sample.aoa_az, sample.aoa_el, alpha, rho)
    # departure and rotated arrival directions agree: the UE sits on the SP
    d = far - near
    return Segment3(near, far, degenerate=bool(d @ d <= DEGENERATE_SQ))


def point_segment_distance(point, segment: Segment3) -> float:
    point = as_point(point)
    d = segment.b - segment.a
    dd = float(d @ d)
    if dd <= DEGENERATE_SQ:
        return float(np.linalg.norm(point - segment.a))
    t = min(1.0, max(0.0, float((point - segment.a) @ d) / dd))
    return float(np.linalg.norm(point - segment.point_at(t)))


def closest_points(p0, p1, q0, q1):
    """Closest points between segments [p0, p1] and [q0, q1].

    Works on broadcastable arrays of shape (..., 3) and returns (s, t, cp, cq)
    where cp = p0 + s (p1 - p0) and cq = q0 + t (q1 - q0). Parallel pairs with
    overlapping projections resolve to the middle of the overlap.
    """
    p0, p1, q0, q1 = np.broadcast_arrays(
        *(np.asarray(v, dtype=float) for v in (p0, p1, q0, q1))
    )
    d1 = p1 - p0
    d2 = q1 - q0
    r = p0 - q0

    a = np.einsum("...i,...i->...", d1, d1)
    e = np.einsum("...i,...i->...", d2, d2)
    b = np.einsum("...i,...i->...", d1, d2)
    c = np.einsum("...i,...i->...", d1, r)
    f = np.einsum("...i,...i->...", d2, r)

    p_point = a <= DEGENERATE_SQ
    q_point = e <= DEGENERATE_SQ
    safe_a = np.where(p_point, 1.0, a)
    safe_e = np.where(q_point, 1.0, e)

    denom = a * e - b * b
    parallel = (denom <= PARALLEL_TOL * a * e) & ~p_point & ~q_point
    safe_denom = np.where(parallel | p_point | q_point, 1.0, denom)

    s = np.clip((b * f - c * e) / safe_denom, 0.0, 1.0)

    # projection of q onto p's parameter line, clipped to [0, 1]
    s0 = -c / safe_a
    s1 = s0 + b / safe_a
    lo = np.clip(np.minimum(s0, s1), 0.0, 1.0)
    hi = np.clip(np.maximum(s0, s1), 0.0, 1.0)
    s = np.where(parallel, 0.5 * (lo + hi), s)

    t = (b * s + f) / safe_e
    s = np.where(
        t < 0.0,
        np.clip(-c / safe_a, 0.0, 1.0),
        np.where(t > 1.0, np.clip((b - c) / safe_a, 0.0, 1.0), s),
    )
    t = np.clip(t, 0.0, 1.0)

    s = np.where(p_point, 0.0, np.where(q_point, np.clip(-c / safe_a, 0.0, 1.0), s))
    t = np.where(q_point, 0.0, np.where(p_point, np.clip(f / safe_e, 0.0, 1.0), t))

    cp = p0 + s[..., None] * d1
    cq = q0 + t[..., None] * d2
    return s, t, cp, cq


def segment_closest(p: Segment3, q: Segment3, pair=(0, 1), sample_index=0) -> PairPoint:
    _, _, cp, cq = closest_points(p.a, p.b, q.a, q.b)
    return PairPoint(
        distance=float(np.linalg.norm(cp - cq)),
        midpoint=0.5 * (cp + cq),
        pair=tuple(pair),
        sample_index=sample_index,
        closest=(cp, cq),
    )
