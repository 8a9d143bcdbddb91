"""Intelligent Driver Model with a min-over-leaders extension for connected vehicles.

Each connected vehicle evaluates the classical IDM against every leader it
receives data from, treating that leader as if it were directly in front,
and acts on the most conservative (smallest) acceleration.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

from .errors import ValueRangeError


@dataclass(frozen=True)
class IdmParams:
    """IDM constants. Defaults are the platoon values used throughout the package.

    Attributes:
        v0: desired velocity (m/s).
        s0: minimum standstill gap (m).
        a: maximum acceleration (m/s^2).
        b: comfortable deceleration (m/s^2).
        T: safe time headway (s).
        delta: acceleration exponent.
        l: vehicle length (m).
    """

    v0: float = 10.0
    s0: float = 2.0
    a: float = 0.73
    b: float = 1.67
    T: float = 1.5
    delta: float = 4.0
    l: float = 5.0

    def __post_init__(self):
        for name in ("v0", "s0", "a", "b", "T", "l"):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
                raise ValueRangeError(f"params.{name}", value, "must be a finite number > 0")
        if not (isinstance(self.delta, (int, float)) and math.isfinite(self.delta) and self.delta >= 1):
            raise ValueRangeError("params.delta", self.delta, "must be a finite number >= 1")


class LeaderObservation(NamedTuple):
    """What a subject vehicle believes about one vehicle (or obstacle) ahead."""

    position: float
    velocity: float


def desired_gap(v: float, dv: float, p: IdmParams) -> float:
    """Dynamic desired gap s*(v, dv). Not clamped at s0 when dv < 0."""
    return p.s0 + p.T * v + v * dv / (2.0 * math.sqrt(p.a * p.b))


def idm_accel(v: float, dv: float, gap: float, p: IdmParams) -> float:
    """IDM acceleration for speed ``v``, approach rate ``dv`` (v - v_leader) and net ``gap``.

    Raises:
        ValueError: if ``gap`` is not positive. A non-positive gap is a
            collision and has to be handled before calling this.
    """
    if not gap > 0:
        raise ValueError(f"gap must be positive, got {gap!r}")
    s_star = desired_gap(v, dv, p)
    return p.a * (1.0 - (v / p.v0) ** p.delta - (s_star / gap) ** 2)


def free_road_accel(v: float, p: IdmParams) -> float:
    return p.a * (1.0 - (v / p.v0) ** p.delta)


def multi_leader_accel(
    subject_x: float,
    subject_v: float,
    observations: Sequence[LeaderObservation],
    p: IdmParams,
) -> float:
    """Smallest IDM acceleration over all observed leaders.

    Every leader is treated as if it were the vehicle right in front, so the
    gap to leader j is ``position_j - subject_x - l`` (intermediate vehicles
    are not subtracted). An empty list means free road.
    """
    if not observations:
        return free_road_accel(subject_v, p)
    return min(
        idm_accel(subject_v, subject_v - obs.velocity, obs.position - subject_x - p.l, p)
        for obs in observations
    )


def equilibrium_gap(v: float, p: IdmParams) -> float:
    """Gap at which a vehicle following an equal-speed leader has zero acceleration."""
    if not 0 <= v < p.v0:
        raise ValueError(f"no finite equilibrium gap for v={v!r} (need 0 <= v < v0={p.v0})")
    return desired_gap(v, 0.0, p) / math.sqrt(1.0 - (v / p.v0) ** p.delta)
