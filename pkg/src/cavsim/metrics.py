"""Failure indicators: checkpoint arrival times, travel delays and collisions."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .engine import CollisionEvent, TrajectoryLog


@dataclass
class RunSummary:
    collisions: list[CollisionEvent]
    arrivals: dict[int, float]  # vehicles that never reached the checkpoint are absent
    checkpoint: float
    delays: dict[int, float] = field(default_factory=dict)

    @property
    def max_delay(self) -> float | None:
        return max(self.delays.values()) if self.delays else None


def arrival_time(log: TrajectoryLog, vehicle: int, checkpoint: float) -> float | None:
    """First time ``vehicle`` is at or past ``checkpoint``, interpolated between ticks.

    Returns None if the vehicle never gets there within the log.
    """
    prev = None
    for rec in log.vehicle(vehicle):
        if rec.x >= checkpoint:
            if prev is None or rec.x == prev.x:
                return rec.t
            frac = (checkpoint - prev.x) / (rec.x - prev.x)
            return prev.t + frac * (rec.t - prev.t)
        prev = rec
    return None


def travel_delay(baseline: TrajectoryLog, attacked: TrajectoryLog, vehicle: int, checkpoint: float) -> float | None:
    t_attacked = arrival_time(attacked, vehicle, checkpoint)
    t_base = arrival_time(baseline, vehicle, checkpoint)
    if t_attacked is None or t_base is None:
        return None
    return t_attacked - t_base


def summarize(
    log: TrajectoryLog,
    events: Sequence[CollisionEvent],
    checkpoint: float,
    baseline: TrajectoryLog | None = None,
) -> RunSummary:
    arrivals = {}
    for vid in log.vehicle_ids:
        t = arrival_time(log, vid, checkpoint)
        if t is not None:
            arrivals[vid] = t
    delays = {}
    if baseline is not None:
        for vid in log.vehicle_ids:
            if vid in arrivals and vid in baseline.vehicle_ids:
                t_base = arrival_time(baseline, vid, checkpoint)
                if t_base is not None:
                    delays[vid] = arrivals[vid] - t_base
    return RunSummary(list(events), arrivals, checkpoint, delays)
