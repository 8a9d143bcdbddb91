"""Fixed-step platoon simulation with attack injection and collision detection."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from typing import Iterator, NamedTuple, Sequence

from .attacks import (
    Attack,
    apply_actuation_attack,
    apply_perception_attacks,
    build_perception,
)
from .errors import OverlapError, ValueRangeError
from .idm import IdmParams, multi_leader_accel

DEFAULT_SPACING = 10.0  # net gap between vehicles in the default start grid, m


class CollisionPolicy(str, enum.Enum):
    HALT = "halt"
    FREEZE = "freeze"


@dataclass(frozen=True)
class VehicleState:
    id: int
    x: float
    v: float
    last_accel: float = 0.0


class CollisionEvent(NamedTuple):
    t: float
    follower: int
    leader: int
    gap: float


class TrajectoryRecord(NamedTuple):
    t: float
    id: int
    x: float
    v: float
    a: float
    gap: float | None  # None for the vehicle with nobody physically ahead


@dataclass
class TrajectoryLog:
    """Per-tick, per-vehicle kinematics. Records are stored tick-major."""

    dt: float
    vehicle_ids: tuple[int, ...]
    records: list[TrajectoryRecord] = field(default_factory=list)

    @property
    def n_ticks(self) -> int:
        return len(self.records) // len(self.vehicle_ids) if self.vehicle_ids else 0

    def times(self) -> list[float]:
        n = len(self.vehicle_ids)
        return [self.records[k * n].t for k in range(self.n_ticks)]

    def vehicle(self, vid: int) -> list[TrajectoryRecord]:
        if vid not in self.vehicle_ids:
            raise KeyError(f"unknown vehicle id {vid!r}")
        n = len(self.vehicle_ids)
        return self.records[self.vehicle_ids.index(vid)::n]

    def series(self, vid: int, column: str) -> list[float | None]:
        return [getattr(r, column) for r in self.vehicle(vid)]

    def __iter__(self) -> Iterator[TrajectoryRecord]:
        return iter(self.records)


@dataclass(frozen=True)
class Scenario:
    """Everything needed to reproduce one run.

    ``initial`` is a sequence of ``(x, v)`` pairs ordered by vehicle id
    (id 1 is the platoon leader), or ``None`` for the default start grid.
    ``checkpoint`` is the position at which arrival times are measured.
    """

    road_length: float = 1000.0
    n_vehicles: int = 9
    params: IdmParams = field(default_factory=IdmParams)
    comm_range: int = 3
    dt: float = 0.1
    t_end: float = 200.0
    initial: tuple[tuple[float, float], ...] | None = None
    attacks: tuple[Attack, ...] = ()
    collision_policy: CollisionPolicy = CollisionPolicy.HALT
    checkpoint: float = 600.0

    def __post_init__(self):
        object.__setattr__(self, "collision_policy", CollisionPolicy(self.collision_policy))
        object.__setattr__(self, "attacks", tuple(self.attacks))
        if self.initial is not None:
            object.__setattr__(self, "initial", tuple((float(x), float(v)) for x, v in self.initial))
        self.validate()

    def validate(self) -> None:
        def positive(name, value):
            if not (math.isfinite(value) and value > 0):
                raise ValueRangeError(name, value, "must be a finite number > 0")

        positive("road_length", self.road_length)
        positive("dt", self.dt)
        positive("t_end", self.t_end)
        if not (isinstance(self.n_vehicles, int) and self.n_vehicles >= 1):
            raise ValueRangeError("n_vehicles", self.n_vehicles, "must be an integer >= 1")
        if not (isinstance(self.comm_range, int) and self.comm_range >= 1):
            raise ValueRangeError("comm_range", self.comm_range, "must be an integer >= 1")
        if not (math.isfinite(self.checkpoint) and 0 <= self.checkpoint <= self.road_length):
            raise ValueRangeError("checkpoint", self.checkpoint, "must lie within [0, road_length]")
        if self.initial is not None:
            if len(self.initial) != self.n_vehicles:
                raise ValueRangeError(
                    "initial", len(self.initial), f"needs exactly n_vehicles={self.n_vehicles} entries"
                )
            for i, (x, v) in enumerate(self.initial):
                if not math.isfinite(x):
                    raise ValueRangeError(f"initial[{i}].x", x, "must be finite")
                if not (math.isfinite(v) and v >= 0):
                    raise ValueRangeError(f"initial[{i}].v", v, "must be finite and >= 0")
        start = self.initial_states()
        for i in range(1, self.n_vehicles):
            lead_x, follow_x = start[i - 1].x, start[i].x
            gap = lead_x - follow_x - self.params.l
            if not gap > 0:
                raise OverlapError(
                    f"initial[{i}] at x={follow_x!r} overlaps or is ahead of initial[{i - 1}] "
                    f"at x={lead_x!r} (gap {gap!r} m)"
                )
        for atk in self.attacks:
            bad = [t for t in atk.targets if not 1 <= t <= self.n_vehicles]
            if bad:
                raise ValueRangeError("attacks.targets", sorted(bad), f"ids must lie in 1..{self.n_vehicles}")

    def initial_states(self) -> tuple[VehicleState, ...]:
        if self.initial is None:
            pitch = self.params.l + DEFAULT_SPACING
            return tuple(VehicleState(n, -(n - 1) * pitch, 0.0) for n in range(1, self.n_vehicles + 1))
        return tuple(VehicleState(n, x, v) for n, (x, v) in enumerate(self.initial, start=1))

    @property
    def n_steps(self) -> int:
        return int(round(self.t_end / self.dt))


def _controlled_accel(states: Sequence[VehicleState], state: VehicleState, scenario: Scenario, t: float) -> float:
    p = scenario.params
    frame = build_perception(states, state.id, scenario.comm_range, scenario.road_length, p.l)
    attacked = apply_perception_attacks(frame, scenario.attacks, t)
    if attacked is not frame and any(o.position - state.x - p.l <= 0 for o in attacked.observations):
        # A spoofed leader appears to overlap us: stop within this tick.
        accel = -state.v / scenario.dt
    else:
        accel = multi_leader_accel(state.x, state.v, attacked.observations, p)
    return apply_actuation_attack(accel, state.id, scenario.attacks, t)


def step(
    states: Sequence[VehicleState],
    scenario: Scenario,
    t: float,
    frozen: frozenset[int] = frozenset(),
) -> tuple[tuple[VehicleState, ...], list[CollisionEvent]]:
    """Advance every vehicle by one tick from the states at ``t``.

    All accelerations are computed from the states at ``t`` before any
    vehicle moves. Speeds are floored at zero and positions advance with the
    mean of the old and new speed. Vehicles in ``frozen`` stay put. The
    returned events are collisions among the new positions.
    """
    dt = scenario.dt
    accels = [0.0 if s.id in frozen else _controlled_accel(states, s, scenario, t) for s in states]
    nxt = []
    for s, acc in zip(states, accels):
        if s.id in frozen:
            nxt.append(replace(s, v=0.0, last_accel=0.0))
            continue
        v_new = max(0.0, s.v + acc * dt)
        nxt.append(VehicleState(s.id, s.x + 0.5 * (s.v + v_new) * dt, v_new, acc))
    nxt = tuple(nxt)
    return nxt, detect_collisions(nxt, scenario.params.l, t + dt)


def detect_collisions(states: Sequence[VehicleState], vehicle_length: float, t: float = 0.0) -> list[CollisionEvent]:
    """Collision events for every id-adjacent pair whose net gap is <= 0.

    Platoon order by id equals physical order up to the first collision,
    so id adjacency is the physical adjacency of the previous tick.
    """
    by_id = sorted(states, key=lambda s: s.id)
    events = []
    for lead, follow in zip(by_id, by_id[1:]):
        gap = lead.x - follow.x - vehicle_length
        if gap <= 0:
            events.append(CollisionEvent(t, follow.id, lead.id, gap))
    return events


def _record(log: TrajectoryLog, t: float, states: Sequence[VehicleState], accels: Sequence[float], l: float):
    prev = None
    for s, acc in zip(states, accels):
        gap = None if prev is None else prev.x - s.x - l
        log.records.append(TrajectoryRecord(t, s.id, s.x, s.v, acc, gap))
        prev = s


def run(scenario: Scenario):
    """Simulate ``scenario`` from t=0 to t_end.

    The ``a`` column of each logged tick holds the acceleration commanded at
    that tick. The final tick has nothing left to command, so it repeats the
    last applied value.

    Returns:
        (TrajectoryLog, list of CollisionEvent, RunSummary)
    """
    from .metrics import summarize

    scenario.validate()
    l = scenario.params.l
    states = scenario.initial_states()
    log = TrajectoryLog(scenario.dt, tuple(s.id for s in states))
    events: list[CollisionEvent] = []
    seen_pairs: set[tuple[int, int]] = set()
    frozen: frozenset[int] = frozenset()

    t_now = 0.0
    for k in range(scenario.n_steps):
        nxt, new_events = step(states, scenario, t_now, frozen)
        _record(log, t_now, states, [s.last_accel for s in nxt], l)
        states = nxt
        t_now = (k + 1) * scenario.dt
        fresh = [e for e in new_events if (e.follower, e.leader) not in seen_pairs]
        seen_pairs.update((e.follower, e.leader) for e in fresh)
        events.extend(fresh)
        if fresh and scenario.collision_policy is CollisionPolicy.HALT:
            break
        if fresh:
            frozen = frozen | {vid for e in fresh for vid in (e.follower, e.leader)}
            states = tuple(replace(s, v=0.0) if s.id in frozen else s for s in states)
    _record(log, t_now, states, [s.last_accel for s in states], l)
    return log, events, summarize(log, events, scenario.checkpoint)
