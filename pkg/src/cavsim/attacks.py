"""Perception of leaders over V2V and the cyberattacks that corrupt it.

Perception and sensing are modelled as one channel that the attacker fully
controls. Three attack kinds rewrite what a vehicle believes about the
vehicles ahead; the fourth overrides the acceleration the controller picked.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from typing import TYPE_CHECKING, Iterable, Sequence

from .errors import ValueRangeError
from .idm import LeaderObservation

if TYPE_CHECKING:
    from .engine import VehicleState


class AttackKind(str, enum.Enum):
    POSITION_OFFSET = "PositionOffset"
    VELOCITY_SCALE = "VelocityScale"
    DROP_LEADERS = "DropLeaders"
    FORCE_ACCELERATION = "ForceAcceleration"


# Name of the payload field each kind carries in scenario files.
PAYLOAD_KEY = {
    AttackKind.POSITION_OFFSET: "dx",
    AttackKind.VELOCITY_SCALE: "k",
    AttackKind.DROP_LEADERS: None,
    AttackKind.FORCE_ACCELERATION: "af",
}


@dataclass(frozen=True)
class Attack:
    """A scheduled attack on one or more vehicles.

    ``value`` is the payload: the offset ``dx`` in metres, the velocity
    factor ``k``, or the forced acceleration ``af`` in m/s^2. DropLeaders
    takes none. ``duration`` may be ``math.inf`` to last until the end of
    the run.
    """

    kind: AttackKind
    targets: frozenset[int]
    start: float
    duration: float
    value: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "kind", AttackKind(self.kind))
        object.__setattr__(self, "targets", frozenset(self.targets))
        if not self.targets:
            raise ValueRangeError("attacks.targets", sorted(self.targets), "must be non-empty")
        if not (math.isfinite(self.start) and self.start >= 0):
            raise ValueRangeError("attacks.start", self.start, "must be >= 0")
        if not (self.duration > 0):
            raise ValueRangeError("attacks.duration", self.duration, "must be > 0")
        key = PAYLOAD_KEY[self.kind]
        if key is None:
            if self.value is not None:
                raise ValueRangeError("attacks.value", self.value, f"{self.kind.value} takes no payload")
        elif self.value is None or not math.isfinite(self.value):
            raise ValueRangeError(f"attacks.{key}", self.value, "must be a finite number")
        elif self.kind is AttackKind.VELOCITY_SCALE and self.value < 0:
            raise ValueRangeError("attacks.k", self.value, "must be >= 0")

    @property
    def acts_on_perception(self) -> bool:
        return self.kind is not AttackKind.FORCE_ACCELERATION

    def hits(self, subject: int, t: float) -> bool:
        return subject in self.targets and attack_active(self, t)


@dataclass(frozen=True)
class PerceptionFrame:
    subject: int
    observations: tuple[LeaderObservation, ...] = field(default_factory=tuple)


def attack_active(atk: Attack, t: float) -> bool:
    """True on the half-open window [start, start + duration)."""
    return atk.start <= t < atk.start + atk.duration


def build_perception(
    states: Sequence[VehicleState],
    subject: int,
    comm_range: int,
    road_end: float,
    vehicle_length: float,
) -> PerceptionFrame:
    """Ground-truth view of the vehicles ahead of ``subject``, nearest first.

    At most ``comm_range`` vehicles are received. When the subject is close
    enough to the front of the platoon that the platoon leader is among
    them (or is the leader itself), a stationary obstacle sitting at
    ``road_end + vehicle_length`` is appended so the gap to it is measured
    to the road end.
    """
    order = sorted(states, key=lambda s: (-s.x, s.id))
    for idx, state in enumerate(order):
        if state.id == subject:
            break
    else:
        raise KeyError(f"unknown vehicle id {subject!r}")
    ahead = order[:idx][::-1]
    observations = [LeaderObservation(s.x, s.v) for s in ahead[:comm_range]]
    if len(ahead) <= comm_range:
        observations.append(LeaderObservation(road_end + vehicle_length, 0.0))
    return PerceptionFrame(subject, tuple(observations))


def apply_perception_attacks(frame: PerceptionFrame, attacks: Iterable[Attack], t: float) -> PerceptionFrame:
    """Corrupt ``frame`` with every active perception attack on its subject, in order."""
    obs = list(frame.observations)
    dropped = False
    touched = False
    for atk in attacks:
        if not atk.acts_on_perception or not atk.hits(frame.subject, t):
            continue
        touched = True
        if atk.kind is AttackKind.DROP_LEADERS:
            dropped = True
        elif atk.kind is AttackKind.POSITION_OFFSET:
            obs = [LeaderObservation(o.position + atk.value, o.velocity) for o in obs]
        elif atk.kind is AttackKind.VELOCITY_SCALE:
            obs = [LeaderObservation(o.position, o.velocity * atk.value) for o in obs]
    if not touched:
        return frame
    if dropped:
        return replace(frame, observations=())
    # stable sort keeps ties in their original order
    obs.sort(key=lambda o: o.position)
    return replace(frame, observations=tuple(obs))


def apply_actuation_attack(accel: float, subject: int, attacks: Iterable[Attack], t: float) -> float:
    """Replace ``accel`` by the forced value of the last active ForceAcceleration on ``subject``."""
    for atk in attacks:
        if atk.kind is AttackKind.FORCE_ACCELERATION and atk.hits(subject, t):
            accel = atk.value
    return accel
