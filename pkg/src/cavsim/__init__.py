"""Single-lane connected-vehicle platoon simulator with V2V cyberattack injection."""
from .attacks import Attack, AttackKind, PerceptionFrame
from .engine import CollisionEvent, CollisionPolicy, Scenario, TrajectoryLog, VehicleState, run, step
from .errors import ConfigError
from .idm import IdmParams, LeaderObservation
from .metrics import RunSummary, arrival_time, summarize, travel_delay

__all__ = [
    "Attack",
    "AttackKind",
    "CollisionEvent",
    "CollisionPolicy",
    "ConfigError",
    "IdmParams",
    "LeaderObservation",
    "PerceptionFrame",
    "RunSummary",
    "Scenario",
    "TrajectoryLog",
    "VehicleState",
    "arrival_time",
    "run",
    "step",
    "summarize",
    "travel_delay",
]
