"""JSON scenario documents, trajectory CSV and summary JSON."""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, fields

from .attacks import PAYLOAD_KEY, Attack, AttackKind
from .engine import CollisionEvent, Scenario, TrajectoryLog, TrajectoryRecord
from .errors import ConfigError, ScenarioSyntaxError, UnknownKeyError, ValueRangeError
from .idm import IdmParams
from .metrics import RunSummary

TOP_LEVEL_KEYS = {
    "road_length", "n_vehicles", "params", "comm_range", "dt", "t_end",
    "checkpoint", "collision_policy", "initial", "attacks",
}
PARAM_KEYS = {f.name for f in fields(IdmParams)}
CSV_HEADER = ("t", "id", "x", "v", "a", "gap")


def _number(key, value, integer=False):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValueRangeError(key, value, "must be a number")
    if integer:
        if isinstance(value, float) and not value.is_integer():
            raise ValueRangeError(key, value, "must be an integer")
        return int(value)
    return float(value)


def _mapping(key, value):
    if not isinstance(value, dict):
        raise ScenarioSyntaxError(f"{key} must be a JSON object, got {type(value).__name__}")
    return value


def _check_keys(obj: dict, allowed: set, where: str):
    for key in obj:
        if key not in allowed:
            raise UnknownKeyError(key, where)


def _parse_attack(i: int, raw) -> Attack:
    where = f"attacks[{i}]"
    raw = _mapping(where, raw)
    try:
        kind = AttackKind(raw.get("kind"))
    except ValueError:
        raise ValueRangeError(f"{where}.kind", raw.get("kind"),
                              "must be one of " + ", ".join(k.value for k in AttackKind)) from None
    payload = PAYLOAD_KEY[kind]
    _check_keys(raw, {"kind", "targets", "start", "duration"} | ({payload} if payload else set()), where)
    for required in ("targets", "start") + ((payload,) if payload else ()):
        if required not in raw:
            raise ValueRangeError(f"{where}.{required}", None, "is required")
    targets = raw["targets"]
    if isinstance(targets, (int, float)) and not isinstance(targets, bool):
        targets = [targets]
    if not isinstance(targets, list):
        raise ValueRangeError(f"{where}.targets", targets, "must be a list of vehicle ids")
    targets = [_number(f"{where}.targets", t, integer=True) for t in targets]
    duration = math.inf if raw.get("duration") is None else _number(f"{where}.duration", raw["duration"])
    value = _number(f"{where}.{payload}", raw[payload]) if payload else None
    try:
        return Attack(kind, frozenset(targets), _number(f"{where}.start", raw["start"]), duration, value)
    except ValueRangeError as exc:
        raise ValueRangeError(exc.key.replace("attacks", where, 1), exc.value, exc.requirement) from None


def scenario_from_dict(doc: dict) -> Scenario:
    doc = _mapping("scenario", doc)
    _check_keys(doc, TOP_LEVEL_KEYS, "scenario")
    kwargs = {}
    for key in ("road_length", "dt", "t_end", "checkpoint"):
        if key in doc:
            kwargs[key] = _number(key, doc[key])
    for key in ("n_vehicles", "comm_range"):
        if key in doc:
            kwargs[key] = _number(key, doc[key], integer=True)
    if "params" in doc:
        params = _mapping("params", doc["params"])
        _check_keys(params, PARAM_KEYS, "params")
        kwargs["params"] = IdmParams(**{k: _number(f"params.{k}", v) for k, v in params.items()})
    if "collision_policy" in doc:
        if doc["collision_policy"] not in ("halt", "freeze"):
            raise ValueRangeError("collision_policy", doc["collision_policy"], "must be 'halt' or 'freeze'")
        kwargs["collision_policy"] = doc["collision_policy"]
    if doc.get("initial") is not None:
        initial = doc["initial"]
        if not isinstance(initial, list):
            raise ValueRangeError("initial", initial, "must be a list of {x, v} objects")
        pairs = []
        for i, entry in enumerate(initial):
            entry = _mapping(f"initial[{i}]", entry)
            _check_keys(entry, {"x", "v"}, f"initial[{i}]")
            if "x" not in entry or "v" not in entry:
                raise ValueRangeError(f"initial[{i}]", entry, "needs both x and v")
            pairs.append((_number(f"initial[{i}].x", entry["x"]), _number(f"initial[{i}].v", entry["v"])))
        kwargs["initial"] = tuple(pairs)
    attacks = doc.get("attacks", [])
    if not isinstance(attacks, list):
        raise ValueRangeError("attacks", attacks, "must be a list")
    kwargs["attacks"] = tuple(_parse_attack(i, a) for i, a in enumerate(attacks))
    return Scenario(**kwargs)


def parse_scenario(text: str) -> Scenario:
    """Parse and validate a JSON scenario document.

    Omitted fields take the package defaults. Raises a ConfigError subclass
    naming the offending key on any problem.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioSyntaxError(f"malformed JSON: {exc}") from None
    return scenario_from_dict(doc)


def load_scenario(path) -> Scenario:
    with open(path, encoding="utf-8") as fh:
        return parse_scenario(fh.read())


def attack_to_dict(atk: Attack) -> dict:
    out = {"kind": atk.kind.value}
    key = PAYLOAD_KEY[atk.kind]
    if key:
        out[key] = atk.value
    out["targets"] = sorted(atk.targets)
    out["start"] = atk.start
    if math.isfinite(atk.duration):
        out["duration"] = atk.duration
    return out


def scenario_to_dict(scenario: Scenario) -> dict:
    """Fully expanded document; ``parse_scenario`` of its JSON gives back ``scenario``."""
    doc = {
        "road_length": scenario.road_length,
        "n_vehicles": scenario.n_vehicles,
        "params": asdict(scenario.params),
        "comm_range": scenario.comm_range,
        "dt": scenario.dt,
        "t_end": scenario.t_end,
        "checkpoint": scenario.checkpoint,
        "collision_policy": scenario.collision_policy.value,
    }
    if scenario.initial is not None:
        doc["initial"] = [{"x": x, "v": v} for x, v in scenario.initial]
    doc["attacks"] = [attack_to_dict(a) for a in scenario.attacks]
    return doc


def dump_scenario(scenario: Scenario) -> str:
    return json.dumps(scenario_to_dict(scenario), indent=2) + "\n"


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, int):
        return str(value)
    return format(value, ".6g")


def write_trajectory_csv(log: TrajectoryLog) -> str:
    """Render ``log`` as CSV text, numbers to 6 significant digits."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for rec in log:
        writer.writerow([_fmt(rec.t), rec.id, _fmt(rec.x), _fmt(rec.v), _fmt(rec.a), _fmt(rec.gap)])
    return buf.getvalue()


def read_trajectory_csv(text: str) -> TrajectoryLog:
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if tuple(header or ()) != CSV_HEADER:
        raise ValueError(f"unexpected CSV header {header!r}")
    records = [
        TrajectoryRecord(float(t), int(vid), float(x), float(v), float(a), float(gap) if gap else None)
        for t, vid, x, v, a, gap in reader
    ]
    ids = []
    for rec in records:
        if rec.id in ids:
            break
        ids.append(rec.id)
    times = sorted({r.t for r in records})
    dt = times[1] - times[0] if len(times) > 1 else 0.0
    return TrajectoryLog(dt, tuple(ids), records)


def summary_to_dict(summary: RunSummary) -> dict:
    out = {
        "checkpoint": summary.checkpoint,
        "collisions": [e._asdict() for e in summary.collisions],
        "arrivals": {str(k): v for k, v in sorted(summary.arrivals.items())},
    }
    if summary.delays:
        out["delays"] = {str(k): v for k, v in sorted(summary.delays.items())}
    return out


def summary_to_json(summary: RunSummary) -> str:
    return json.dumps(summary_to_dict(summary), indent=2) + "\n"


def summary_from_json(text: str) -> RunSummary:
    doc = json.loads(text)
    return RunSummary(
        collisions=[CollisionEvent(**e) for e in doc["collisions"]],
        arrivals={int(k): v for k, v in doc["arrivals"].items()},
        checkpoint=doc["checkpoint"],
        delays={int(k): v for k, v in doc.get("delays", {}).items()},
    )


__all__ = [
    "ConfigError",
    "dump_scenario",
    "load_scenario",
    "parse_scenario",
    "read_trajectory_csv",
    "scenario_from_dict",
    "scenario_to_dict",
    "summary_from_json",
    "summary_to_json",
    "write_trajectory_csv",
]
