import json
import math
import xml.etree.ElementTree as ET

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cavsim.attacks import Attack, AttackKind
from cavsim.engine import CollisionEvent, Scenario, TrajectoryLog, TrajectoryRecord, run
from cavsim.errors import OverlapError, ScenarioSyntaxError, UnknownKeyError, ValueRangeError
from cavsim.idm import IdmParams
from cavsim.metrics import RunSummary
from cavsim.plot import render_timeseries_svg
from cavsim.scenario_io import (
    dump_scenario,
    parse_scenario,
    read_trajectory_csv,
    summary_from_json,
    summary_to_json,
    write_trajectory_csv,
)


def test_empty_document_is_baseline():
    sc = parse_scenario("{}")
    assert sc == Scenario()
    assert sc.params == IdmParams(v0=10, s0=2, a=0.73, b=1.67, T=1.5, delta=4, l=5)
    assert (sc.road_length, sc.n_vehicles, sc.comm_range, sc.checkpoint) == (1000, 9, 3, 600)


def test_spacing_attack_document():
    sc = parse_scenario(
        '{"attacks": [{"kind": "PositionOffset", "dx": 80, "targets": [5], "start": 10, "duration": 75}]}'
    )
    assert sc.attacks == (Attack(AttackKind.POSITION_OFFSET, frozenset({5}), 10.0, 75.0, 80.0),)


def test_attack_without_duration_is_open_ended():
    sc = parse_scenario('{"attacks": [{"kind": "DropLeaders", "targets": [8], "start": 10}]}')
    assert sc.attacks[0].duration == math.inf


def test_attack_order_preserved():
    doc = {"attacks": [
        {"kind": "ForceAcceleration", "af": 2, "targets": [5], "start": 10},
        {"kind": "PositionOffset", "dx": -60, "targets": [4], "start": 10},
    ]}
    kinds = [a.kind for a in parse_scenario(json.dumps(doc)).attacks]
    assert kinds == [AttackKind.FORCE_ACCELERATION, AttackKind.POSITION_OFFSET]


@pytest.mark.parametrize(
    "doc,error,key",
    [
        ('{"dt": 0}', ValueRangeError, "dt"),
        ('{"dt": "fast"}', ValueRangeError, "dt"),
        ('{"n_vehicles": 2.5}', ValueRangeError, "n_vehicles"),
        ('{"dt": true}', ValueRangeError, "dt"),
        ('{"params": {"a": -1}}', ValueRangeError, "params.a"),
        ('{"collision_policy": "explode"}', ValueRangeError, "collision_policy"),
        ('{"lanes": 2}', UnknownKeyError, "lanes"),
        ('{"params": {"gamma": 1}}', UnknownKeyError, "gamma"),
        ('{"attacks": [{"kind": "DropLeaders", "targets": [5], "start": 1, "dx": 3}]}', UnknownKeyError, "dx"),
        ('{"attacks": [{"kind": "Jam", "targets": [5], "start": 1}]}', ValueRangeError, "kind"),
        ('{"attacks": [{"kind": "VelocityScale", "targets": [5], "start": 1}]}', ValueRangeError, "attacks\\[0\\].k"),
        ('{"attacks": [{"kind": "DropLeaders", "targets": [5], "start": 1, "duration": 0}]}', ValueRangeError, "attacks\\[0\\].duration"),
        ('{"attacks": [{"kind": "DropLeaders", "targets": [12], "start": 1}]}', ValueRangeError, "targets"),
        ('{"n_vehicles": 2, "initial": [{"x": 0, "v": 0}, {"x": -3, "v": 0}]}', OverlapError, "initial"),
        ('{"n_vehicles": 2, "initial": [{"x": 0}, {"x": -30, "v": 0}]}', ValueRangeError, "initial"),
        ('{"dt": 0.1,', ScenarioSyntaxError, "malformed"),
        ('[1, 2]', ScenarioSyntaxError, "scenario"),
    ],
)
def test_validation_errors(doc, error, key):
    with pytest.raises(error, match=key):
        parse_scenario(doc)


def test_errors_are_distinct_types():
    kinds = {ScenarioSyntaxError, UnknownKeyError, ValueRangeError, OverlapError}
    assert len(kinds) == 4
    assert not any(issubclass(a, b) for a in kinds for b in kinds if a is not b)


scenarios = st.builds(
    Scenario,
    road_length=st.floats(700, 2000),
    n_vehicles=st.integers(1, 9),
    params=st.builds(IdmParams, v0=st.floats(1, 40), a=st.floats(0.1, 3), T=st.floats(0.5, 3)),
    comm_range=st.integers(1, 5),
    dt=st.sampled_from([0.01, 0.05, 0.1, 0.25]),
    t_end=st.floats(1, 500),
    collision_policy=st.sampled_from(["halt", "freeze"]),
    checkpoint=st.floats(0, 700),
    attacks=st.lists(
        st.one_of(
            st.builds(Attack, st.just("PositionOffset"), st.just(frozenset({1})), st.floats(0, 100), st.floats(0.1, 100), st.floats(-100, 100)),
            st.builds(Attack, st.just("DropLeaders"), st.just(frozenset({1})), st.floats(0, 100), st.just(math.inf)),
            st.builds(Attack, st.just("VelocityScale"), st.just(frozenset({1})), st.floats(0, 100), st.floats(0.1, 100), st.floats(0, 3)),
        ),
        max_size=3,
    ).map(tuple),
)


@settings(max_examples=60)
@given(scenarios)
def test_scenario_round_trip(sc):
    assert parse_scenario(dump_scenario(sc)) == sc


def test_round_trip_with_initial():
    sc = Scenario(n_vehicles=3, initial=((100.0, 5.0), (80.0, 4.0), (61.5, 0.0)))
    assert parse_scenario(dump_scenario(sc)) == sc


def _one_tick_log():
    return TrajectoryLog(0.1, (1,), [TrajectoryRecord(0.0, 1, 0.0, 0.0, 0.73, None)])


def test_csv_empty_log():
    assert write_trajectory_csv(TrajectoryLog(0.1, ())) == "t,id,x,v,a,gap\n"


def test_csv_one_tick():
    text = write_trajectory_csv(_one_tick_log())
    assert text.splitlines() == ["t,id,x,v,a,gap", "0,1,0,0,0.73,"]


@pytest.fixture(scope="module")
def spacing_run():
    return run(Scenario(attacks=(Attack("PositionOffset", {5}, 10, 75, 80.0),)))


@pytest.fixture(scope="module")
def baseline_run():
    return run(Scenario())


def test_csv_round_trip(baseline_run):
    log = baseline_run[0]
    text = write_trajectory_csv(log)
    assert len(text.splitlines()) == log.n_ticks * 9 + 1
    back = read_trajectory_csv(text)
    assert back.vehicle_ids == log.vehicle_ids
    assert back.dt == pytest.approx(0.1, abs=1e-6)
    for a, b in zip(log.records, back.records):
        assert a.id == b.id
        for col in ("t", "x", "v", "a", "gap"):
            x, y = getattr(a, col), getattr(b, col)
            if x is None:
                assert y is None
            else:
                assert y == pytest.approx(x, rel=5e-6, abs=1e-9)


def test_summary_json_round_trip():
    s = RunSummary([CollisionEvent(19.3, 5, 4, -0.11)], {1: 70.5, 2: 72.25}, 600.0, {1: 0.5})
    text = summary_to_json(s)
    doc = json.loads(text)
    assert doc["collisions"] == [{"t": 19.3, "follower": 5, "leader": 4, "gap": -0.11}]
    assert doc["arrivals"] == {"1": 70.5, "2": 72.25}
    assert summary_from_json(text) == s


def _parse_svg(text):
    root = ET.fromstring(text)
    assert root.tag == "{http://www.w3.org/2000/svg}svg"
    return root


NS = {"s": "http://www.w3.org/2000/svg"}


def test_svg_baseline(baseline_run):
    log, events, _ = baseline_run
    svg = render_timeseries_svg(log, events)
    root = _parse_svg(svg)
    panels = root.findall("s:g[@class='panel']", NS)
    assert [p.get("id") for p in panels] == ["panel-x", "panel-v", "panel-a", "panel-gap"]
    for panel in panels[:3]:
        assert len(panel.findall("s:polyline", NS)) == 9
    # the platoon leader has no physical leader, so no gap curve
    assert len(panels[3].findall("s:polyline", NS)) == 8
    assert not root.findall(".//s:g[@class='collision']", NS)
    assert len(root.findall("s:g[@class='legend']/s:text", NS)) == 9
    assert "href" not in svg and "url(" not in svg


def test_svg_marks_collision(spacing_run):
    log, events, _ = spacing_run
    root = _parse_svg(render_timeseries_svg(log, events))
    marks = root.findall("s:g[@id='panel-x']/s:g[@class='collision']", NS)
    assert len(marks) == 1
    assert log.times()[-1] == pytest.approx(events[0].t)


def test_svg_single_tick():
    root = _parse_svg(render_timeseries_svg(_one_tick_log()))
    assert len(root.findall("s:g[@class='panel']", NS)) == 4


def test_svg_empty_log():
    with pytest.raises(ValueError):
        render_timeseries_svg(TrajectoryLog(0.1, (1,)))


def test_svg_deterministic(baseline_run):
    log, events, _ = baseline_run
    assert render_timeseries_svg(log, events) == render_timeseries_svg(log, events)
