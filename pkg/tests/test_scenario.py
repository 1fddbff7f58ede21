import pytest

from icingplant.scenario import (
    Event,
    InitialState,
    Scenario,
    ScenarioError,
    load_scenario,
    save_scenario,
)


def test_shipped_scenario_valid(shipped_scenario):
    assert shipped_scenario.validate(12) == []
    assert shipped_scenario.duration == 1200.0
    assert shipped_scenario.n_steps == 1200
    actions = [(e.t, e.action) for e in shipped_scenario.events]
    assert (240.0, "disable_valve") in actions
    assert (480.0, "enable_valve") in actions


def test_json_round_trip(tmp_path, shipped_scenario):
    path = tmp_path / "sc.json"
    save_scenario(shipped_scenario, str(path))
    again = load_scenario(str(path))
    assert again.to_dict() == shipped_scenario.to_dict()


def test_event_beyond_duration_invalid():
    sc = Scenario(duration=100.0, events=[
        Event(t=150.0, action="set_v_ts", args={"value_mps": 30.0})])
    problems = sc.validate(12)
    assert any("outside" in p for p in problems)


def test_decreasing_event_times_invalid():
    sc = Scenario(duration=100.0, events=[
        Event(t=50.0, action="set_v_ts", args={"value_mps": 30.0}),
        Event(t=20.0, action="set_v_ts", args={"value_mps": 40.0})])
    assert any("nondecreasing" in p for p in sc.validate(12))


def test_unknown_action_invalid():
    sc = Scenario(duration=10.0, events=[Event(t=1.0, action="explode")])
    assert any("unknown action" in p for p in sc.validate(12))


def test_negative_setpoint_invalid():
    sc = Scenario(duration=10.0, events=[
        Event(t=1.0, action="set_water_setpoint", args={"value_lph": -2.0})])
    assert any("value_lph" in p for p in sc.validate(12))


def test_valve_index_bounds():
    sc = Scenario(duration=10.0, events=[
        Event(t=1.0, action="disable_valve", args={"valve": 13})])
    assert any("valve" in p for p in sc.validate(12))


def test_events_snap_to_grid():
    sc = Scenario(duration=10.0, step=1.0, events=[
        Event(t=2.0, action="set_v_ts", args={"value_mps": 30.0}),
        Event(t=2.4, action="set_v_ts", args={"value_mps": 31.0}),
    ])
    assert [e.args["value_mps"] for e in sc.events_at_step(2)] == [30.0]
    assert [e.args["value_mps"] for e in sc.events_at_step(3)] == [31.0]


def test_load_rejects_bad_json(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{nope")
    with pytest.raises(ScenarioError, match="not valid JSON"):
        load_scenario(str(path))


def test_load_rejects_missing_duration(tmp_path):
    path = tmp_path / "missing.json"
    path.write_text('{"step_s": 1.0}')
    with pytest.raises(ScenarioError, match="malformed"):
        load_scenario(str(path))


def test_initial_state_defaults():
    init = InitialState.from_dict({})
    assert init.h_m == 0.8
    assert init.pre_settled is False
    assert init.enabled_valves is None
