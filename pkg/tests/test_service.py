import json

import pytest
from fastapi.testclient import TestClient

from icingplant.engine import Simulator
from icingplant.scenario import InitialState, Scenario
from icingplant.service import LiveSession, create_app, snapshot_payload


def make_scenario(duration=100000.0):
    return Scenario(duration=duration, initial=InitialState(
        h_m=0.8, t_w_c=70.4, t_a_c=70.7, t_ts_c=-15.0, v_ts_mps=50.0,
        water_setpoint_lph=6.0, air_setpoint_lpm=6.0,
        p_heat_w=2300.0, p_heat_a=1000.0, pre_settled=True))


@pytest.fixture
def client(shipped_cfg):
    app = create_app(shipped_cfg, make_scenario(), real_time=False)
    with TestClient(app) as c:
        yield c


def read_until(ws, predicate, limit=500):
    for _ in range(limit):
        frame = json.loads(ws.receive_text())
        if predicate(frame):
            return frame
    raise AssertionError("expected frame not received")


def test_get_config_reports_ranges(client):
    doc = client.get("/config").json()
    assert doc["config"]["n_conduits"] == 12
    assert doc["ranges"]["T_TS"] == [-15.0, -1.2]
    assert doc["ranges"]["v_TS"] == [25.0, 50.0]
    assert doc["protocol_version"] == 1


def test_get_state_is_snapshot(client):
    doc = client.get("/state").json()
    assert doc["type"] == "snapshot"
    assert "lwc_gm3" in doc and "water" in doc


def test_live_stream_monotone_steps(client):
    with client.websocket_connect("/live") as ws:
        frames = [json.loads(ws.receive_text()) for _ in range(10)]
    snaps = [f for f in frames if f["type"] == "snapshot"]
    steps = [s["step"] for s in snaps]
    assert steps == sorted(steps)
    assert len(set(steps)) >= len(steps) - 1     # first frame may duplicate


def test_disable_valve_acked_and_effective(client):
    with client.websocket_connect("/live") as ws:
        json.loads(ws.receive_text())            # greeting snapshot
        ws.send_text(json.dumps({"id": 7, "action": "disable_valve",
                                 "args": {"valve": 1}}))
        ack = read_until(ws, lambda f: f["type"] == "ack")
        assert ack["id"] == 7
        effective = ack["effective_step"]
        snap = read_until(ws, lambda f: f["type"] == "snapshot"
                          and f["step"] >= effective)
        assert snap["water"][0]["flow_lph"] == 0.0
        assert snap["air"][0]["flow_lpm"] == 0.0


def test_malformed_frame_gets_error(client):
    with client.websocket_connect("/live") as ws:
        json.loads(ws.receive_text())
        ws.send_text("this is not json")
        frame = read_until(ws, lambda f: f["type"] == "error")
        assert "JSON" in frame["message"] or "object" in frame["message"]


def test_invalid_action_rejected_without_effect(client):
    with client.websocket_connect("/live") as ws:
        json.loads(ws.receive_text())
        ws.send_text(json.dumps({"id": 1, "action": "set_v_ts",
                                 "args": {"value_mps": -5.0}}))
        frame = read_until(ws, lambda f: f["type"] == "error")
        assert frame["id"] == 1


def test_pause_resume_reset(client):
    with client.websocket_connect("/live") as ws:
        json.loads(ws.receive_text())
        ws.send_text(json.dumps({"id": 2, "cmd": "pause"}))
        read_until(ws, lambda f: f["type"] == "ack" and f["id"] == 2)
        ws.send_text(json.dumps({"id": 3, "cmd": "reset"}))
        read_until(ws, lambda f: f["type"] == "ack" and f["id"] == 3)
        snap = read_until(ws, lambda f: f["type"] == "snapshot" and f["step"] == 0)
        assert snap["t"] == 0.0


def test_two_clients_identical_snapshots(client):
    with client.websocket_connect("/live") as a, client.websocket_connect("/live") as b:
        frames_a = {}
        frames_b = {}
        for _ in range(40):
            fa = json.loads(a.receive_text())
            fb = json.loads(b.receive_text())
            if fa.get("type") == "snapshot":
                frames_a[fa["step"]] = fa
            if fb.get("type") == "snapshot":
                frames_b[fb["step"]] = fb
        common = set(frames_a) & set(frames_b)
        assert common
        for step in common:
            assert frames_a[step] == frames_b[step]


def test_session_commands_equal_scripted_scenario(shipped_cfg):
    """Driving the session's queue directly must equal the scripted run."""
    from icingplant.scenario import Event

    scripted = make_scenario(60.0)
    scripted.events.append(Event(t=10.0, action="disable_valve", args={"valve": 2}))
    scripted_trace = Simulator(shipped_cfg, scripted).run()

    session = LiveSession(shipped_cfg, make_scenario(60.0))
    rows = [session.sim.last_row]
    while not session.sim.finished:
        if session.sim.k == 10:
            session.handle_command({"id": 0, "action": "disable_valve",
                                    "args": {"valve": 2}})
        rows.append(session.sim.step_once())
    assert len(rows) == len(scripted_trace)
    for a, b in zip(scripted_trace.rows, rows):
        assert a.to_dict() == b.to_dict()


def test_snapshot_payload_shape(shipped_cfg):
    sim = Simulator(shipped_cfg, make_scenario(30.0))
    doc = snapshot_payload(sim.last_row)
    assert doc["type"] == "snapshot"
    assert doc["v"] == 1
    assert len(doc["water"]) == 12
    assert {"enabled", "setpoint_lph", "flow_lph", "opening"} <= set(doc["water"][0])


def test_open_loop_snapshot_stream_steps_at_event_times(shipped_cfg, shipped_scenario):
    """The snapshot stream the dashboard charts consume: replaying the
    open-loop scenario yields LWC transitions exactly at the scripted
    event times (within the PI settling window) and nowhere else."""
    session = LiveSession(shipped_cfg, shipped_scenario)
    lwc = [session.sim.last_row.lwc_gm3]
    while not session.sim.finished:
        lwc.append(snapshot_payload(session.sim.step_once())["lwc_gm3"])
    event_times = (240, 442, 480, 576, 696, 924)
    transitions = [t for t in range(1, len(lwc))
                   if abs(lwc[t] - lwc[t - 1]) > 0.005]
    assert transitions, "flow steps must be visible in the stream"
    for t in transitions:
        assert any(ev < t <= ev + 30 for ev in event_times), t
    # each water-flow event time produces a visible transition
    for ev in (240, 442, 696):
        assert any(ev < t <= ev + 30 for t in transitions), ev
