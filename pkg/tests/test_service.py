"""Websocket/HTTP service: sessions, acks, snapshots, replay scripts."""

import math

import pytest
from fastapi.testclient import TestClient

from auxsim.reports import run_scenario
from auxsim.scenario import parse_scenario
from auxsim.service import app

BASE = {"version": 1, "tick_s": 0.005, "commands": [], "realtime": False}


@pytest.fixture()
def client():
    with TestClient(app) as c:
        yield c


def make_session(client, **over):
    body = dict(BASE)
    body.update(over)
    r = client.post("/session", json=body)
    assert r.status_code == 200
    return r.json()["session_id"]


def recv_until_ack(ws):
    """Skip snapshot frames; return the next ack."""
    while True:
        msg = ws.receive_json()
        if msg["type"] == "ack":
            return msg


def send_ackd(ws, msg):
    ws.send_json(msg)
    return recv_until_ack(ws)


class TestRest:
    def test_create_returns_cadence(self, client):
        r = client.post("/session", json=dict(BASE))
        body = r.json()
        assert body["tick_s"] == 0.005
        assert body["snapshot_every_ticks"] == 10
        assert body["realtime"] is False

    def test_invalid_scenario_is_422_with_problems(self, client):
        r = client.post("/session", json={"version": 9, "commands": [], "junk": 1})
        assert r.status_code == 422
        joined = "\n".join(r.json()["problems"])
        assert "version" in joined and "junk" in joined

    def test_state_reflects_advances(self, client):
        sid = make_session(client)
        with client.websocket_connect(f"/session/{sid}") as ws:
            ws.receive_json()
            send_ackd(ws, {"type": "advance", "ticks": 40})
        st = client.get(f"/session/{sid}/state").json()
        assert st["tick"] == 40
        assert st["t_s"] == pytest.approx(0.2)

    def test_unknown_session_is_404(self, client):
        assert client.get("/session/nope/state").status_code == 404
        assert client.delete("/session/nope").status_code == 404

    def test_delete_removes_the_session(self, client):
        sid = make_session(client)
        assert client.delete(f"/session/{sid}").status_code == 200
        assert client.get(f"/session/{sid}/state").status_code == 404


class TestSocket:
    def test_first_frame_is_a_snapshot(self, client):
        sid = make_session(client)
        with client.websocket_connect(f"/session/{sid}") as ws:
            first = ws.receive_json()
            assert first["type"] == "snapshot"
            assert first["state"]["tick"] == 0
            assert first["state"]["mode"] == "cross_link"

    def test_ack_carries_apply_tick_and_seq(self, client):
        sid = make_session(client)
        with client.websocket_connect(f"/session/{sid}") as ws:
            ws.receive_json()
            send_ackd(ws, {"type": "advance", "ticks": 30})
            ack = send_ackd(ws, {"type": "fold", "dir": 1, "seq": 77})
            assert ack["seq"] == 77
            assert ack["accepted"] is True
            assert ack["apply_tick"] == 30

    def test_snapshot_cadence_per_advance_batch(self, client):
        sid = make_session(client)
        with client.websocket_connect(f"/session/{sid}") as ws:
            ws.receive_json()
            for expect in (10, 20, 30):
                send_ackd(ws, {"type": "advance", "ticks": 10})
                frame = ws.receive_json()
                assert frame["type"] == "snapshot"
                assert frame["state"]["tick"] == expect

    def test_slow_reader_gets_latest_frame_with_all_events(self, client):
        sid = make_session(client)
        with client.websocket_connect(f"/session/{sid}") as ws:
            ws.receive_json()
            send_ackd(ws, {"type": "fold", "dir": 1})
            # 200 ticks pass before this client reads again: frames coalesce
            send_ackd(ws, {"type": "advance", "ticks": 200})
            frame = ws.receive_json()
            assert frame["state"]["tick"] == 200
            assert frame["state"]["locked"] is True
            names = [e["name"] for e in frame["events"]]
            assert "lock_engaged" in names

    def test_turn_while_locked_rejected_verbatim(self, client):
        sid = make_session(client)
        with client.websocket_connect(f"/session/{sid}") as ws:
            ws.receive_json()
            send_ackd(ws, {"type": "fold", "dir": 1})
            send_ackd(ws, {"type": "advance", "ticks": 200})
            ack = send_ackd(ws, {"type": "turn", "dir": 1})
            assert ack["accepted"] is False
            assert ack["reason"] == "locked: run release first"

    def test_unknown_chamber_rejected_verbatim(self, client):
        sid = make_session(client)
        with client.websocket_connect(f"/session/{sid}") as ws:
            ws.receive_json()
            ack = send_ackd(ws, {"type": "set_chamber", "id": "f9.c9",
                                 "state": "vacuum"})
            assert ack["accepted"] is False
            assert "unknown chamber 'f9.c9'" in ack["reason"]

    def test_bad_state_word_rejected(self, client):
        sid = make_session(client)
        with client.websocket_connect(f"/session/{sid}") as ws:
            ws.receive_json()
            ack = send_ackd(ws, {"type": "set_chamber", "id": "body.0",
                                 "state": "open"})
            assert ack["accepted"] is False
            assert "'vacuum' or 'ambient'" in ack["reason"]

    def test_start_gait_runs_the_pair(self, client):
        sid = make_session(client)
        with client.websocket_connect(f"/session/{sid}") as ws:
            ws.receive_json()
            ack = send_ackd(ws, {"type": "start_gait", "pair": [0, 1]})
            assert ack["accepted"] is True
            send_ackd(ws, {"type": "advance", "ticks": 100})
            frame = ws.receive_json()
            assert frame["state"]["maneuver"] == "crawl01"
            send_ackd(ws, {"type": "advance", "ticks": 500})
            frame = ws.receive_json()
            assert frame["state"]["maneuver"] is None  # one step, then done

    def test_unknown_type_rejected(self, client):
        sid = make_session(client)
        with client.websocket_connect(f"/session/{sid}") as ws:
            ws.receive_json()
            ack = send_ackd(ws, {"type": "warp"})
            assert ack["accepted"] is False
            assert "unknown command type" in ack["reason"]

    def test_non_json_payload_reports_error(self, client):
        sid = make_session(client)
        with client.websocket_connect(f"/session/{sid}") as ws:
            ws.receive_json()
            ws.send_text("not json {")
            msg = ws.receive_json()
            assert msg["type"] == "error"

    def test_advance_rejected_on_realtime_session(self, client):
        sid = make_session(client, realtime=True)
        try:
            with client.websocket_connect(f"/session/{sid}") as ws:
                ws.receive_json()
                ack = send_ackd(ws, {"type": "advance", "ticks": 5})
                assert ack["accepted"] is False
                assert "realtime" in ack["reason"]
        finally:
            client.delete(f"/session/{sid}")


class TestResetAndConfig:
    def test_reset_rewinds_to_fresh_state(self, client):
        sid = make_session(client)
        with client.websocket_connect(f"/session/{sid}") as ws:
            ws.receive_json()
            send_ackd(ws, {"type": "fold", "dir": 1})
            send_ackd(ws, {"type": "advance", "ticks": 200})
            ws.receive_json()
            ack = send_ackd(ws, {"type": "reset"})
            assert ack["accepted"] is True
            frame = ws.receive_json()
            assert frame["state"]["tick"] == 0
            assert frame["state"]["theta_deg"] == 0.0
            assert frame["state"]["locked"] is False

    def test_load_config_restarts_with_new_parameters(self, client):
        sid = make_session(client)
        with client.websocket_connect(f"/session/{sid}") as ws:
            ws.receive_json()
            send_ackd(ws, {"type": "advance", "ticks": 20})
            ws.receive_json()
            ack = send_ackd(ws, {"type": "load_config",
                                 "config": {"mu_grip": 0.3, "tick_s": 0.005}})
            assert ack["accepted"] is True
            frame = ws.receive_json()
            assert frame["state"]["tick"] == 0

    def test_load_config_rejects_bad_parameters(self, client):
        sid = make_session(client)
        with client.websocket_connect(f"/session/{sid}") as ws:
            ws.receive_json()
            ack = send_ackd(ws, {"type": "load_config",
                                 "config": {"mu_grip": -2.0}})
            assert ack["accepted"] is False
            assert "mu_grip" in ack["reason"]


class TestReplayScript:
    def test_script_replays_to_the_same_state(self, client):
        sid = make_session(client)
        with client.websocket_connect(f"/session/{sid}") as ws:
            ws.receive_json()
            send_ackd(ws, {"type": "start_gait", "pair": [1, 2], "steps": 1})
            send_ackd(ws, {"type": "advance", "ticks": 300})
            send_ackd(ws, {"type": "set_chamber", "id": "f0.c1", "state": "vacuum"})
            send_ackd(ws, {"type": "advance", "ticks": 400})
        live = client.get(f"/session/{sid}/state").json()
        resp = client.delete(f"/session/{sid}")
        script = parse_scenario(resp.text)
        assert [c["op"] for c in script.commands] == ["crawl", "set_chamber"]
        res = run_scenario(script)
        for key in ("tick", "x_mm", "y_mm", "heading_deg", "theta_deg", "locked"):
            assert res.final[key] == live[key], key
        assert res.final["chambers"] == live["chambers"]

    def test_rejected_commands_replay_as_rejections(self, client):
        sid = make_session(client)
        with client.websocket_connect(f"/session/{sid}") as ws:
            ws.receive_json()
            send_ackd(ws, {"type": "fold", "dir": 1})
            send_ackd(ws, {"type": "advance", "ticks": 200})
            ack = send_ackd(ws, {"type": "turn", "dir": 1})
            assert ack["accepted"] is False
            send_ackd(ws, {"type": "advance", "ticks": 40})
        live = client.get(f"/session/{sid}/state").json()
        script = parse_scenario(client.delete(f"/session/{sid}").text)
        assert [c["op"] for c in script.commands] == ["fold", "turn"]
        res = run_scenario(script)
        assert [r["op"] for r in res.rejected] == ["turn"]
        assert res.final["theta_deg"] == live["theta_deg"]
        assert res.final["locked"] is True

    def test_malformed_commands_stay_out_of_the_script(self, client):
        sid = make_session(client)
        with client.websocket_connect(f"/session/{sid}") as ws:
            ws.receive_json()
            ack = send_ackd(ws, {"type": "grasp", "object": "ghost"})
            assert ack["accepted"] is False
            send_ackd(ws, {"type": "advance", "ticks": 10})
        script = parse_scenario(client.delete(f"/session/{sid}").text)
        assert script.commands == []

    def test_scheduled_commands_apply_and_replay(self, client):
        sid = make_session(client, commands=[
            {"t_s": 0.1, "op": "fold", "direction": -1}], duration_s=2.0)
        with client.websocket_connect(f"/session/{sid}") as ws:
            ws.receive_json()
            send_ackd(ws, {"type": "advance", "ticks": 250})
        live = client.get(f"/session/{sid}/state").json()
        assert live["theta_deg"] == -144.0
        script = parse_scenario(client.delete(f"/session/{sid}").text)
        assert [(c["t_s"], c["op"]) for c in script.commands] == [(0.1, "fold")]
        res = run_scenario(script)
        assert res.final["theta_deg"] == live["theta_deg"]

    def test_crawl_distance_survives_replay_exactly(self, client):
        sid = make_session(client)
        with client.websocket_connect(f"/session/{sid}") as ws:
            ws.receive_json()
            send_ackd(ws, {"type": "start_gait", "pair": [0, 1]})
            send_ackd(ws, {"type": "advance", "ticks": 600})
        live = client.get(f"/session/{sid}/state").json()
        assert math.hypot(live["x_mm"], live["y_mm"]) > 0.0
        res = run_scenario(parse_scenario(client.delete(f"/session/{sid}").text))
        assert (res.final["x_mm"], res.final["y_mm"]) == (live["x_mm"], live["y_mm"])
