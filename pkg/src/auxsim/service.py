"""Websocket/HTTP front end over the simulator.

One session wraps one simulator. REST surface:

  POST   /session          create from a scenario document, returns the id
  GET    /session/{id}/state   latest snapshot
  DELETE /session/{id}     tear down; the response body is a scenario
                           document replaying everything the session ran

The websocket at /session/{id} takes JSON command messages and pushes
state. Every command is acked in arrival order with the tick it applied
at and the verbatim rejection reason if it did not. Snapshots go out at
the config's cadence with latest-wins backpressure: a slow reader skips
intermediate frames but never loses events, which accumulate until the
next frame goes through.

Commands land on tick boundaries in arrival order. A session created
with "realtime": false only advances when told to ({"type": "advance",
"ticks": n}), which is what the tests and any scripted client want;
realtime sessions tick on the wall clock.

reset and load_config restart the simulator, so the replay script
DELETE returns covers the stretch since the most recent restart.
"""

from __future__ import annotations

import asyncio
import itertools
import json
from dataclasses import dataclass, field

from fastapi import FastAPI, WebSocket, WebSocketDisconnect
from fastapi.responses import JSONResponse, Response

from .config import ConfigError, SimConfig
from .scenario import (CHAMBER_STATES, Scenario, ScenarioError, emit_scenario,
                       parse_scenario, sim_command)
from .sim import Simulator

app = FastAPI(title="auxsim service")

_ids = itertools.count(1)


class _Conn:
    """One websocket with its outbound mailbox."""

    def __init__(self, ws: WebSocket):
        self.ws = ws
        self.acks: list[dict] = []
        self.snap: dict | None = None
        self.events: list[dict] = []
        self.wake = asyncio.Event()

    def push_ack(self, ack: dict) -> None:
        self.acks.append(ack)
        self.wake.set()

    def push_snapshot(self, snap: dict, events: list[dict]) -> None:
        self.snap = snap
        self.events.extend(events)
        self.wake.set()

    async def sender(self) -> None:
        while True:
            await self.wake.wait()
            self.wake.clear()
            acks, self.acks = self.acks, []
            snap, self.snap = self.snap, None
            events, self.events = self.events, []
            for a in acks:
                await self.ws.send_json(a)
            if snap is not None:
                await self.ws.send_json({"type": "snapshot", "state": snap,
                                         "events": events})


@dataclass
class _Session:
    sid: str
    base: Scenario
    sim: Simulator
    realtime: bool
    lock: asyncio.Lock = field(default_factory=asyncio.Lock)
    log: list[dict] = field(default_factory=list)
    next_scheduled: int = 0
    event_cursor: int = 0
    conns: list[_Conn] = field(default_factory=list)
    pump: asyncio.Task | None = None

    def restart(self, config: SimConfig | None = None) -> None:
        if config is not None:
            self.base.config = config
        self.sim = Simulator(self.base.config, scene=self.base.scene)
        self.log = []
        self.next_scheduled = len(self.base.commands)  # scheduled ones ran once
        self.event_cursor = 0

    def broadcast(self) -> None:
        snap = self.sim.snapshot()
        events = self.sim.events[self.event_cursor:]
        self.event_cursor = len(self.sim.events)
        for c in self.conns:
            c.push_snapshot(snap, events)

    def apply(self, cmd: dict) -> tuple[bool, str | None]:
        """Apply one scenario-form command now and record it."""
        ok, reason = self.sim.apply_command(*sim_command(cmd))
        self.log.append({"t_s": self.sim.t_s, **{k: v for k, v in cmd.items() if k != "t_s"}})
        return ok, reason

    def tick_once(self) -> None:
        due = self.base.commands
        while self.next_scheduled < len(due):
            cmd = due[self.next_scheduled]
            if round(cmd["t_s"] / self.base.config.tick_s) > self.sim.tick_count:
                break
            self.next_scheduled += 1
            self.apply(cmd)
        self.sim.tick()
        if self.sim.tick_count % self.base.config.snapshot_every_ticks == 0:
            self.broadcast()

    def script(self) -> Scenario:
        duration = max(self.sim.t_s, self.base.config.tick_s)
        return Scenario(
            name=self.base.name,
            description=self.base.description,
            duration_s=duration,
            config=self.base.config,
            scene=self.base.scene,
            commands=list(self.log),
        )

    async def run_pump(self) -> None:
        every = self.base.config.snapshot_every_ticks
        period = every * self.base.config.tick_s
        loop = asyncio.get_running_loop()
        next_at = loop.time() + period
        while True:
            await asyncio.sleep(max(0.0, next_at - loop.time()))
            next_at += period
            async with self.lock:
                for _ in range(every):
                    self.tick_once()


_sessions: dict[str, _Session] = {}


def _error(status: int, problems: list[str]) -> JSONResponse:
    return JSONResponse({"problems": problems}, status_code=status)


@app.post("/session")
async def create_session(body: dict):
    realtime = body.pop("realtime", True)
    if not isinstance(realtime, bool):
        return _error(422, ["realtime: must be true or false"])
    try:
        sc = parse_scenario(json.dumps(body))
    except ScenarioError as e:
        return _error(422, e.problems)
    sid = f"s{next(_ids)}"
    session = _Session(sid=sid, base=sc, sim=Simulator(sc.config, scene=sc.scene),
                       realtime=realtime)
    _sessions[sid] = session
    if realtime:
        session.pump = asyncio.create_task(session.run_pump())
    return {"session_id": sid, "tick_s": sc.config.tick_s,
            "snapshot_every_ticks": sc.config.snapshot_every_ticks,
            "realtime": realtime}


@app.get("/session/{sid}/state")
async def session_state(sid: str):
    session = _sessions.get(sid)
    if session is None:
        return _error(404, [f"unknown session {sid!r}"])
    async with session.lock:
        return session.sim.snapshot()


@app.delete("/session/{sid}")
async def delete_session(sid: str):
    session = _sessions.pop(sid, None)
    if session is None:
        return _error(404, [f"unknown session {sid!r}"])
    if session.pump is not None:
        session.pump.cancel()
    async with session.lock:
        text = emit_scenario(session.script())
    for conn in list(session.conns):
        try:
            await conn.ws.close()
        except RuntimeError:
            pass  # already gone
    return Response(content=text, media_type="application/json")


# wire command type -> scenario-form command builder; None fields are errors
def _wire_to_scenario(msg: dict) -> tuple[dict | None, str | None]:
    t = msg.get("type")
    if t == "set_chamber":
        state = msg.get("state")
        if state not in CHAMBER_STATES:
            return None, "state must be 'vacuum' or 'ambient'"
        return {"op": "set_chamber", "chamber": msg.get("id"), "state": state}, None
    if t == "start_gait":
        pair = msg.get("pair")
        if not isinstance(pair, list) or len(pair) != 2:
            return None, "pair must be a two-leg list"
        steps = msg.get("steps", 1)
        return {"op": "crawl", "pair": pair, "steps": steps}, None
    if t in ("turn", "fold"):
        return {"op": t, "direction": msg.get("dir")}, None
    if t == "release":
        return {"op": "release"}, None
    if t == "halt":
        return {"op": "halt"}, None
    if t == "grasp":
        return {"op": "grasp", "object": msg.get("object")}, None
    return None, f"unknown command type {msg.get('type')!r}"


def _schema_valid(session: _Session, cmd: dict) -> bool:
    """Only commands a scenario file could express go into the replay log."""
    from .scenario import _check_command  # shared validator, kept in one place
    from .sim import CHAMBER_IDS
    problems: list[str] = []
    checked = _check_command(0, {"t_s": 0.0, **cmd}, CHAMBER_IDS,
                             set(session.sim.scene), problems)
    return checked is not None


async def _handle_message(session: _Session, conn: _Conn, msg: dict) -> None:
    seq = msg.get("seq")
    t = msg.get("type")

    def ack(accepted: bool, reason: str | None = None) -> dict:
        return {"type": "ack", "seq": seq, "op": t, "accepted": accepted,
                "reason": reason, "apply_tick": session.sim.tick_count}

    if t == "advance":
        ticks = msg.get("ticks")
        if session.realtime:
            conn.push_ack(ack(False, "advance requires a realtime:false session"))
            return
        if not isinstance(ticks, int) or isinstance(ticks, bool) or ticks < 1:
            conn.push_ack(ack(False, "ticks must be a positive integer"))
            return
        async with session.lock:
            for _ in range(ticks):
                session.tick_once()
            conn.push_ack(ack(True))
        return

    if t == "reset":
        async with session.lock:
            session.restart()
            conn.push_ack(ack(True))
            session.broadcast()
        return

    if t == "load_config":
        raw = msg.get("config")
        if not isinstance(raw, dict):
            conn.push_ack(ack(False, "config must be an object"))
            return
        try:
            config = SimConfig.from_dict(raw)
        except ConfigError as e:
            conn.push_ack(ack(False, "; ".join(e.problems)))
            return
        async with session.lock:
            session.restart(config)
            conn.push_ack(ack(True))
            session.broadcast()
        return

    cmd, err = _wire_to_scenario(msg)
    if cmd is None:
        conn.push_ack(ack(False, err))
        return
    async with session.lock:
        if _schema_valid(session, cmd):
            ok, reason = session.apply(cmd)
        else:
            ok, reason = session.sim.apply_command(*sim_command(cmd))
        conn.push_ack(ack(ok, reason))


@app.websocket("/session/{sid}")
async def session_socket(ws: WebSocket, sid: str):
    await ws.accept()
    session = _sessions.get(sid)
    if session is None:
        await ws.send_json({"type": "error", "reason": f"unknown session {sid!r}"})
        await ws.close()
        return
    conn = _Conn(ws)
    session.conns.append(conn)
    sender = asyncio.create_task(conn.sender())
    conn.push_snapshot(session.sim.snapshot(), [])
    try:
        while True:
            try:
                msg = json.loads(await ws.receive_text())
            except json.JSONDecodeError:
                conn.push_ack({"type": "error", "reason": "message is not JSON"})
                continue
            if not isinstance(msg, dict):
                conn.push_ack({"type": "error", "reason": "message must be an object"})
                continue
            await _handle_message(session, conn, msg)
    except WebSocketDisconnect:
        pass
    finally:
        sender.cancel()
        if conn in session.conns:
            session.conns.remove(conn)
