"""Live simulation service backing the operator dashboard.

One engine task per server process; every connected client observes the
same snapshot stream (broadcast), and operator commands from any client
enter a single ordered queue drained at step boundaries.  Protocol over
the /live websocket, JSON payloads:

    server -> client   {"type": "snapshot", "v": 1, "step": k, ...trace row}
                       {"type": "ack", "id": ..., "effective_step": k}
                       {"type": "error", "id": ..., "message": ...}
                       {"type": "done", "step": k}
    client -> server   {"id": ..., "action": <scenario action>, "args": {...}}
                       {"id": ..., "cmd": "pause" | "resume" | "reset"}

The ack's effective_step is the first snapshot index that can reflect the
command; commands are applied exactly where scripted events with the same
boundary time would be, so live steering reproduces a scripted scenario
bit-identically.  Malformed frames get an error reply and close the
connection.

Endpoints: GET /state (latest snapshot), GET /config (plant config, grid
and slider ranges), WS /live, static dashboard at /.
"""

from __future__ import annotations

import asyncio
import json
import logging
import os
from contextlib import asynccontextmanager
from typing import Any, Optional

from fastapi import FastAPI, WebSocket, WebSocketDisconnect
from fastapi.responses import HTMLResponse, JSONResponse
from fastapi.staticfiles import StaticFiles

from .engine import SimulationHalt, Simulator, TraceRow
from .fitting.tables import VARIABLES, variable_range
from .plant import PlantConfig, config_to_dict
from .scenario import Scenario, ScenarioError

logger = logging.getLogger(__name__)

PROTOCOL_VERSION = 1

_FALLBACK_PAGE = """<!doctype html>
<html><head><title>icingplant</title></head>
<body><h1>icingplant service</h1>
<p>The dashboard bundle is not built. Endpoints: <code>GET /state</code>,
<code>GET /config</code>, websocket <code>/live</code>.</p>
</body></html>"""


def snapshot_payload(row: TraceRow) -> dict[str, Any]:
    doc = row.to_dict()
    doc["type"] = "snapshot"
    doc["v"] = PROTOCOL_VERSION
    doc["step"] = int(round(doc["t"]))
    return doc


class LiveSession:
    """Engine task plus subscriber fan-out."""

    def __init__(self, cfg: PlantConfig, scenario: Scenario,
                 real_time: bool = False, snapshot_every: int = 1):
        self.cfg = cfg
        self.scenario = scenario
        self.real_time = real_time
        self.snapshot_every = max(1, snapshot_every)
        self.sim = Simulator(cfg, scenario)
        self.paused = False
        self._subscribers: list[asyncio.Queue] = []
        self._task: Optional[asyncio.Task] = None
        self.latest = snapshot_payload(self.sim.last_row)
        self._done_sent = False

    # --- subscriptions ---------------------------------------------------

    def subscribe(self) -> asyncio.Queue:
        q: asyncio.Queue = asyncio.Queue(maxsize=4096)
        self._subscribers.append(q)
        return q

    def unsubscribe(self, q: asyncio.Queue) -> None:
        if q in self._subscribers:
            self._subscribers.remove(q)

    def _broadcast(self, payload: dict) -> None:
        for q in self._subscribers:
            try:
                q.put_nowait(payload)
            except asyncio.QueueFull:
                # slow consumer: drop the frame, the counter on the client
                # side surfaces the gap
                pass

    # --- commands ---------------------------------------------------------

    def handle_command(self, doc: dict) -> dict:
        """Apply or queue one client command; returns the reply frame."""
        cid = doc.get("id")
        if "cmd" in doc:
            cmd = doc["cmd"]
            if cmd == "pause":
                self.paused = True
            elif cmd == "resume":
                self.paused = False
            elif cmd == "reset":
                self.sim.reset()
                self.paused = False
                self._done_sent = False
                self.latest = snapshot_payload(self.sim.last_row)
                self._broadcast(self.latest)
            else:
                return {"type": "error", "id": cid, "message": f"unknown cmd {cmd!r}"}
            return {"type": "ack", "id": cid, "effective_step": self.sim.k}
        if "action" not in doc:
            return {"type": "error", "id": cid,
                    "message": "frame needs 'action' or 'cmd'"}
        try:
            step = self.sim.queue_action(doc["action"], doc.get("args", {}))
        except ScenarioError as exc:
            return {"type": "error", "id": cid, "message": str(exc)}
        return {"type": "ack", "id": cid, "effective_step": step}

    # --- engine loop -------------------------------------------------------

    async def run(self) -> None:
        try:
            while True:
                if self.paused:
                    await asyncio.sleep(0.02)
                    continue
                if self.sim.finished:
                    if not self._done_sent:
                        self._broadcast({"type": "done", "step": self.sim.k})
                        self._done_sent = True
                    await asyncio.sleep(0.05)
                    continue
                try:
                    row = self.sim.step_once()
                except SimulationHalt as exc:
                    self._broadcast({"type": "error", "id": None,
                                     "message": str(exc)})
                    self.paused = True
                    continue
                self.latest = snapshot_payload(row)
                if self.sim.k % self.snapshot_every == 0 or self.sim.finished:
                    self._broadcast(self.latest)
                if self.real_time:
                    await asyncio.sleep(self.scenario.step)
                else:
                    await asyncio.sleep(0)
        except asyncio.CancelledError:
            pass

    def start(self) -> None:
        if self._task is None or self._task.done():
            self._task = asyncio.create_task(self.run())

    async def stop(self) -> None:
        if self._task is not None:
            self._task.cancel()
            try:
                await self._task
            except asyncio.CancelledError:
                pass
            self._task = None


def dashboard_dir() -> Optional[str]:
    """Directory of the built dashboard bundle, when present."""
    candidates = [os.environ.get("ICINGPLANT_DASHBOARD", "")]
    here = os.path.dirname(os.path.abspath(__file__))
    candidates.append(os.path.join(here, "..", "..", "frontend", "dist"))
    candidates.append(os.path.join(os.getcwd(), "frontend", "dist"))
    for cand in candidates:
        if cand and os.path.isfile(os.path.join(cand, "index.html")):
            return os.path.abspath(cand)
    return None


def create_app(cfg: PlantConfig, scenario: Scenario, real_time: bool = False,
               snapshot_every: int = 1) -> FastAPI:
    session = LiveSession(cfg, scenario, real_time, snapshot_every)

    @asynccontextmanager
    async def lifespan(_app: FastAPI):
        session.start()
        yield
        await session.stop()

    app = FastAPI(title="icingplant live service", lifespan=lifespan)
    app.state.session = session

    @app.get("/state")
    async def get_state():
        return JSONResponse(session.latest)

    @app.get("/config")
    async def get_config():
        return JSONResponse({
            "config": config_to_dict(cfg),
            "scenario": {"duration_s": scenario.duration, "step_s": scenario.step},
            "ranges": {v: list(variable_range(v)) for v in VARIABLES},
            "protocol_version": PROTOCOL_VERSION,
        })

    @app.websocket("/live")
    async def live(ws: WebSocket):
        await ws.accept()
        queue = session.subscribe()
        await ws.send_text(json.dumps(session.latest))

        async def pump_outgoing():
            while True:
                payload = await queue.get()
                await ws.send_text(json.dumps(payload))

        pump = asyncio.create_task(pump_outgoing())
        try:
            while True:
                raw = await ws.receive_text()
                try:
                    doc = json.loads(raw)
                    if not isinstance(doc, dict):
                        raise ValueError("not an object")
                except ValueError as exc:
                    await ws.send_text(json.dumps(
                        {"type": "error", "id": None,
                         "message": f"frame must be a JSON object ({exc})"}))
                    break
                reply = session.handle_command(doc)
                await ws.send_text(json.dumps(reply))
        except WebSocketDisconnect:
            pass
        finally:
            pump.cancel()
            session.unsubscribe(queue)

    static = dashboard_dir()
    if static:
        app.mount("/", StaticFiles(directory=static, html=True), name="dashboard")
    else:
        @app.get("/")
        async def index():
            return HTMLResponse(_FALLBACK_PAGE)

    return app
