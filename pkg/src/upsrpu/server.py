"""WebSocket telemetry and command server for interactive sessions.

The control loop runs on its own thread at simulated (optionally
wall-clock-paced) time.  Every Nth tick a telemetry frame is broadcast to
all connected clients through per-client bounded queues; when a client
cannot keep up its oldest frames are dropped, never blocking the loop.

Clients connect to /ws.  The first client to connect with ?role=pilot
holds command authority; everyone else is a viewer.  Command messages are
JSON objects {"type": ..., "payload": ...} of type force, reset, pause,
resume or load_scenario; anything else earns an error frame.  Force
payloads are clamped to the force sensor's measuring range.
"""

from __future__ import annotations

import asyncio
import json
import threading
import time
from collections import deque
from pathlib import Path

import numpy as np
from fastapi import FastAPI, WebSocket, WebSocketDisconnect

from .config import ScenarioConfig, ScenarioError, parse_scenario
from .loop import LogRecord, ScenarioRunner

SCHEMA_VERSION = 1
CLIENT_QUEUE_DEPTH = 256


def telemetry_frame(record: LogRecord) -> dict:
    """Decimated per-tick snapshot sent to the dashboard."""
    return {
        "type": "telemetry",
        "schema": SCHEMA_VERSION,
        "tick": record.tick,
        "t": record.t,
        "x_meas": record.x_meas,
        "x_true": record.x_true,
        "x_a": record.x_a,
        "q_ref": record.q_ref,
        "q_cmd": record.q_cmd,
        "q_meas": record.q_meas,
        "min_omega_ref": record.min_omega_ref,
        "min_omega_meas": record.min_omega_meas,
        "pair": record.pair,
        "delta_steps": record.delta_steps,
        "ext_pin": record.ext_pin,
        "f_c": record.f_c,
        "events": record.events,
    }


class SessionHub:
    """Owns the loop thread and fans telemetry out to clients."""

    def __init__(self, config: ScenarioConfig, realtime: bool = True):
        self.config = config
        self.realtime = realtime
        self.paused = False
        self.stopped = False
        self._lock = threading.Lock()
        self._clients: dict[int, deque] = {}
        self._next_client = 0
        self._pilot: int | None = None
        self._queued_commands: list[tuple[str, object]] = []
        self.runner = ScenarioRunner(config, telemetry=self._on_record)
        self._thread: threading.Thread | None = None

    # -- loop thread ----------------------------------------------------

    def start(self):
        self._thread = threading.Thread(target=self._run, daemon=True)
        self._thread.start()

    def stop(self):
        self.stopped = True
        if self._thread is not None:
            self._thread.join(timeout=2.0)

    def _run(self):
        next_deadline = time.monotonic()
        while not self.stopped:
            if self.paused or self.runner.finished:
                time.sleep(0.02)
                next_deadline = time.monotonic()
                continue
            self._apply_commands()
            self.runner.tick()
            if self.realtime:
                next_deadline += self.config.control_period
                delay = next_deadline - time.monotonic()
                if delay > 0:
                    time.sleep(delay)
                else:
                    next_deadline = time.monotonic()

    def _apply_commands(self):
        with self._lock:
            commands, self._queued_commands = self._queued_commands, []
        for kind, payload in commands:
            if kind == "force":
                self.runner.queue_force(payload)
            elif kind == "reset":
                self.runner.queue_reset()
            elif kind == "load_scenario":
                self.config = payload
                self.runner = ScenarioRunner(payload, telemetry=self._on_record)

    def _on_record(self, record: LogRecord):
        if record.tick % self.config.telemetry_decimation != 0:
            return
        frame = telemetry_frame(record)
        with self._lock:
            for q in self._clients.values():
                q.append(frame)  # bounded deque: oldest frames fall off

    # -- client management ----------------------------------------------

    def register(self, want_pilot: bool) -> tuple[int, str, deque]:
        with self._lock:
            client_id = self._next_client
            self._next_client += 1
            queue: deque = deque(maxlen=CLIENT_QUEUE_DEPTH)
            self._clients[client_id] = queue
            role = "viewer"
            if want_pilot and self._pilot is None:
                self._pilot = client_id
                role = "pilot"
            return client_id, role, queue

    def unregister(self, client_id: int):
        with self._lock:
            self._clients.pop(client_id, None)
            if self._pilot == client_id:
                self._pilot = None

    def handle_command(self, client_id: int, message: dict) -> dict | None:
        """Apply a command message; returns an error frame or None."""
        kind = message.get("type")
        if kind not in ("force", "reset", "pause", "resume", "load_scenario"):
            return {"type": "error", "message": f"unknown command type {kind!r}"}
        if self._pilot != client_id:
            return {"type": "error", "message": "command authority belongs to another client"}
        if kind == "force":
            payload = message.get("payload")
            if not isinstance(payload, list) or len(payload) != 4:
                return {"type": "error", "message": "force payload must be 4 numbers"}
            try:
                value = np.asarray(payload, dtype=float)
            except (TypeError, ValueError):
                return {"type": "error", "message": "force payload must be 4 numbers"}
            limit = self.config.force_sensor.measuring_range
            with self._lock:
                self._queued_commands.append(("force", np.clip(value, -limit, limit)))
        elif kind == "pause":
            self.paused = True
        elif kind == "resume":
            self.paused = False
        elif kind == "reset":
            with self._lock:
                self._queued_commands.append(("reset", None))
            self.paused = False
        elif kind == "load_scenario":
            payload = message.get("payload") or {}
            path = payload.get("path") if isinstance(payload, dict) else None
            if not path:
                return {"type": "error", "message": "load_scenario payload needs a path"}
            try:
                new_config = parse_scenario(path)
            except ScenarioError as exc:
                return {"type": "error", "message": f"scenario rejected: {exc}"}
            with self._lock:
                self._queued_commands.append(("load_scenario", new_config))
        return None

    def status(self) -> dict:
        if self.runner.finished:
            state = "finished"
        elif self.paused:
            state = "paused"
        else:
            state = "running"
        return {
            "type": "status",
            "schema": SCHEMA_VERSION,
            "state": state,
            "tick": self.runner.tick_index,
            "mode": self.config.mode,
        }


def make_app(config: ScenarioConfig, realtime: bool = True,
             frontend_dir: str | Path | None = None) -> FastAPI:
    from contextlib import asynccontextmanager

    hub = SessionHub(config, realtime=realtime)

    @asynccontextmanager
    async def lifespan(_app):
        hub.start()
        yield
        hub.stop()

    app = FastAPI(lifespan=lifespan)
    app.state.hub = hub

    @app.websocket("/ws")
    async def ws_endpoint(websocket: WebSocket):
        await websocket.accept()
        want_pilot = websocket.query_params.get("role") == "pilot"
        client_id, role, queue = hub.register(want_pilot)
        await websocket.send_text(json.dumps({
            "type": "hello",
            "schema": SCHEMA_VERSION,
            "role": role,
            "mode": hub.config.mode,
            "control_period": hub.config.control_period,
            "decimation": hub.config.telemetry_decimation,
            "omega_limit_deg": hub.config.avoidance.omega_limit_deg,
        }))

        async def sender():
            while True:
                sent = False
                while queue:
                    frame = queue.popleft()
                    await websocket.send_text(json.dumps(frame))
                    sent = True
                if not sent:
                    await asyncio.sleep(0.005)

        async def receiver():
            while True:
                raw = await websocket.receive_text()
                try:
                    message = json.loads(raw)
                    if not isinstance(message, dict):
                        raise ValueError("not an object")
                except (json.JSONDecodeError, ValueError):
                    await websocket.send_text(json.dumps(
                        {"type": "error", "message": "malformed command message"}
                    ))
                    continue
                error = hub.handle_command(client_id, message)
                if error is not None:
                    await websocket.send_text(json.dumps(error))
                else:
                    await websocket.send_text(json.dumps(hub.status()))

        tasks = [asyncio.ensure_future(sender()), asyncio.ensure_future(receiver())]
        try:
            done, pending = await asyncio.wait(tasks, return_when=asyncio.FIRST_EXCEPTION)
            for task in pending:
                task.cancel()
            for task in done:
                exc = task.exception()
                if exc is not None and not isinstance(exc, WebSocketDisconnect):
                    raise exc
        except WebSocketDisconnect:
            pass
        finally:
            for task in tasks:
                task.cancel()
            hub.unregister(client_id)

    frontend = Path(frontend_dir) if frontend_dir else Path(__file__).resolve().parents[2] / "frontend" / "dist"
    if frontend.is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=str(frontend), html=True), name="ui")

    return app
