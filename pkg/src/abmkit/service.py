"""Interactive steering service: build a model, twiddle its parameters from
sliders, run/pause/reset it, and watch live frames and plot series.

HTTP endpoints cover the lifecycle; a WebSocket per session pushes one
message per completed step. All payloads are JSON with a version field
``v: 1``.

    GET  /api/models                      available models + control schemas
    POST /api/sessions                    {model, overrides?, seed?, frames?, step_delay_ms?}
    GET  /api/sessions/{id}               session info
    POST /api/sessions/{id}/params        {params: {key: value}} (staged)
    POST /api/sessions/{id}/run           {frames?: int}
    POST /api/sessions/{id}/pause
    POST /api/sessions/{id}/reset
    GET  /api/sessions/{id}/plotdata      plot series recomputed from the tapes
    WS   /api/sessions/{id}/stream        backlog + live step messages
    GET  /healthz

Step messages are draw lists (entities with positions/colors, plus graph
edges) extended with one plot point per label — clients draw, the server
never rasterizes. A worker thread owns each session's model; control
requests only stage changes, which the worker folds in at step boundaries,
so a model is never mutated mid-step.
"""

from __future__ import annotations

import itertools
import threading
import time
from contextlib import asynccontextmanager
from typing import Optional

from fastapi import FastAPI, HTTPException, WebSocket, WebSocketDisconnect
from pydantic import BaseModel

from .core import DEFAULT_SEED, run_model
from .errors import EngineError
from .gallery import GALLERY, get_entry, plot_series_frame
from .render import draw_list

DEFAULT_STEP_DELAY_MS = 50

# session status values
IDLE = "idle"
RUNNING = "running"
PAUSED = "paused"
FINISHED = "finished"

_REDUCERS = {"agents-fraction": "count-where", "nodes-mean": "mean-of"}


def _snap(key, lo, step, hi, raw):
    """Snap a requested value onto the slider's step grid, or reject it.

    Returns a value of the same type the grid is defined in (int sliders
    stay ints). Out-of-range values raise ValueError naming the bounds.
    """
    if isinstance(raw, bool) or not isinstance(raw, (int, float)):
        raise ValueError(f"{key} must be a number, got {raw!r}")
    if raw < lo or raw > hi:
        raise ValueError(f"{key}={raw} out of range [{lo}, {hi}] step {step}")
    k = round((raw - lo) / step)
    value = lo + k * step
    if isinstance(lo, int) and isinstance(step, int):
        return int(round(value))
    value = round(value, 12)  # scrub step-grid float noise
    return min(value, float(hi))


class Session:
    """One model instance plus the stream/worker state around it."""

    def __init__(self, sid, entry, model, seed, frames, step_delay):
        self.id = sid
        self.entry = entry
        self.model = model
        self.seed = seed
        self.frames = frames
        self.step_delay = step_delay
        self.status = IDLE
        self.staged_dynamical = {}
        self.staged_structural = {}
        self.last_error: Optional[str] = None
        self.lock = threading.RLock()
        self.epoch = 0
        self.messages: list[dict] = []
        self._stop = False
        self._worker: Optional[threading.Thread] = None
        self._plot_fns = entry.plots(model)
        self.messages.append(self._step_message())

    # -- plot reducers ----------------------------------------------------

    def _plot_point(self, label, kind, fn):
        model = self.model
        if kind == "agents-fraction":
            agents = model.agents
            hits = 0
            for a in agents:
                if fn(a):
                    hits += 1
            return hits / len(agents)
        if kind == "nodes-mean":
            nodesprops = model.graph.nodesprops
            ids = model.graph.nodes
            total = 0
            for i in ids:
                total += fn(nodesprops[i])
            return total / len(ids)
        raise EngineError(f"unknown plot reducer kind {kind!r}")

    def _step_message(self) -> dict:
        msg = draw_list(self.model, self.model.tick)
        msg["plots"] = {
            label: self._plot_point(label, kind, fn)
            for label, kind, fn in self._plot_fns
        }
        return msg

    # -- worker -----------------------------------------------------------

    def _apply_dynamical(self):
        params = self.model.parameters
        for key, value in self.staged_dynamical.items():
            setattr(params, key, value)
        self.staged_dynamical.clear()

    def _run_loop(self, frames):
        step_rule = self.entry.step_rule
        for _ in range(frames):
            with self.lock:
                if self._stop:
                    self.status = PAUSED
                    return
                self._apply_dynamical()
                try:
                    run_model(self.model, 1, step_rule)
                except Exception as exc:
                    self.last_error = str(exc)
                    self.status = PAUSED
                    return
                self.messages.append(self._step_message())
            if self.step_delay > 0:
                time.sleep(self.step_delay)
        with self.lock:
            self.status = FINISHED

    def start(self, frames):
        with self.lock:
            if self.status == RUNNING:
                raise HTTPException(409, detail="session is already running")
            self._stop = False
            self.status = RUNNING
            self._worker = threading.Thread(
                target=self._run_loop, args=(frames,), daemon=True
            )
            self._worker.start()

    def pause(self):
        with self.lock:
            if self.status != RUNNING:
                return self.status
            self._stop = True
        self._join_worker()
        return self.status

    def _join_worker(self):
        worker = self._worker
        if worker is not None and worker is not threading.current_thread():
            worker.join(timeout=30)

    def reset(self):
        with self.lock:
            self._stop = True
        self._join_worker()
        with self.lock:
            params = self.model.parameters
            for key, value in itertools.chain(
                self.staged_dynamical.items(), self.staged_structural.items()
            ):
                setattr(params, key, value)
            self.staged_dynamical.clear()
            self.staged_structural.clear()
            self.entry.init(self.model)
            self._plot_fns = self.entry.plots(self.model)
            self.epoch += 1
            self.messages = [self._step_message()]
            self.status = IDLE
            self.last_error = None

    def stop(self):
        with self.lock:
            self._stop = True
        self._join_worker()

    # -- wire views -------------------------------------------------------

    def control_specs(self) -> list[dict]:
        params = self.model.parameters
        structural = self.entry.structural
        staged = dict(self.staged_dynamical)
        staged.update(self.staged_structural)
        specs = []
        for key, lo, step, hi in self.entry.controls:
            specs.append(
                {
                    "key": key,
                    "widget": "slider",
                    "range": [lo, step, hi],
                    "value": staged.get(key, params.get(key)),
                    "structural": key in structural,
                }
            )
        return specs

    def plot_specs(self) -> list[dict]:
        return [
            {"label": label, "reducer": _REDUCERS[kind]}
            for label, kind, fn in self._plot_fns
        ]

    def info(self) -> dict:
        with self.lock:
            out = {
                "v": 1,
                "id": self.id,
                "model": self.entry.name,
                "status": self.status,
                "tick": self.model.tick,
                "epoch": self.epoch,
                "seed": self.seed,
                "frames": self.frames,
                "params": dict(self.model._params),
                "staged": {
                    **self.staged_dynamical,
                    **self.staged_structural,
                },
                "controls": self.control_specs(),
                "plots": self.plot_specs(),
            }
            if self.last_error:
                out["error"] = self.last_error
            return out

    def plotdata(self) -> dict:
        """Plot series recomputed from the record tapes (not the live loop)."""
        with self.lock:
            frame = plot_series_frame(self.entry, self.model)
        return {
            "v": 1,
            "ticks": frame.column("tick"),
            "series": {name: frame.column(name) for name in frame.columns[1:]},
        }


class _CreateBody(BaseModel):
    model: str
    overrides: dict = {}
    seed: int = DEFAULT_SEED
    frames: Optional[int] = None
    step_delay_ms: Optional[float] = None


class _ParamsBody(BaseModel):
    params: dict


class _RunBody(BaseModel):
    frames: Optional[int] = None


def create_app(ui_dir=None) -> FastAPI:
    """Build the service app. ``ui_dir`` mounts a static browser bundle."""
    sessions: dict[str, Session] = {}
    registry_lock = threading.Lock()
    counter = itertools.count(1)

    @asynccontextmanager
    async def _lifespan(app):
        yield
        for sess in list(sessions.values()):
            sess.stop()

    app = FastAPI(title="abmkit steering service", lifespan=_lifespan)

    def _get_session(sid: str) -> Session:
        sess = sessions.get(sid)
        if sess is None:
            raise HTTPException(404, detail=f"no session {sid!r}")
        return sess

    @app.get("/healthz")
    def healthz():
        return {"ok": True}

    @app.get("/api/models")
    def list_models():
        models = []
        for name in sorted(GALLERY):
            entry = GALLERY[name]
            models.append(
                {
                    "name": name,
                    "params": entry.params,
                    "controls": [
                        {
                            "key": key,
                            "widget": "slider",
                            "range": [lo, step, hi],
                            "structural": key in entry.structural,
                        }
                        for key, lo, step, hi in entry.controls
                    ],
                    "frames": entry.default_frames,
                }
            )
        return {"v": 1, "models": models}

    @app.post("/api/sessions", status_code=201)
    def create_session(body: _CreateBody):
        try:
            entry = get_entry(body.model)
        except ValueError as exc:
            raise HTTPException(404, detail=str(exc)) from None
        delay_ms = (
            DEFAULT_STEP_DELAY_MS if body.step_delay_ms is None else body.step_delay_ms
        )
        if delay_ms < 0:
            raise HTTPException(422, detail="step_delay_ms must be >= 0")
        frames = entry.default_frames if body.frames is None else body.frames
        if not isinstance(frames, int) or frames < 1:
            raise HTTPException(422, detail="frames must be a positive integer")
        try:
            model = entry.build_model(seed=body.seed, **body.overrides)
            entry.init(model)
        except (ValueError, TypeError) as exc:
            raise HTTPException(422, detail=str(exc)) from None
        with registry_lock:
            sid = f"s{next(counter)}"
            sess = Session(sid, entry, model, body.seed, frames, delay_ms / 1000.0)
            sessions[sid] = sess
        return sess.info()

    @app.get("/api/sessions/{sid}")
    def session_info(sid: str):
        return _get_session(sid).info()

    @app.post("/api/sessions/{sid}/params")
    def set_params(sid: str, body: _ParamsBody):
        sess = _get_session(sid)
        controls = {key: (lo, step, hi) for key, lo, step, hi in sess.entry.controls}
        staged = {}
        for key, raw in body.params.items():
            if key not in controls:
                raise HTTPException(
                    422,
                    detail=f"{key!r} is not steerable; sliders: {sorted(controls)}",
                )
            lo, step, hi = controls[key]
            try:
                staged[key] = _snap(key, lo, step, hi, raw)
            except ValueError as exc:
                raise HTTPException(422, detail=str(exc)) from None
        structural = sess.entry.structural
        with sess.lock:
            for key, value in staged.items():
                if key in structural:
                    sess.staged_structural[key] = value
                else:
                    sess.staged_dynamical[key] = value
            return {
                "v": 1,
                "accepted": staged,
                "staged": {**sess.staged_dynamical, **sess.staged_structural},
            }

    @app.post("/api/sessions/{sid}/run")
    def run_session(sid: str, body: Optional[_RunBody] = None):
        sess = _get_session(sid)
        frames = sess.frames if body is None or body.frames is None else body.frames
        if not isinstance(frames, int) or frames < 1:
            raise HTTPException(422, detail="frames must be a positive integer")
        sess.start(frames)
        return {"v": 1, "status": sess.status, "frames": frames}

    @app.post("/api/sessions/{sid}/pause")
    def pause_session(sid: str):
        sess = _get_session(sid)
        status = sess.pause()
        return {"v": 1, "status": status, "tick": sess.model.tick}

    @app.post("/api/sessions/{sid}/reset")
    def reset_session(sid: str):
        sess = _get_session(sid)
        sess.reset()
        return sess.info()

    @app.get("/api/sessions/{sid}/plotdata")
    def plotdata(sid: str):
        return _get_session(sid).plotdata()

    @app.websocket("/api/sessions/{sid}/stream")
    async def stream(ws: WebSocket, sid: str):
        import asyncio

        sess = sessions.get(sid)
        if sess is None:
            await ws.close(code=4404, reason=f"no session {sid!r}")
            return
        await ws.accept()
        epoch_seen = None
        sent = 0
        try:
            while True:
                with sess.lock:
                    if sess.epoch != epoch_seen:
                        epoch_seen = sess.epoch
                        sent = 0
                        announce = epoch_seen > 0
                    else:
                        announce = False
                    backlog = sess.messages[sent:]
                if announce:
                    await ws.send_json({"v": 1, "type": "reset", "epoch": epoch_seen})
                if backlog:
                    for msg in backlog:
                        await ws.send_json(msg)
                    sent += len(backlog)
                else:
                    await asyncio.sleep(0.01)
        except (WebSocketDisconnect, RuntimeError):
            return

    if ui_dir is not None:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app
