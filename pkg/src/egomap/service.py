"""HTTP explorer service.

The server is a thin shell over the pure modules: it owns the graph, the
basemap, per-session DoI configuration, and the registry of planned
transitions. Frames are sampled on request; heavyweight geometry lives in
precomputed bundles that clients fetch separately. Playback time belongs to
the client, the server only answers "what does t seconds in look like".
"""
from __future__ import annotations

import threading
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Literal

from fastapi import FastAPI, HTTPException, Request, Response
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, Field

from .assets import (
    AssetStore,
    build_bundle,
    bundle_key,
    frame_sections,
    geometry_doc,
    rect_doc,
    spec_doc,
)
from .config import AppConfig
from .doi import DoIConfig, DoIConfigError, select_vertices, transition_interest_set
from .features import FeatureSet, load_features, project_features
from .geodesy import AntipodalPointsError
from .graph import GeoGraph, GraphFormatError, load_graph
from .layout import FrameLayout, layout_frame
from .tiles import plan_tiles, tile_url
from .transitions import FrameSpec, PlanError, TransitionPlan, frame_at, frames, plan_transition

SCHEMA_VERSION = 1
ASSET_CACHE_CONTROL = "public, max-age=31536000, immutable"
TILES_CACHE_CONTROL = "public, max-age=3600"


@dataclass
class SessionState:
    doi: DoIConfig
    current_vertex: str | None = None
    active_id: str | None = None
    history: list[str] = field(default_factory=list)


@dataclass
class TransitionRecord:
    id: str
    session: str
    from_id: str
    to_id: str
    plan: TransitionPlan
    frame_specs: list[FrameSpec]
    started: float
    bundle: str | None  # asset key, tpeqd only
    sections: list[tuple[str, int]]  # per frame: (bundle section, index)


class TransitionRequest(BaseModel):
    model_config = {"populate_by_name": True}

    from_id: str = Field(alias="from")
    to_id: str = Field(alias="to")
    projection: Literal["mercator", "tpeqd"] = "tpeqd"


class _State:
    """Everything mutable behind one lock; loaded on first use."""

    def __init__(self, cfg: AppConfig):
        self.cfg = cfg
        self.lock = threading.Lock()
        self.graph: GeoGraph | None = None
        self.features: FeatureSet | None = None
        self.store: AssetStore | None = None
        self.load_error: str | None = None
        self.sessions: dict[str, SessionState] = {}
        self.transitions: dict[str, TransitionRecord] = {}
        self.counter = 0

    def ensure_loaded(self) -> None:
        with self.lock:
            if self.graph is not None:
                return
            if self.load_error is not None:
                raise HTTPException(503, self.load_error)
            try:
                self.graph = load_graph(self.cfg.graph_path)
                feats: list = []
                warnings = 0
                for path in self.cfg.basemap_paths:
                    fs = load_features(path)
                    feats.extend(fs.features)
                    warnings += fs.warnings
                self.features = FeatureSet(tuple(feats), warnings)
                self.store = AssetStore(self.cfg.assets_dir)
            except (OSError, ValueError, GraphFormatError) as exc:
                self.graph = None
                self.load_error = f"data not loaded: {exc}"
                raise HTTPException(503, self.load_error) from exc

    def session(self, sid: str) -> SessionState:
        if sid not in self.sessions:
            self.sessions[sid] = SessionState(doi=self.cfg.doi)
        return self.sessions[sid]


def _session_id(request: Request) -> str:
    return (
        request.query_params.get("session")
        or request.headers.get("X-Session-Id")
        or "default"
    )


# -- wire formats -------------------------------------------------------------


def _frame_doc(fs: FrameSpec) -> dict:
    return {
        "t": fs.t,
        "phase": fs.phase,
        "spec": spec_doc(fs.spec),
        "viewport": rect_doc(fs.viewport),
        "northArrowRad": fs.north_arrow_rad,
    }


def _layout_doc(fl: FrameLayout) -> dict:
    return {
        "viewport": rect_doc(fl.viewport),
        "onScreen": [
            {"vertex": v.vertex, "pos": [v.pos.x, v.pos.y], "score": v.score}
            for v in fl.on_screen
        ],
        "proxies": [
            {
                "vertices": list(p.vertices),
                "scores": list(p.scores),
                "anchor": [p.anchor.x, p.anchor.y],
                "directionRad": p.direction_rad,
                "isNeighbor": list(p.is_neighbor),
            }
            for p in fl.proxies
        ],
        "explicitEdges": [list(e) for e in fl.explicit_edges],
        "northArrowRad": fl.north_arrow_rad,
    }


def _validate_doi(cfg: DoIConfig, graph: GeoGraph) -> None:
    known = set(graph.attribute_names())
    for comp in cfg.components:
        if comp.function == "attribute":
            name = comp.params.get("name")
            if name not in known:
                raise DoIConfigError(f"attribute {name!r} not present in the graph")


# -- application --------------------------------------------------------------


def create_app(cfg: AppConfig) -> FastAPI:
    app = FastAPI(title="egomap explorer")
    state = _State(cfg)
    app.state.egomap = state

    def loaded() -> _State:
        state.ensure_loaded()
        return state

    @app.get("/api/graph")
    def get_graph() -> dict:
        st = loaded()
        g = st.graph
        return {
            "schemaVersion": SCHEMA_VERSION,
            "vertices": [
                {
                    "id": v.id,
                    "name": v.name,
                    "lat": v.coord.lat,
                    "lon": v.coord.lon,
                    "attributes": dict(v.attributes),
                }
                for v in g.vertices()
            ],
            "edges": [list(e) for e in g.edges],
        }

    @app.get("/api/view")
    def get_view(vertex: str, request: Request) -> dict:
        st = loaded()
        g = st.graph
        if vertex not in g:
            raise HTTPException(404, f"unknown vertex {vertex!r}")
        with st.lock:
            doi = st.session(_session_id(request)).doi
        plan = plan_transition(g, vertex, vertex, cfg.pipeline.transition, projection="azeqd")
        frame = frame_at(plan, 0.0)
        selection = select_vertices(g, vertex, doi)
        layout = layout_frame(frame, g, selection, focus_ids=(vertex,))
        tolerance = cfg.pipeline.tolerance_plane(frame.viewport.width)
        geometry = project_features(frame.spec, st.features, frame.viewport, tolerance)
        return {
            "schemaVersion": SCHEMA_VERSION,
            "vertex": vertex,
            "frame": _frame_doc(frame),
            "layout": _layout_doc(layout),
            "geometry": geometry_doc(geometry),
        }

    @app.post("/api/transition", status_code=201)
    def post_transition(body: TransitionRequest, request: Request) -> dict:
        st = loaded()
        g = st.graph
        for vid in (body.from_id, body.to_id):
            if vid not in g:
                raise HTTPException(404, f"unknown vertex {vid!r}")
        with st.lock:
            session = st.session(_session_id(request))
            if session.active_id is not None:
                rec = st.transitions[session.active_id]
                if time.monotonic() - rec.started < rec.plan.total_duration_s:
                    raise HTTPException(409, f"transition {rec.id} still active")
            try:
                plan = plan_transition(g, body.from_id, body.to_id,
                                       cfg.pipeline.transition, projection=body.projection)
            except AntipodalPointsError as exc:
                raise HTTPException(422, f"no transition plane: {exc}") from exc
            except PlanError as exc:
                raise HTTPException(422, str(exc)) from exc

            key = None
            if body.projection == "tpeqd":
                key = bundle_key(body.from_id, body.to_id, cfg.pipeline)
                if not st.store.exists(key):
                    doc = build_bundle(g, body.from_id, body.to_id, st.features, cfg.pipeline)
                    st.store.write(key, doc)

            frame_specs = frames(plan)
            st.counter += 1
            tid = f"t{st.counter}"
            st.transitions[tid] = TransitionRecord(
                id=tid, session=_session_id(request),
                from_id=body.from_id, to_id=body.to_id,
                plan=plan, frame_specs=frame_specs,
                started=time.monotonic(), bundle=key,
                sections=frame_sections(plan, frame_specs, cfg.pipeline.morph_keyframes),
            )
            session.active_id = tid
            if not session.history:
                session.history.append(body.from_id)
            session.history.append(body.to_id)
            session.current_vertex = body.to_id
        return {
            "schemaVersion": SCHEMA_VERSION,
            "id": tid,
            "from": body.from_id,
            "to": body.to_id,
            "projection": body.projection,
            "durationS": plan.total_duration_s,
            "frameCount": len(frame_specs),
            "frameRate": plan.frame_rate,
            "phases": [{"kind": p.kind, "durationS": p.duration_s} for p in plan.phases],
            "bundleKey": key,
        }

    @app.get("/api/transition/{tid}/frame")
    def get_frame(tid: str, t: float, request: Request) -> dict:
        st = loaded()
        rec = st.transitions.get(tid)
        if rec is None:
            raise HTTPException(404, f"unknown transition {tid!r}")
        total = rec.plan.total_duration_s
        if t < 0.0 or t > total + 1e-9:
            raise HTTPException(416, f"t={t} outside [0, {total}]")
        idx = min(range(len(rec.frame_specs)), key=lambda i: abs(rec.frame_specs[i].t - t))
        frame = rec.frame_specs[idx]
        with st.lock:
            doi = st.session(rec.session).doi
        interest = transition_interest_set(st.graph, rec.from_id, rec.to_id, doi)
        layout = layout_frame(frame, st.graph, interest,
                              focus_ids=(rec.from_id, rec.to_id))
        geometry = None
        if rec.bundle is not None:
            section, index = rec.sections[idx]
            geometry = {
                "bundleKey": rec.bundle,
                "url": f"/api/assets/{rec.bundle}",
                "section": section,
                "index": index,
            }
        return {
            "schemaVersion": SCHEMA_VERSION,
            "id": tid,
            "frameIndex": idx,
            "frame": _frame_doc(frame),
            "layout": _layout_doc(layout),
            "geometry": geometry,
        }

    @app.put("/api/doi-config")
    def put_doi_config(body: dict, request: Request) -> dict:
        st = loaded()
        try:
            parsed = DoIConfig.from_dict(body)
            _validate_doi(parsed, st.graph)
        except (DoIConfigError, KeyError, TypeError, ValueError) as exc:
            raise HTTPException(422, f"invalid DoI configuration: {exc}") from exc
        with st.lock:
            st.session(_session_id(request)).doi = parsed
        return {"schemaVersion": SCHEMA_VERSION, "applied": parsed.to_dict()}

    @app.get("/api/tiles/plan")
    def get_tile_plan(transition: str) -> Response:
        st = loaded()
        rec = st.transitions.get(transition)
        if rec is None:
            raise HTTPException(404, f"unknown transition {transition!r}")
        if rec.plan.projection != "mercator":
            raise HTTPException(409, "tile plans only exist for Mercator transitions")
        refs = sorted(plan_tiles(rec.plan, cfg.pipeline.tile_px,
                                 cfg.pipeline.screen_px, cfg.pipeline.z_max))
        body = {
            "schemaVersion": SCHEMA_VERSION,
            "transition": transition,
            "tiles": [tile_url(cfg.tile_url_template, r) for r in refs],
        }
        return JSONResponse(body, headers={"Cache-Control": TILES_CACHE_CONTROL})

    @app.get("/api/assets/{key}")
    def get_asset(key: str) -> Response:
        st = loaded()
        try:
            path = st.store.path_for(key)
        except ValueError as exc:
            raise HTTPException(404, str(exc)) from exc
        if not path.exists():
            raise HTTPException(404, f"no bundle {key!r}")
        return Response(path.read_bytes(), media_type="application/json",
                        headers={"Cache-Control": ASSET_CACHE_CONTROL})

    @app.get("/api/session")
    def get_session(request: Request) -> dict:
        st = loaded()
        with st.lock:
            session = st.session(_session_id(request))
            return {
                "schemaVersion": SCHEMA_VERSION,
                "currentVertex": session.current_vertex,
                "history": list(session.history),
                "doi": session.doi.to_dict(),
                "activeTransition": session.active_id,
            }

    if cfg.static_dir is not None and Path(cfg.static_dir).is_dir():
        app.mount("/", StaticFiles(directory=cfg.static_dir, html=True), name="static")

    return app
