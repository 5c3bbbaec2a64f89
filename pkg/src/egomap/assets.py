"""Precomputed transition asset bundles.

A two-point transition needs projected basemap geometry for specs that only
exist while the animation runs. Bundles hold, per transition: keyframe
geometries for both morph phases and a single zoom-phase geometry with
per-frame clip rectangles.

Geometry content is computed for the canonical direction of the unordered
vertex pair (smaller id first), so the bundles for (a,b) and (b,a) share
every byte except the direction metadata. Bundles serialize to canonical
JSON, making recomputation byte-identical.
"""
from __future__ import annotations

import hashlib
import json
import re
from dataclasses import asdict, dataclass
from pathlib import Path

from filelock import FileLock

from .config import PipelineConfig
from .features import FeatureSet, ProjectedGeometry, project_features
from .graph import GeoGraph
from .projection import PlanePoint, ProjectionSpec, morph_spec, swap_nodes
from .transitions import TransitionPlan, Viewport, frames, plan_transition

SCHEMA_VERSION = 1


class AssetError(ValueError):
    pass


def config_hash(cfg: PipelineConfig) -> str:
    blob = json.dumps(asdict(cfg), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def _slug(vertex_id: str) -> str:
    return re.sub(r"[^A-Za-z0-9_-]", lambda m: f"%{ord(m.group(0)):02x}", vertex_id)


def bundle_key(from_id: str, to_id: str, cfg: PipelineConfig) -> str:
    return f"{_slug(from_id)}--{_slug(to_id)}--{config_hash(cfg)}"


class AssetStore:
    """Directory of JSON bundles with per-key write locking."""

    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)

    def path_for(self, key: str) -> Path:
        if not re.fullmatch(r"[A-Za-z0-9_%-]+(--[A-Za-z0-9_%-]+)*", key):
            raise AssetError(f"malformed bundle key {key!r}")
        return self.root / f"{key}.json"

    def write(self, key: str, doc: dict) -> Path:
        path = self.path_for(key)
        blob = json.dumps(doc, sort_keys=True, separators=(",", ":")).encode()
        with FileLock(str(path) + ".lock"):
            if path.exists() and path.read_bytes() == blob:
                return path
            tmp = path.with_suffix(".json.tmp")
            tmp.write_bytes(blob)
            tmp.replace(path)
        return path

    def read(self, key: str) -> dict:
        path = self.path_for(key)
        if not path.exists():
            raise AssetError(f"no bundle for key {key!r}")
        return json.loads(path.read_text())

    def exists(self, key: str) -> bool:
        return self.path_for(key).exists()

    def keys(self) -> list[str]:
        return sorted(p.stem for p in self.root.glob("*.json"))


# -- serialization -----------------------------------------------------------


def spec_doc(spec: ProjectionSpec) -> dict:
    return {
        "kind": "azeqd" if spec.is_azeqd else spec.kind,
        "nodeA": None if spec.node_a is None else [spec.node_a.lat, spec.node_a.lon],
        "nodeB": None if spec.node_b is None else [spec.node_b.lat, spec.node_b.lon],
        "rotationRad": spec.rotation_rad,
        "offset": [spec.offset.x, spec.offset.y],
        "baselineKm": spec.baseline_km,
    }


def geometry_doc(pg: ProjectedGeometry) -> dict:
    return {
        "specDigest": pg.spec_digest,
        "tolerance": pg.tolerance,
        "flaggedLayers": list(pg.flagged_layers),
        "layers": [
            {
                "name": layer.name,
                "lines": [[[p.x, p.y] for p in line] for line in layer.lines],
                "polygons": [[[p.x, p.y] for p in ring] for ring in layer.polygons],
                "points": [[p.x, p.y] for p in layer.points],
            }
            for layer in pg.layers
        ],
    }


def rect_doc(vp: Viewport) -> list[float]:
    return [vp.center.x, vp.center.y, vp.width, vp.height]


@dataclass(frozen=True)
class MorphKeyframe:
    frac: float
    spec: ProjectionSpec
    geometry: ProjectedGeometry


@dataclass(frozen=True)
class TransitionGeometry:
    """Everything a renderer needs for one transition, unserialized."""

    plan: TransitionPlan
    frame_list: tuple
    zoom_frames: tuple
    morph_in: tuple[MorphKeyframe, ...]
    zoom_geometry: ProjectedGeometry
    morph_out: tuple[MorphKeyframe, ...]

    def geometry_for(self, section: str, index: int) -> ProjectedGeometry:
        if section == "zoom":
            return self.zoom_geometry
        keyframes = self.morph_in if section == "morphIn" else self.morph_out
        return keyframes[index].geometry


def _morph_keyframes(plan: TransitionPlan, phase: str, fs: FeatureSet,
                     cfg: PipelineConfig) -> tuple[MorphKeyframe, ...]:
    tcfg = plan.config
    width = tcfg.vertex_width_km * tcfg.view_padding
    if phase == "morph_in":
        base, anchor = plan.spec_start, plan.from_image
    else:
        base, anchor = swap_nodes(plan.spec_mid), plan.to_image
    camera = Viewport(anchor, width, tcfg.aspect)
    tol = cfg.tolerance_plane(width)
    out = []
    k = cfg.morph_keyframes
    for j in range(k):
        frac = j / (k - 1)
        spec = morph_spec(base, plan.to_coord, frac)
        out.append(MorphKeyframe(frac, spec, project_features(spec, fs, camera, tol)))
    return tuple(out)


def compute_transition_geometry(graph: GeoGraph, from_id: str, to_id: str,
                                fs: FeatureSet, cfg: PipelineConfig,
                                projection: str = "tpeqd") -> TransitionGeometry:
    """Project the basemap for every distinct camera of one transition:
    morph keyframes at fixed cameras, one shared geometry for the zoom."""
    plan = plan_transition(graph, from_id, to_id, cfg.transition, projection=projection)
    frame_list = tuple(frames(plan))
    zoom_frames = tuple(f for f in frame_list if f.phase == "zoom_pan")
    if not zoom_frames:
        raise AssetError("plan produced no zoom frames")
    xs0 = min(f.viewport.center.x - f.viewport.width / 2 for f in zoom_frames)
    xs1 = max(f.viewport.center.x + f.viewport.width / 2 for f in zoom_frames)
    ys0 = min(f.viewport.center.y - f.viewport.height / 2 for f in zoom_frames)
    ys1 = max(f.viewport.center.y + f.viewport.height / 2 for f in zoom_frames)
    bbox = Viewport(
        PlanePoint((xs0 + xs1) / 2.0, (ys0 + ys1) / 2.0),
        xs1 - xs0,
        aspect=(ys1 - ys0) / (xs1 - xs0),
    )
    zoom_tol = cfg.tolerance_plane(min(f.viewport.width for f in zoom_frames))
    zoom_geometry = project_features(plan.spec_mid, fs, bbox, zoom_tol)

    has_morphs = any(p.kind == "morph_in" and p.duration_s > 0 for p in plan.phases)
    return TransitionGeometry(
        plan=plan,
        frame_list=frame_list,
        zoom_frames=zoom_frames,
        morph_in=_morph_keyframes(plan, "morph_in", fs, cfg) if has_morphs else (),
        zoom_geometry=zoom_geometry,
        morph_out=_morph_keyframes(plan, "morph_out", fs, cfg) if has_morphs else (),
    )


def build_bundle(graph: GeoGraph, from_id: str, to_id: str, fs: FeatureSet,
                 cfg: PipelineConfig) -> dict:
    """Assemble the asset bundle document for one transition."""
    a, b = sorted((from_id, to_id))
    tg = compute_transition_geometry(graph, a, b, fs, cfg, projection="tpeqd")
    plan = tg.plan

    def keyframe_docs(keyframes: tuple[MorphKeyframe, ...]) -> list[dict]:
        return [
            {"frac": k.frac, "spec": spec_doc(k.spec), "geometry": geometry_doc(k.geometry)}
            for k in keyframes
        ]

    return {
        "schemaVersion": SCHEMA_VERSION,
        "kind": "transition-assets",
        "pair": [a, b],
        "from": from_id,
        "to": to_id,
        "direction": "forward" if from_id == a else "reverse",
        "configHash": config_hash(cfg),
        "projection": plan.projection,
        "phases": [{"kind": p.kind, "durationS": p.duration_s} for p in plan.phases],
        "frameRate": plan.frame_rate,
        "morphIn": keyframe_docs(tg.morph_in),
        "zoom": {
            "spec": spec_doc(plan.spec_mid),
            "geometry": geometry_doc(tg.zoom_geometry),
            "clipRects": [rect_doc(f.viewport) for f in tg.zoom_frames],
        },
        "morphOut": keyframe_docs(tg.morph_out),
    }


def precompute_transition_assets(graph: GeoGraph, from_id: str, to_id: str,
                                 fs: FeatureSet, cfg: PipelineConfig,
                                 store: AssetStore) -> tuple[str, dict]:
    """Build and persist the bundle; returns (key, document)."""
    doc = build_bundle(graph, from_id, to_id, fs, cfg)
    key = bundle_key(from_id, to_id, cfg)
    store.write(key, doc)
    return key, doc


def frame_sections(plan: TransitionPlan, frame_specs, keyframes: int) -> list[tuple[str, int]]:
    """Map each frame to the bundle section and index carrying its geometry:
    the nearest morph keyframe, or the zoom frame's own clip rectangle."""
    bounds = []
    start = 0.0
    for ph in plan.phases:
        bounds.append((ph.kind, start, start + ph.duration_s))
        start += ph.duration_s
    out: list[tuple[str, int]] = []
    zoom_seen = 0
    for fs in frame_specs:
        if fs.phase == "zoom_pan":
            out.append(("zoom", zoom_seen))
            zoom_seen += 1
            continue
        section = "morphIn" if fs.phase == "morph_in" else "morphOut"
        for kind, t0, t1 in bounds:
            if kind == fs.phase and t1 > t0:
                frac = min(max((fs.t - t0) / (t1 - t0), 0.0), 1.0)
                out.append((section, round(frac * (keyframes - 1))))
                break
        else:
            out.append((section, 0))
    return out
