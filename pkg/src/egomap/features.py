"""Vector basemap pipeline: load, densify, project, clip, simplify.

GeoJSON features come in as geographic polylines, polygons (closed rings),
and points. For a given projection they are densified along geodesics until
the projected chord error drops under the tolerance, projected, clipped to a
camera rectangle, and thinned with Douglas-Peucker at the same tolerance.

Two projections need seams handled: Mercator wraps at the antimeridian, and
a two-point chart is discontinuous along the far arc of the baseline great
circle (between the node antipodes). Paths crossing either seam are split
into disconnected pieces; rings that get split are demoted to strokes since
their fill is no longer well defined.
"""
from __future__ import annotations

import hashlib
import json
import math
from collections import defaultdict
from dataclasses import dataclass
from pathlib import Path

from .geodesy import (
    AntipodalPointsError,
    GeoCoord,
    geodesic_interpolate,
    great_circle_distance,
)
from .projection import (
    DISTORTION_LIMIT_FRACTION,
    MERCATOR_MAX_LAT,
    PlanePoint,
    ProjectionSpec,
    distortion_report,
    project,
)
from .transitions import Viewport

# geo segments longer than this get pre-split before the chord test, so a
# symmetric S-bend cannot slip through with a lucky midpoint
MAX_SEGMENT_KM = 500.0

# a projected chord this much longer than its geodesic marks a seam crossing
CUT_RATIO = 3.0

_DENSIFY_DEPTH = 24


class FeatureError(ValueError):
    pass


@dataclass(frozen=True)
class MapFeature:
    layer: str
    kind: str  # "line" | "polygon" | "point"
    paths: tuple[tuple[GeoCoord, ...], ...]
    properties: dict


@dataclass(frozen=True)
class FeatureSet:
    features: tuple[MapFeature, ...]
    warnings: int


@dataclass(frozen=True)
class ProjectedLayer:
    name: str
    lines: tuple[tuple[PlanePoint, ...], ...]
    polygons: tuple[tuple[PlanePoint, ...], ...]  # closed rings
    points: tuple[PlanePoint, ...]


@dataclass(frozen=True)
class ProjectedGeometry:
    layers: tuple[ProjectedLayer, ...]  # sorted by name
    spec_digest: str
    tolerance: float
    flagged_layers: tuple[str, ...]  # contain geometry beyond the distortion limit


def spec_digest(spec: ProjectionSpec) -> str:
    """Deterministic short id for a projection spec."""
    doc = {
        "kind": spec.kind,
        "nodeA": None if spec.node_a is None else [spec.node_a.lat, spec.node_a.lon],
        "nodeB": None if spec.node_b is None else [spec.node_b.lat, spec.node_b.lon],
        "rotation": spec.rotation_rad,
        "offset": [spec.offset.x, spec.offset.y],
    }
    blob = json.dumps(doc, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


# -- loading ----------------------------------------------------------------

_KINDS = {
    "Point": "point",
    "MultiPoint": "point",
    "LineString": "line",
    "MultiLineString": "line",
    "Polygon": "polygon",
    "MultiPolygon": "polygon",
}


def _coord(raw) -> GeoCoord:
    try:
        lon, lat = float(raw[0]), float(raw[1])
    except (TypeError, ValueError, IndexError) as exc:
        raise FeatureError(f"bad coordinate {raw!r}") from exc
    return GeoCoord(lat, lon)


def _ring(raw) -> tuple[GeoCoord, ...]:
    pts = tuple(_coord(c) for c in raw)
    if len(pts) >= 2 and pts[0] != pts[-1]:
        pts = pts + (pts[0],)
    return pts


def load_features(path: str | Path) -> FeatureSet:
    """Read a GeoJSON FeatureCollection.

    Unsupported geometry kinds (and features without geometry) are skipped
    and counted in `warnings`; structurally broken documents raise.
    The layer name comes from the `layer` property, defaulting to "default".
    """
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise FeatureError(f"not valid JSON: {exc}") from exc
    if not isinstance(doc, dict) or doc.get("type") != "FeatureCollection":
        raise FeatureError("expected a GeoJSON FeatureCollection")
    raw_features = doc.get("features", [])
    if not isinstance(raw_features, list):
        raise FeatureError("features must be a list")

    out: list[MapFeature] = []
    warnings = 0
    for raw in raw_features:
        if not isinstance(raw, dict):
            raise FeatureError(f"feature entries must be objects, got {raw!r}")
        geom = raw.get("geometry")
        props = raw.get("properties") or {}
        if not isinstance(geom, dict) or geom.get("type") not in _KINDS:
            warnings += 1
            continue
        gtype = geom["type"]
        kind = _KINDS[gtype]
        coords = geom.get("coordinates", [])
        if gtype == "Point":
            paths = [(_coord(coords),)]
        elif gtype == "MultiPoint":
            paths = [(_coord(c),) for c in coords]
        elif gtype == "LineString":
            paths = [tuple(_coord(c) for c in coords)]
        elif gtype == "MultiLineString":
            paths = [tuple(_coord(c) for c in part) for part in coords]
        elif gtype == "Polygon":
            paths = [_ring(r) for r in coords]
        else:  # MultiPolygon
            paths = [_ring(r) for poly in coords for r in poly]

        kept = []
        for p in paths:
            if kind == "point" and len(p) == 1:
                kept.append(p)
            elif kind == "line" and len(p) >= 2:
                kept.append(p)
            elif kind == "polygon" and len(p) >= 4:  # 3 vertices + closure
                kept.append(p)
            else:
                warnings += 1
        if not kept:
            continue
        layer = str(props.get("layer", "default"))
        out.append(MapFeature(layer=layer, kind=kind, paths=tuple(kept), properties=dict(props)))
    return FeatureSet(features=tuple(out), warnings=warnings)


# -- projection with seam handling -------------------------------------------


def _proj_fn(spec: ProjectionSpec):
    if spec.kind == "mercator":
        limit = MERCATOR_MAX_LAT

        def f(p: GeoCoord) -> PlanePoint:
            if abs(p.lat) > limit:
                p = GeoCoord(math.copysign(limit, p.lat), p.lon)
            return project(spec, p)

        return f
    return lambda p: project(spec, p)


def _split_antimeridian(pts: tuple[GeoCoord, ...]) -> list[list[GeoCoord]]:
    """Split a geo path where the short great-circle hop wraps past lon 180."""
    runs: list[list[GeoCoord]] = []
    cur = [pts[0]]
    for b in pts[1:]:
        a = cur[-1]
        if abs(b.lon - a.lon) <= 180.0:
            cur.append(b)
            continue
        left, right = a, b
        try:
            for _ in range(40):
                m = geodesic_interpolate(left, right, 0.5)
                if abs(m.lon - left.lon) <= 180.0:
                    left = m
                else:
                    right = m
        except AntipodalPointsError:
            pass
        if left != cur[-1]:
            cur.append(left)
        if len(cur) >= 2:
            runs.append(cur)
        cur = [right, b] if right != b else [b]
    if len(cur) >= 2:
        runs.append(cur)
    return runs


def _densify(proj, pts: list[GeoCoord], tolerance: float) -> tuple[list[GeoCoord], list[PlanePoint]]:
    """Subdivide along geodesics until each projected chord sits within
    tolerance of the projected curve (midpoint test at half tolerance)."""
    geo: list[GeoCoord] = [pts[0]]
    plane: list[PlanePoint] = [proj(pts[0])]

    def emit(g: GeoCoord, q: PlanePoint) -> None:
        geo.append(g)
        plane.append(q)

    def refine(a: GeoCoord, qa: PlanePoint, b: GeoCoord, qb: PlanePoint,
               depth: int, span_km: float) -> None:
        # the geodesic floor keeps the recursion finite where the chart
        # stretch diverges (antipodal neighborhood, seam straddles)
        if depth <= 0 or span_km < 0.5:
            emit(b, qb)
            return
        try:
            m = geodesic_interpolate(a, b, 0.5)
        except AntipodalPointsError:
            emit(b, qb)
            return
        qm = proj(m)
        mid = PlanePoint((qa.x + qb.x) / 2.0, (qa.y + qb.y) / 2.0)
        if (qm - mid).norm() <= tolerance / 2.0:
            emit(b, qb)
            return
        refine(a, qa, m, qm, depth - 1, span_km / 2.0)
        refine(m, qm, b, qb, depth - 1, span_km / 2.0)

    for b in pts[1:]:
        a, qa = geo[-1], plane[-1]
        if b == a:
            continue
        qb = proj(b)
        if tolerance <= 0.0:
            emit(b, qb)
            continue
        # pre-split long hops so a symmetric bend cannot fool the midpoint test
        d = great_circle_distance(a, b)
        if d > MAX_SEGMENT_KM:
            n = int(math.ceil(d / MAX_SEGMENT_KM))
            try:
                knots = [geodesic_interpolate(a, b, k / n) for k in range(1, n)] + [b]
            except AntipodalPointsError:
                knots, n = [b], 1
            for k in knots:
                qk = proj(k)
                refine(geo[-1], plane[-1], k, qk, _DENSIFY_DEPTH, d / n)
        else:
            refine(a, qa, b, qb, _DENSIFY_DEPTH, d)
    return geo, plane


def _split_cut(geo: list[GeoCoord], plane: list[PlanePoint]) -> list[list[PlanePoint]]:
    """Break a projected path where the chord is wildly longer than its
    geodesic: the segment straddles the far-arc seam."""
    runs: list[list[PlanePoint]] = []
    cur = [plane[0]]
    for i in range(1, len(plane)):
        geo_d = great_circle_distance(geo[i - 1], geo[i])
        plane_d = (plane[i] - plane[i - 1]).norm()
        if plane_d > CUT_RATIO * geo_d + 1.0:
            if len(cur) >= 2:
                runs.append(cur)
            cur = [plane[i]]
        else:
            cur.append(plane[i])
    if len(cur) >= 2:
        runs.append(cur)
    return runs


def _project_paths(spec: ProjectionSpec, pts: tuple[GeoCoord, ...], tolerance: float):
    """Densify and project one geo path; returns (plane runs, was_split)."""
    proj = _proj_fn(spec)
    if spec.kind == "mercator":
        geo_runs = _split_antimeridian(pts)
        out = []
        for run in geo_runs:
            _, plane = _densify(proj, run, tolerance)
            if len(plane) >= 2:
                out.append(plane)
        return out, len(geo_runs) > 1
    geo, plane = _densify(proj, list(pts), tolerance)
    runs = _split_cut(geo, plane)
    return runs, len(runs) > 1


# -- clipping ----------------------------------------------------------------


def _rect(clip: Viewport) -> tuple[float, float, float, float]:
    hx, hy = clip.width / 2.0, clip.height / 2.0
    return (clip.center.x - hx, clip.center.y - hy, clip.center.x + hx, clip.center.y + hy)


def clip_ring(ring: list[PlanePoint], rect) -> list[PlanePoint]:
    """Sutherland-Hodgman against an axis-aligned rectangle; open ring in,
    open ring out (possibly empty)."""
    xmin, ymin, xmax, ymax = rect

    def clip_edge(points, inside, cross):
        if not points:
            return points
        out = []
        prev = points[-1]
        prev_in = inside(prev)
        for cur in points:
            cur_in = inside(cur)
            if cur_in:
                if not prev_in:
                    out.append(cross(prev, cur))
                out.append(cur)
            elif prev_in:
                out.append(cross(prev, cur))
            prev, prev_in = cur, cur_in
        return out

    def x_cross(level):
        def f(a, b):
            t = (level - a.x) / (b.x - a.x)
            return PlanePoint(level, a.y + t * (b.y - a.y))
        return f

    def y_cross(level):
        def f(a, b):
            t = (level - a.y) / (b.y - a.y)
            return PlanePoint(a.x + t * (b.x - a.x), level)
        return f

    ring = clip_edge(ring, lambda p: p.x >= xmin, x_cross(xmin))
    ring = clip_edge(ring, lambda p: p.x <= xmax, x_cross(xmax))
    ring = clip_edge(ring, lambda p: p.y >= ymin, y_cross(ymin))
    ring = clip_edge(ring, lambda p: p.y <= ymax, y_cross(ymax))
    return ring


def clip_polyline(pts: list[PlanePoint], rect) -> list[list[PlanePoint]]:
    """Liang-Barsky per segment, stitching consecutive visible pieces."""
    xmin, ymin, xmax, ymax = rect
    runs: list[list[PlanePoint]] = []
    cur: list[PlanePoint] = []

    def flush():
        nonlocal cur
        if len(cur) >= 2:
            runs.append(cur)
        cur = []

    for a, b in zip(pts, pts[1:]):
        dx, dy = b.x - a.x, b.y - a.y
        t0, t1 = 0.0, 1.0
        ok = True
        for p, q in (
            (-dx, a.x - xmin),
            (dx, xmax - a.x),
            (-dy, a.y - ymin),
            (dy, ymax - a.y),
        ):
            if p == 0.0:
                if q < 0.0:
                    ok = False
                    break
                continue
            r = q / p
            if p < 0.0:
                if r > t1:
                    ok = False
                    break
                t0 = max(t0, r)
            else:
                if r < t0:
                    ok = False
                    break
                t1 = min(t1, r)
        if not ok or t0 > t1:
            flush()
            continue
        pa = a if t0 <= 0.0 else PlanePoint(a.x + t0 * dx, a.y + t0 * dy)
        pb = b if t1 >= 1.0 else PlanePoint(a.x + t1 * dx, a.y + t1 * dy)
        if not cur:
            cur = [pa]
        elif t0 > 0.0:
            flush()
            cur = [pa]
        cur.append(pb)
        if t1 < 1.0:
            flush()
    flush()
    return runs


def simplify(pts: list[PlanePoint], tolerance: float) -> list[PlanePoint]:
    """Douglas-Peucker; endpoints always survive."""
    if tolerance <= 0.0 or len(pts) <= 2:
        return list(pts)
    keep = [False] * len(pts)
    keep[0] = keep[-1] = True
    stack = [(0, len(pts) - 1)]
    while stack:
        lo, hi = stack.pop()
        if hi - lo < 2:
            continue
        a, b = pts[lo], pts[hi]
        dx, dy = b.x - a.x, b.y - a.y
        seg2 = dx * dx + dy * dy
        worst, worst_d2 = -1, -1.0
        for i in range(lo + 1, hi):
            p = pts[i]
            if seg2 == 0.0:
                ex, ey = p.x - a.x, p.y - a.y
            else:
                t = ((p.x - a.x) * dx + (p.y - a.y) * dy) / seg2
                t = min(1.0, max(0.0, t))
                ex, ey = p.x - (a.x + t * dx), p.y - (a.y + t * dy)
            d2 = ex * ex + ey * ey
            if d2 > worst_d2:
                worst, worst_d2 = i, d2
        if worst_d2 > tolerance * tolerance:
            keep[worst] = True
            stack.append((lo, worst))
            stack.append((worst, hi))
    return [p for p, k in zip(pts, keep) if k]


# -- the pipeline -------------------------------------------------------------


def project_features(
    spec: ProjectionSpec, fs: FeatureSet, clip: Viewport, tolerance: float
) -> ProjectedGeometry:
    """Project a feature set into the chart of `spec`, clipped to `clip`.

    Tolerance is in plane units of the spec (km for two-point charts,
    unit-square units for Mercator); 0 disables densification and
    simplification. Rings split by a seam are demoted to strokes.
    """
    if tolerance < 0.0:
        raise FeatureError("tolerance must be >= 0")
    rect = _rect(clip)
    xmin, ymin, xmax, ymax = rect
    collect: dict[str, dict[str, list]] = defaultdict(
        lambda: {"lines": [], "polygons": [], "points": []}
    )
    flagged: set[str] = set()
    proj = _proj_fn(spec)

    for feat in fs.features:
        contributed = False
        for path in feat.paths:
            if feat.kind == "point":
                q = proj(path[0])
                if xmin <= q.x <= xmax and ymin <= q.y <= ymax:
                    collect[feat.layer]["points"].append(q)
                    contributed = True
                continue

            runs, was_split = _project_paths(spec, path, tolerance)
            closed = (
                feat.kind == "polygon"
                and not was_split
                and len(runs) == 1
                and runs[0][0] == runs[0][-1]
            )
            if closed:
                ring = clip_ring(runs[0][:-1], rect)
                ring = simplify(ring + ring[:1], tolerance)[:-1] if len(ring) >= 3 else []
                if len(ring) >= 3:
                    collect[feat.layer]["polygons"].append(ring + ring[:1])
                    contributed = True
            else:
                for run in runs:
                    for piece in clip_polyline(run, rect):
                        slim = simplify(piece, tolerance)
                        if len(slim) >= 2:
                            collect[feat.layer]["lines"].append(slim)
                            contributed = True

        if contributed and spec.kind == "tpeqd":
            for path in feat.paths:
                if any(
                    not distortion_report(spec, g).within_limit for g in path
                ):
                    flagged.add(feat.layer)
                    break

    layers = tuple(
        ProjectedLayer(
            name=name,
            lines=tuple(tuple(p) for p in parts["lines"]),
            polygons=tuple(tuple(p) for p in parts["polygons"]),
            points=tuple(parts["points"]),
        )
        for name, parts in sorted(collect.items())
    )
    return ProjectedGeometry(
        layers=layers,
        spec_digest=spec_digest(spec),
        tolerance=tolerance,
        flagged_layers=tuple(sorted(flagged)),
    )
