"""Screen layout for one frame: on-screen vertices, off-screen proxies.

Vertices of the interest set are classified against the frame viewport shrunk
by an inset margin. Those inside are drawn in place; those outside get a
proxy anchored where the ray from the viewport centre toward the vertex
crosses the inset boundary. Nearby proxies aggregate into clusters, measured
along the boundary perimeter, so badges never pile up in a corner.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .doi import DoIScore
from .graph import GeoGraph
from .projection import PlanePoint, project
from .transitions import FrameSpec, Viewport, screen_angle

INSET_MARGIN_FRACTION = 0.08   # of viewport width, each edge
PROXY_DIAMETER_FRACTION = 0.15  # of viewport width, default cluster spacing


class LayoutError(ValueError):
    pass


@dataclass(frozen=True)
class OnScreenVertex:
    vertex: str
    pos: PlanePoint
    score: float


@dataclass(frozen=True)
class ProxyCluster:
    """One proxy badge: member ids ranked by score (ties by id), anchored at
    the highest-ranked member's boundary point."""

    vertices: tuple[str, ...]
    scores: tuple[float, ...]
    anchor: PlanePoint
    direction_rad: float
    is_neighbor: tuple[bool, ...]


@dataclass(frozen=True)
class FrameLayout:
    viewport: Viewport
    on_screen: tuple[OnScreenVertex, ...]
    proxies: tuple[ProxyCluster, ...]
    explicit_edges: tuple[tuple[str, str], ...]
    north_arrow_rad: float


def inset_viewport(viewport: Viewport, fraction: float = INSET_MARGIN_FRACTION) -> Viewport:
    return viewport.shrunk(fraction * viewport.width)


def proxy_anchor(viewport: Viewport, target: PlanePoint) -> PlanePoint:
    """Intersection of the ray centre -> target with the viewport boundary."""
    d = target - viewport.center
    hx, hy = viewport.width / 2.0, viewport.height / 2.0
    if d.x == 0.0 and d.y == 0.0:
        raise LayoutError("target coincides with the viewport centre")
    tx = hx / abs(d.x) if d.x != 0.0 else math.inf
    ty = hy / abs(d.y) if d.y != 0.0 else math.inf
    return viewport.center + d.scaled(min(tx, ty))


def _perimeter_coordinate(viewport: Viewport, p: PlanePoint) -> float:
    """Arc length along the boundary, counter-clockwise from the bottom-left
    corner. The point must lie on the boundary."""
    hx, hy = viewport.width / 2.0, viewport.height / 2.0
    x, y = p.x - viewport.center.x, p.y - viewport.center.y
    w, h = viewport.width, viewport.height
    eps = 1e-9 * max(w, h)
    if abs(y + hy) <= eps:
        return x + hx                      # bottom edge, heading east
    if abs(x - hx) <= eps:
        return w + (y + hy)                # right edge, heading north
    if abs(y - hy) <= eps:
        return w + h + (hx - x)            # top edge, heading west
    if abs(x + hx) <= eps:
        return 2.0 * w + h + (hy - y)      # left edge, heading south
    raise LayoutError(f"{p} is not on the viewport boundary")


def perimeter_distance(viewport: Viewport, a: PlanePoint, b: PlanePoint) -> float:
    """Shorter way around the boundary between two boundary points."""
    total = 2.0 * (viewport.width + viewport.height)
    gap = abs(_perimeter_coordinate(viewport, a) - _perimeter_coordinate(viewport, b))
    return min(gap, total - gap)


@dataclass(frozen=True)
class ProxyTarget:
    """An off-screen vertex before aggregation."""

    vertex: str
    score: float
    target: PlanePoint
    anchor: PlanePoint
    direction_rad: float
    is_neighbor: bool


def aggregate_proxies(
    targets: list[ProxyTarget], viewport: Viewport, proxy_diameter: float
) -> tuple[ProxyCluster, ...]:
    """Greedy clustering in rank order. Each proxy joins the earliest cluster
    whose representative anchor is within proxy_diameter along the perimeter,
    else starts its own. Representatives never end up within one diameter of
    each other, so re-running on the output is a no-op."""
    ranked = sorted(targets, key=lambda t: (-t.score, t.vertex))
    clusters: list[list[ProxyTarget]] = []
    for t in ranked:
        for members in clusters:
            rep = members[0]
            if perimeter_distance(viewport, rep.anchor, t.anchor) <= proxy_diameter:
                members.append(t)
                break
        else:
            clusters.append([t])
    return tuple(
        ProxyCluster(
            vertices=tuple(m.vertex for m in members),
            scores=tuple(m.score for m in members),
            anchor=members[0].anchor,
            direction_rad=members[0].direction_rad,
            is_neighbor=tuple(m.is_neighbor for m in members),
        )
        for members in clusters
    )


def layout_frame(
    frame: FrameSpec,
    graph: GeoGraph,
    selection: list[DoIScore],
    focus_ids: tuple[str, ...] = (),
    proxy_diameter: float | None = None,
    inset_fraction: float = INSET_MARGIN_FRACTION,
) -> FrameLayout:
    """Place the interest set for one frame.

    Focus vertices are pinned to score 1.0 and rendered like any other
    selected vertex; every selected vertex ends up either on screen or in
    exactly one proxy cluster.
    """
    inset = inset_viewport(frame.viewport, inset_fraction)
    if proxy_diameter is None:
        proxy_diameter = PROXY_DIAMETER_FRACTION * frame.viewport.width
    if proxy_diameter < 0.0:
        raise LayoutError("proxy_diameter must be >= 0")

    neighbors_of_focus: set[str] = set()
    for fid in focus_ids:
        neighbors_of_focus.update(graph.neighbors(fid))

    entries: list[tuple[str, float]] = []
    seen: set[str] = set()
    for fid in focus_ids:
        if fid not in seen:
            entries.append((fid, 1.0))
            seen.add(fid)
    for s in selection:
        if s.vertex not in seen:
            entries.append((s.vertex, s.score))
            seen.add(s.vertex)

    on_screen: list[OnScreenVertex] = []
    off_screen: list[ProxyTarget] = []
    for vid, score in entries:
        pos = project(frame.spec, graph.vertex(vid).coord)
        if inset.contains(pos):
            on_screen.append(OnScreenVertex(vid, pos, score))
        else:
            off_screen.append(
                ProxyTarget(
                    vertex=vid,
                    score=score,
                    target=pos,
                    anchor=proxy_anchor(inset, pos),
                    direction_rad=screen_angle(frame.spec.kind, pos - inset.center),
                    is_neighbor=vid in neighbors_of_focus,
                )
            )

    visible_ids = {v.vertex for v in on_screen}
    edges = tuple(e for e in graph.edges if e[0] in visible_ids and e[1] in visible_ids)

    return FrameLayout(
        viewport=frame.viewport,
        on_screen=tuple(on_screen),
        proxies=aggregate_proxies(off_screen, inset, proxy_diameter),
        explicit_edges=edges,
        north_arrow_rad=frame.north_arrow_rad,
    )
