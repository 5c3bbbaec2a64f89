"""Zoom-and-pan transition planning between graph vertices.

The camera path through (pan position u, window width w) space follows the
smooth-and-efficient formulation:

    b_i = (w1^2 - w0^2 + (-1)^i rho^4 (u1-u0)^2) / (2 w_i rho^2 (u1-u0))
    r_i = asinh(-b_i)
    S   = (r1 - r0) / rho
    w(s) = w0 cosh(r0) / cosh(rho s + r0)
    u(s) = (w0/rho^2) (cosh(r0) tanh(rho s + r0) - sinh(r0)) + u0

with the pure-zoom degenerate case S = |ln(w1/w0)| / rho, w(s) = w0 e^(+-rho s).

A two-point transition has three strictly sequenced phases: morph the second
projection node out to the destination (camera fixed on the start vertex),
zoom-and-pan across the now-fixed plane, then morph the start node onto the
destination (camera fixed there).  Mercator and plain azimuthal transitions
are a single zoom-and-pan phase in a fixed plane.

Time is linear in path length; there is no easing and no interruption.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .geodesy import GeoCoord, geodesic_interpolate, great_circle_distance
from .projection import (
    AZEQD_BASELINE_KM,
    EARTH_RADIUS_KM,
    MERCATOR,
    PlanePoint,
    ProjectionSpec,
    make_tpeqd,
    morph_spec,
    north_direction,
    project,
    swap_nodes,
    unproject,
)

_EPS = 1e-12


class PlanError(ValueError):
    """Invalid planning input (bad viewport, bad rho, out-of-range sample)."""


@dataclass(frozen=True)
class Viewport:
    """Axis-aligned camera window in plane units; aspect = height/width."""

    center: PlanePoint
    width: float
    aspect: float = 1.0

    def __post_init__(self) -> None:
        if self.width <= 0.0 or self.aspect <= 0.0:
            raise PlanError(f"viewport needs positive width and aspect, got {self}")

    @property
    def height(self) -> float:
        return self.width * self.aspect

    def contains(self, p: PlanePoint) -> bool:
        return (
            abs(p.x - self.center.x) <= self.width / 2.0
            and abs(p.y - self.center.y) <= self.height / 2.0
        )

    def shrunk(self, margin: float) -> "Viewport":
        """Shrink by an absolute margin on every edge."""
        w = self.width - 2.0 * margin
        h = self.height - 2.0 * margin
        if w <= 0.0 or h <= 0.0:
            raise PlanError("margin larger than the viewport")
        return Viewport(center=self.center, width=w, aspect=h / w)


@dataclass(frozen=True)
class TransitionConfig:
    """Tunables for transition planning and framing."""

    rho: float = 1.4
    animation_speed: float = 1.0  # path units per second; ~3.3 s per 1000 km hop
    morph_duration_s: float = 0.8
    frame_rate: float = 30.0
    vertex_width_km: float = 200.0  # zoom-and-pan window width at rest
    # Camera width over the zoom-and-pan window width.  A value above ~1.03
    # keeps both endpoint markers inside the rendered frame at the apex of
    # long hops (the window itself passes just short of the far endpoint)
    # and leaves margin for proxy badges.
    view_padding: float = 1.25
    aspect: float = 1.0

    def __post_init__(self) -> None:
        if self.rho <= 0.0:
            raise PlanError(f"rho must be positive, got {self.rho}")
        if self.animation_speed <= 0.0 or self.frame_rate <= 0.0:
            raise PlanError("animation_speed and frame_rate must be positive")
        if self.vertex_width_km <= 0.0 or self.view_padding <= 0.0 or self.aspect <= 0.0:
            raise PlanError("vertex_width_km, view_padding, aspect must be positive")
        if self.morph_duration_s < 0.0:
            raise PlanError("morph_duration_s must be non-negative")


@dataclass(frozen=True)
class ZoomPanPath:
    """A solved camera path; sample with sample_zoom_pan."""

    origin: PlanePoint
    direction: PlanePoint
    u0: float
    u1: float
    w0: float
    w1: float
    rho: float
    r0: float
    r1: float
    s_total: float
    aspect: float
    pure_zoom: bool


def plan_zoom_pan(start: Viewport, end: Viewport, rho: float) -> ZoomPanPath:
    """Solve the optimal camera path between two viewports of equal aspect."""
    if rho <= 0.0:
        raise PlanError(f"rho must be positive, got {rho}")
    if abs(start.aspect - end.aspect) > 1e-9 * max(start.aspect, end.aspect):
        raise PlanError("viewport aspects differ")
    delta = end.center - start.center
    span = delta.norm()
    w0, w1 = start.width, end.width
    if span < _EPS * max(w0, w1):
        # pure zoom (or identity): the hyperbolic solution degenerates
        s_total = abs(math.log(w1 / w0)) / rho
        return ZoomPanPath(
            origin=start.center,
            direction=PlanePoint(1.0, 0.0),
            u0=0.0,
            u1=0.0,
            w0=w0,
            w1=w1,
            rho=rho,
            r0=0.0,
            r1=0.0,
            s_total=s_total,
            aspect=start.aspect,
            pure_zoom=True,
        )
    b0 = (w1 * w1 - w0 * w0 + rho**4 * span * span) / (2.0 * w0 * rho * rho * span)
    b1 = (w1 * w1 - w0 * w0 - rho**4 * span * span) / (2.0 * w1 * rho * rho * span)
    r0 = math.asinh(-b0)
    r1 = math.asinh(-b1)
    return ZoomPanPath(
        origin=start.center,
        direction=delta.scaled(1.0 / span),
        u0=0.0,
        u1=span,
        w0=w0,
        w1=w1,
        rho=rho,
        r0=r0,
        r1=r1,
        s_total=(r1 - r0) / rho,
        aspect=start.aspect,
        pure_zoom=False,
    )


def _path_u_w(path: ZoomPanPath, s: float) -> tuple[float, float]:
    if path.pure_zoom:
        if path.s_total == 0.0:
            return path.u0, path.w0
        sign = 1.0 if path.w1 >= path.w0 else -1.0
        return path.u0, path.w0 * math.exp(sign * path.rho * s)
    rs = path.rho * s + path.r0
    w = path.w0 * math.cosh(path.r0) / math.cosh(rs)
    u = (path.w0 / path.rho**2) * (
        math.cosh(path.r0) * math.tanh(rs) - math.sinh(path.r0)
    ) + path.u0
    return u, w


def sample_zoom_pan(path: ZoomPanPath, s: float) -> Viewport:
    """Viewport at path position s in [0, s_total]."""
    if s < -1e-9 or s > path.s_total + 1e-9:
        raise PlanError(f"s={s} outside [0, {path.s_total}]")
    s = min(max(s, 0.0), path.s_total)
    u, w = _path_u_w(path, s)
    center = path.origin + path.direction.scaled(u - path.u0)
    return Viewport(center=center, width=w, aspect=path.aspect)


def widest_sample(path: ZoomPanPath) -> float:
    """Path position of the maximal window width."""
    if path.pure_zoom:
        return path.s_total if path.w1 > path.w0 else 0.0
    return min(max(-path.r0 / path.rho, 0.0), path.s_total)


@dataclass(frozen=True)
class Phase:
    kind: str  # "morph_in" | "zoom_pan" | "morph_out"
    duration_s: float


@dataclass(frozen=True)
class FrameSpec:
    """One animation frame: projection, camera window, and north arrow."""

    t: float
    phase: str
    spec: ProjectionSpec
    viewport: Viewport
    north_arrow_rad: float


def screen_angle(kind: str, v: PlanePoint) -> float:
    """Angle of a plane direction in screen convention (0 = up, cw positive).

    Two-point and azimuthal planes are y-up and get flipped onto the screen;
    normalized Mercator is already y-down.
    """
    if kind == "mercator":
        return math.atan2(v.x, -v.y)
    return math.atan2(v.x, v.y)


@dataclass(frozen=True)
class TransitionPlan:
    """A fully solved transition; frame_at/frames turn it into camera samples."""

    from_vertex: str
    to_vertex: str
    from_coord: GeoCoord
    to_coord: GeoCoord
    projection: str  # "tpeqd" | "mercator" | "azeqd"
    spec_start: ProjectionSpec
    spec_mid: ProjectionSpec
    spec_end: ProjectionSpec
    phases: tuple[Phase, ...]
    path: ZoomPanPath
    config: TransitionConfig
    from_image: PlanePoint
    to_image: PlanePoint

    @property
    def total_duration_s(self) -> float:
        return sum(p.duration_s for p in self.phases)

    @property
    def frame_rate(self) -> float:
        return self.config.frame_rate


def _mercator_rest_width(p: GeoCoord, width_km: float) -> float:
    # normalized-unit window width spanning width_km east-west at p
    circumference = 2.0 * math.pi * EARTH_RADIUS_KM * math.cos(math.radians(p.lat))
    if circumference <= 0.0:
        raise PlanError(f"no Mercator rest width at {p}")
    return width_km / circumference


def plan_transition(
    graph,
    from_id: str,
    to_id: str,
    cfg: TransitionConfig | None = None,
    projection: str = "tpeqd",
) -> TransitionPlan:
    """Plan a transition between two graph vertices.

    `graph` is anything with a vertex(id) method returning an object with a
    .coord attribute.
    """
    cfg = cfg or TransitionConfig()
    if projection not in ("tpeqd", "mercator", "azeqd"):
        raise PlanError(f"unknown projection kind {projection!r}")
    a = graph.vertex(from_id).coord
    b = graph.vertex(to_id).coord

    if projection == "mercator":
        spec = MERCATOR
        va = Viewport(project(spec, a), _mercator_rest_width(a, cfg.vertex_width_km), cfg.aspect)
        vb = Viewport(project(spec, b), _mercator_rest_width(b, cfg.vertex_width_km), cfg.aspect)
        path = plan_zoom_pan(va, vb, cfg.rho)
        phases = (Phase("zoom_pan", path.s_total / cfg.animation_speed),)
        return TransitionPlan(
            from_vertex=from_id, to_vertex=to_id, from_coord=a, to_coord=b,
            projection=projection, spec_start=spec, spec_mid=spec, spec_end=spec,
            phases=phases, path=path, config=cfg,
            from_image=va.center, to_image=vb.center,
        )

    baseline = great_circle_distance(a, b)
    if projection == "azeqd" or baseline < AZEQD_BASELINE_KM:
        # single fixed plane centred on the start vertex, north up
        spec = make_tpeqd(a, a)
        va = Viewport(project(spec, a), cfg.vertex_width_km, cfg.aspect)
        vb = Viewport(project(spec, b), cfg.vertex_width_km, cfg.aspect)
        path = plan_zoom_pan(va, vb, cfg.rho)
        zoom = Phase("zoom_pan", path.s_total / cfg.animation_speed)
        if projection == "tpeqd":
            # nothing to morph, but keep the uniform three-slot structure
            phases = (Phase("morph_in", 0.0), zoom, Phase("morph_out", 0.0))
        else:
            phases = (zoom,)
        return TransitionPlan(
            from_vertex=from_id, to_vertex=to_id, from_coord=a, to_coord=b,
            projection=projection, spec_start=spec, spec_mid=spec, spec_end=spec,
            phases=phases, path=path, config=cfg,
            from_image=va.center, to_image=vb.center,
        )

    spec_start = make_tpeqd(a, a)  # resting view at the start vertex
    spec_mid = morph_spec(spec_start, b, 1.0)
    spec_end = morph_spec(swap_nodes(spec_mid), b, 1.0)
    from_image = project(spec_mid, a)
    to_image = project(spec_mid, b)
    va = Viewport(from_image, cfg.vertex_width_km, cfg.aspect)
    vb = Viewport(to_image, cfg.vertex_width_km, cfg.aspect)
    path = plan_zoom_pan(va, vb, cfg.rho)
    phases = (
        Phase("morph_in", cfg.morph_duration_s),
        Phase("zoom_pan", path.s_total / cfg.animation_speed),
        Phase("morph_out", cfg.morph_duration_s),
    )
    return TransitionPlan(
        from_vertex=from_id, to_vertex=to_id, from_coord=a, to_coord=b,
        projection="tpeqd", spec_start=spec_start, spec_mid=spec_mid, spec_end=spec_end,
        phases=phases, path=path, config=cfg,
        from_image=from_image, to_image=to_image,
    )


def _locate_phase(plan: TransitionPlan, t: float) -> tuple[Phase, float]:
    # Boundary instants belong to the later phase; zero-length phases are
    # skipped.  The final instant lands at the end of the last running phase.
    start = 0.0
    for ph in plan.phases:
        end = start + ph.duration_s
        if ph.duration_s > 0.0 and t < end:
            return ph, t - start
        start = end
    for ph in reversed(plan.phases):
        if ph.duration_s > 0.0:
            return ph, ph.duration_s
    raise PlanError("no running phase")  # zero-duration plans are handled upstream


def frame_at(plan: TransitionPlan, t: float) -> FrameSpec:
    """The frame at absolute time t in [0, total duration]."""
    total = plan.total_duration_s
    if t < -1e-9 or t > total + 1e-9:
        raise PlanError(f"t={t} outside [0, {total}]")
    t = min(max(t, 0.0), total)
    cfg = plan.config
    pad = cfg.view_padding

    if total <= 0.0:
        spec = plan.spec_mid
        vw = sample_zoom_pan(plan.path, 0.0)
        center_geo = unproject(spec, vw.center)
        viewport = Viewport(vw.center, vw.width * pad, cfg.aspect)
        arrow = screen_angle(spec.kind, north_direction(spec, center_geo))
        return FrameSpec(t=t, phase="zoom_pan", spec=spec, viewport=viewport,
                         north_arrow_rad=arrow)

    phase, local = _locate_phase(plan, t)
    if phase.kind == "zoom_pan":
        spec = plan.spec_mid
        s = min(local * cfg.animation_speed, plan.path.s_total)
        vw = sample_zoom_pan(plan.path, s)
        viewport = Viewport(vw.center, vw.width * pad, cfg.aspect)
        center_geo = unproject(spec, vw.center)
    elif phase.kind == "morph_in":
        frac = local / phase.duration_s
        spec = morph_spec(plan.spec_start, plan.to_coord, frac)
        viewport = Viewport(plan.from_image, cfg.vertex_width_km * pad, cfg.aspect)
        center_geo = plan.from_coord
    else:  # morph_out
        frac = local / phase.duration_s
        spec = morph_spec(swap_nodes(plan.spec_mid), plan.to_coord, frac)
        viewport = Viewport(plan.to_image, cfg.vertex_width_km * pad, cfg.aspect)
        center_geo = plan.to_coord

    arrow = screen_angle(spec.kind, north_direction(spec, center_geo))
    return FrameSpec(t=t, phase=phase.kind, spec=spec, viewport=viewport,
                     north_arrow_rad=arrow)


def frames(plan: TransitionPlan) -> list[FrameSpec]:
    """Sample the plan at its frame rate: a regular grid from t=0 plus the
    final instant when it falls off the grid."""
    total = plan.total_duration_s
    if total <= 0.0:
        return [frame_at(plan, 0.0)]
    dt = 1.0 / plan.frame_rate
    count = int(math.floor(total / dt + 1e-9))
    times = [k * dt for k in range(count + 1)]
    if times[-1] < total - 1e-9:
        times.append(total)
    return [frame_at(plan, t) for t in times]


def correct_azimuth_start_vs_mid(spec: ProjectionSpec) -> float:
    """Signed difference (degrees, in (-180, 180]) between the on-screen
    direction of north at the first projection node and at the geodesic
    midpoint of the baseline.

    Readings taken at the start of a transition refer to a map oriented
    north-up at the midpoint; this is the correction to reconcile them.
    """
    if spec.kind != "tpeqd" or spec.node_a is None or spec.node_b is None:
        raise PlanError("azimuth correction needs a two-point projection")
    if spec.is_azeqd:
        return 0.0
    mid = geodesic_interpolate(spec.node_a, spec.node_b, 0.5)
    n_start = north_direction(spec, spec.node_a)
    n_mid = north_direction(spec, mid)
    deg = math.degrees(screen_angle(spec.kind, n_start) - screen_angle(spec.kind, n_mid))
    while deg <= -180.0:
        deg += 360.0
    while deg > 180.0:
        deg -= 360.0
    return deg
