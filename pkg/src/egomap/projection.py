"""Map projections for ego-perspective views.

Two families:

* Web Mercator, normalized to the unit square (x in [0,1] west->east,
  y in [0,1] north->south, latitude clamped at +/-85.05113 deg).
* Two-point equidistant ("tpeqd"): distances from every map point to the two
  projection nodes are true.  With coincident nodes it degenerates to the
  azimuthal equidistant projection centred on the node.

The tpeqd plane has units of kilometres and is y-up.  Its canonical frame
puts node A at (-D/2, 0) and node B at (+D/2, 0); a spec then applies a
rotation about the origin followed by a translation (`offset`).  make_tpeqd
chooses the rotation so that local north at a reference point (the geodesic
midpoint by default) maps to +y.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import NamedTuple

from .geodesy import (
    EARTH_RADIUS_KM,
    HALF_CIRCUMFERENCE_KM,
    AntipodalPointsError,
    GeoCoord,
    UndefinedBearingError,
    angular_separation_rad,
    cross_track_side,
    destination_point,
    from_unit_vector,
    geodesic_interpolate,
    great_circle_distance,
    initial_bearing,
    to_unit_vector,
    _cross,
    _dot,
    _norm,
)

# 2*atan(e^pi) - pi/2: the latitude where the square Mercator map ends
MERCATOR_MAX_LAT = 85.05112877980659
# below this baseline length a tpeqd spec is treated as azimuthal equidistant
AZEQD_BASELINE_KM = 0.001
# finite-difference step for north directions, in radians of arc
NORTH_STEP_RAD = 1e-4
# fraction of the way to the antipode beyond which shapes stop being recognizable
DISTORTION_LIMIT_FRACTION = 0.75


class ProjectionError(ValueError):
    """Base class for projection domain errors."""


class OutOfDomainError(ProjectionError):
    """Input outside the projection's domain."""


class NumericInfeasibilityError(ProjectionError):
    """Internal geometric identity violated beyond rounding tolerance."""


class PoleError(ProjectionError):
    """North direction undefined at a pole."""


class PlanePoint(NamedTuple):
    """A point in projected plane coordinates."""

    x: float
    y: float

    def __add__(self, other):  # type: ignore[override]
        return PlanePoint(self.x + other.x, self.y + other.y)

    def __sub__(self, other):
        return PlanePoint(self.x - other.x, self.y - other.y)

    def scaled(self, k: float) -> "PlanePoint":
        return PlanePoint(self.x * k, self.y * k)

    def norm(self) -> float:
        return math.hypot(self.x, self.y)


ORIGIN = PlanePoint(0.0, 0.0)


def rotate(p: PlanePoint, angle_rad: float) -> PlanePoint:
    """Rotate `p` counterclockwise about the origin."""
    c, s = math.cos(angle_rad), math.sin(angle_rad)
    return PlanePoint(c * p.x - s * p.y, s * p.x + c * p.y)


@dataclass(frozen=True)
class ProjectionSpec:
    """A fully pinned projection: kind, nodes, and plane placement.

    `rotation_rad` is applied about the canonical origin, then `offset` is
    added.  Mercator specs ignore nodes and placement.
    """

    kind: str  # "mercator" | "tpeqd"
    node_a: GeoCoord | None = None
    node_b: GeoCoord | None = None
    rotation_rad: float = 0.0
    offset: PlanePoint = ORIGIN
    baseline_km: float = 0.0

    @property
    def is_azeqd(self) -> bool:
        return self.kind == "tpeqd" and self.baseline_km < AZEQD_BASELINE_KM


MERCATOR = ProjectionSpec(kind="mercator")


@dataclass(frozen=True)
class DistortionReport:
    """How far into the badly-distorted outer region a point sits."""

    fraction_to_antipode: float
    within_limit: bool


def project_mercator(p: GeoCoord) -> PlanePoint:
    """Normalized Web Mercator; raises for latitudes beyond the clamp."""
    if abs(p.lat) > MERCATOR_MAX_LAT:
        raise OutOfDomainError(f"latitude {p.lat} beyond Mercator clamp")
    x = (p.lon + 180.0) / 360.0
    y = 0.5 - math.atanh(math.sin(math.radians(p.lat))) / (2.0 * math.pi)
    return PlanePoint(x, min(1.0, max(0.0, y)))


def unproject_mercator(q: PlanePoint) -> GeoCoord:
    """Inverse of project_mercator on the unit square."""
    if not (0.0 <= q.x <= 1.0 and 0.0 <= q.y <= 1.0):
        raise OutOfDomainError(f"{q} outside the unit square")
    lon = q.x * 360.0 - 180.0
    lat = math.degrees(math.asin(math.tanh((0.5 - q.y) * 2.0 * math.pi)))
    return GeoCoord(lat, lon)


def _azeqd_canonical(node: GeoCoord, p: GeoCoord) -> PlanePoint:
    # north-up polar plot: radius = distance, angle = bearing from the node
    d = great_circle_distance(node, p)
    if d == 0.0:
        return ORIGIN
    try:
        beta = math.radians(initial_bearing(node, p))
    except UndefinedBearingError:
        # antipode (or fp-coincident): direction arbitrary but deterministic
        beta = 0.0
    return PlanePoint(d * math.sin(beta), d * math.cos(beta))


def project_canonical(spec: ProjectionSpec, p: GeoCoord) -> PlanePoint:
    """tpeqd image of `p` in the canonical frame, before rotation/offset."""
    if spec.kind != "tpeqd":
        raise ProjectionError("canonical frame only defined for tpeqd specs")
    assert spec.node_a is not None and spec.node_b is not None
    if spec.is_azeqd:
        return _azeqd_canonical(spec.node_a, p)
    d_a = great_circle_distance(spec.node_a, p)
    d_b = great_circle_distance(spec.node_b, p)
    big_d = spec.baseline_km
    x = (d_a * d_a - d_b * d_b) / (2.0 * big_d)
    arg = d_a * d_a - (x + big_d / 2.0) ** 2
    if arg < 0.0:
        if -arg <= 1e-6 * max(d_a * d_a, 1e-12):
            arg = 0.0
        else:
            raise NumericInfeasibilityError(
                f"distance triangle violated by {-arg} km^2 at {p}"
            )
    side = cross_track_side(spec.node_a, spec.node_b, p)
    if side == 0:
        # Exactly on the baseline great circle. Between and beyond the
        # nodes the height is analytically zero and arg is rounding noise
        # (well under 1 km^2); on the opposite arc the distance circles
        # meet off-axis and the branch sign is genuinely ambiguous. Resolve
        # it by a node-order-free rule so the swapped spec agrees.
        if arg <= 1.0:
            return PlanePoint(x, 0.0)
        pair_sign = (
            1.0
            if (spec.node_a.lat, spec.node_a.lon) <= (spec.node_b.lat, spec.node_b.lon)
            else -1.0
        )
        return PlanePoint(x, pair_sign * math.sqrt(arg))
    return PlanePoint(x, side * math.sqrt(arg))


def project(spec: ProjectionSpec, p: GeoCoord) -> PlanePoint:
    """Project a geographic point under `spec`."""
    if spec.kind == "mercator":
        return project_mercator(p)
    return rotate(project_canonical(spec, p), spec.rotation_rad) + spec.offset


def _canonical_north(spec: ProjectionSpec, p: GeoCoord) -> PlanePoint:
    """Unit image of a due-north step at `p` in the canonical frame.

    Central difference: the image is direction-smooth even at a node, and
    this kills the quadratic term a one-sided step would pick up.
    """
    if abs(p.lat) > 90.0 - math.degrees(NORTH_STEP_RAD):
        raise PoleError(f"north direction undefined at {p}")
    step_km = NORTH_STEP_RAD * EARTH_RADIUS_KM
    q1 = project_canonical(spec, destination_point(p, 0.0, step_km))
    q0 = project_canonical(spec, destination_point(p, 180.0, step_km))
    d = q1 - q0
    n = d.norm()
    if n == 0.0:
        raise ProjectionError(f"north direction degenerate at {p}")
    return d.scaled(1.0 / n)


def north_direction(spec: ProjectionSpec, p: GeoCoord) -> PlanePoint:
    """Unit plane direction of local north at `p` (finite difference)."""
    if spec.kind == "mercator":
        if abs(p.lat) > MERCATOR_MAX_LAT - math.degrees(NORTH_STEP_RAD):
            raise PoleError(f"north direction undefined at {p}")
        return PlanePoint(0.0, -1.0)  # normalized Mercator is y-down
    return rotate(_canonical_north(spec, p), spec.rotation_rad)


def _north_up_rotation(node_a: GeoCoord, node_b: GeoCoord, reference: GeoCoord | None = None) -> float:
    """Rotation making local north at the reference point map to +y.

    Default reference is the geodesic midpoint of the nodes.  Degenerate
    (coincident-node) frames are already north-up and return 0.
    """
    big_d = great_circle_distance(node_a, node_b)
    if big_d < AZEQD_BASELINE_KM:
        return 0.0
    if reference is None:
        reference = geodesic_interpolate(node_a, node_b, 0.5)
    base = ProjectionSpec(kind="tpeqd", node_a=node_a, node_b=node_b, baseline_km=big_d)
    n = _canonical_north(base, reference)
    return math.pi / 2.0 - math.atan2(n.y, n.x)


def make_tpeqd(node_a: GeoCoord, node_b: GeoCoord, north_reference: str = "midpoint") -> ProjectionSpec:
    """Build a tpeqd spec for two nodes.

    `north_reference` selects where north is made to point up: "midpoint"
    (geodesic midpoint, the default) or "start" (node A).  Antipodal nodes
    are rejected.
    """
    sep = angular_separation_rad(node_a, node_b)
    if sep > math.pi - 1e-9:
        raise AntipodalPointsError(f"projection nodes {node_a}, {node_b} are antipodal")
    if north_reference not in ("midpoint", "start"):
        raise ProjectionError(f"unknown north reference {north_reference!r}")
    big_d = great_circle_distance(node_a, node_b)
    ref = None if north_reference == "midpoint" else node_a
    rot = _north_up_rotation(node_a, node_b, ref)
    return ProjectionSpec(
        kind="tpeqd", node_a=node_a, node_b=node_b, rotation_rad=rot, baseline_km=big_d
    )


def _intersect_circles(a: GeoCoord, b: GeoCoord, r_a: float, r_b: float, pick_left: bool) -> GeoCoord:
    """Intersect spherical circles around a and b; pick by side of a->b."""
    va, vb = to_unit_vector(a), to_unit_vector(b)
    ca, cb = math.cos(r_a / EARTH_RADIUS_KM), math.cos(r_b / EARTH_RADIUS_KM)
    dot_ab = _dot(va, vb)
    denom = 1.0 - dot_ab * dot_ab
    if denom < 1e-18:
        raise OutOfDomainError("projection nodes too close for circle intersection")
    alpha = (ca - dot_ab * cb) / denom
    beta = (cb - dot_ab * ca) / denom
    p0 = (
        alpha * va[0] + beta * vb[0],
        alpha * va[1] + beta * vb[1],
        alpha * va[2] + beta * vb[2],
    )
    n = _cross(va, vb)
    nn2 = _dot(n, n)
    gamma2 = (1.0 - _dot(p0, p0)) / nn2
    if gamma2 < 0.0:
        # rounding in alpha/beta scales like 1/denom, so short baselines push
        # on-circle points slightly negative; a real out-of-domain point
        # lands far below
        if gamma2 > -1e-6:
            gamma2 = 0.0
        else:
            raise OutOfDomainError("plane point outside the projection image")
    gamma = math.sqrt(gamma2)
    if not pick_left:
        gamma = -gamma
    v = (p0[0] + gamma * n[0], p0[1] + gamma * n[1], p0[2] + gamma * n[2])
    nv = _norm(v)
    return from_unit_vector((v[0] / nv, v[1] / nv, v[2] / nv))


def unproject(spec: ProjectionSpec, q: PlanePoint) -> GeoCoord:
    """Invert `project`; raises OutOfDomainError when `q` has no preimage."""
    if spec.kind == "mercator":
        return unproject_mercator(q)
    assert spec.node_a is not None and spec.node_b is not None
    canon = rotate(q - spec.offset, -spec.rotation_rad)
    if spec.is_azeqd:
        d = canon.norm()
        if d > HALF_CIRCUMFERENCE_KM + 1e-6:
            raise OutOfDomainError(f"radius {d} beyond the antipodal rim")
        if d == 0.0:
            return spec.node_a
        beta = math.degrees(math.atan2(canon.x, canon.y))
        return destination_point(spec.node_a, beta, min(d, HALF_CIRCUMFERENCE_KM))
    half = spec.baseline_km / 2.0
    r_a = math.hypot(canon.x + half, canon.y)
    r_b = math.hypot(canon.x - half, canon.y)
    if r_a > HALF_CIRCUMFERENCE_KM + 1e-6 or r_b > HALF_CIRCUMFERENCE_KM + 1e-6:
        raise OutOfDomainError("radii beyond the antipodal rim")
    return _intersect_circles(spec.node_a, spec.node_b, r_a, r_b, pick_left=canon.y >= 0.0)


def distortion_report(spec: ProjectionSpec, p: GeoCoord) -> DistortionReport:
    """Fraction of the way from the nearer node to its antipode."""
    if spec.kind != "tpeqd":
        raise ProjectionError("distortion report only defined for tpeqd specs")
    assert spec.node_a is not None and spec.node_b is not None
    d = min(
        great_circle_distance(spec.node_a, p),
        great_circle_distance(spec.node_b, p),
    )
    fraction = d / HALF_CIRCUMFERENCE_KM
    return DistortionReport(fraction_to_antipode=fraction, within_limit=fraction <= DISTORTION_LIMIT_FRACTION)


def swap_nodes(spec: ProjectionSpec) -> ProjectionSpec:
    """Exchange the two nodes without changing the projection as a map.

    The canonical frame of the swapped pair is the original one rotated by
    pi, so compensating the rotation keeps every image point fixed.
    """
    if spec.kind != "tpeqd":
        raise ProjectionError("swap_nodes only defined for tpeqd specs")
    if spec.is_azeqd:
        raise ProjectionError("swap_nodes undefined for a degenerate baseline")
    return replace(
        spec,
        node_a=spec.node_b,
        node_b=spec.node_a,
        rotation_rad=spec.rotation_rad - math.pi,
    )


def morph_spec(from_spec: ProjectionSpec, target_node_b: GeoCoord, t: float) -> ProjectionSpec:
    """Slide node B along the geodesic toward `target_node_b`.

    Node A stays anchored: the returned spec's rotation follows the
    north-up-at-midpoint rule relative to `from_spec` (re-imposed absolutely
    at t=1) and its offset re-pins the image of node A, so the map rotates
    about the anchored node while the second node travels.
    """
    if from_spec.kind != "tpeqd":
        raise ProjectionError("morph only defined for tpeqd specs")
    if not (0.0 <= t <= 1.0):
        raise ProjectionError(f"morph fraction {t} outside [0, 1]")
    assert from_spec.node_a is not None and from_spec.node_b is not None
    node_a = from_spec.node_a
    node_b = geodesic_interpolate(from_spec.node_b, target_node_b, t)
    if angular_separation_rad(node_a, node_b) > math.pi - 1e-9:
        raise AntipodalPointsError("morph path crosses the anchor's antipode")
    if t == 1.0:
        rot = _north_up_rotation(node_a, node_b)
    else:
        rot = (
            from_spec.rotation_rad
            + _north_up_rotation(node_a, node_b)
            - _north_up_rotation(node_a, from_spec.node_b)
        )
    anchor = project(from_spec, node_a)
    big_d = great_circle_distance(node_a, node_b)
    bare = ProjectionSpec(
        kind="tpeqd", node_a=node_a, node_b=node_b, rotation_rad=rot, baseline_km=big_d
    )
    offset = anchor - rotate(project_canonical(bare, node_a), rot)
    return replace(bare, offset=offset)
