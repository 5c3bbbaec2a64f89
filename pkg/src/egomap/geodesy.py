"""Spherical geodesy primitives: distances, bearings, interpolation, sides.

All public functions take and return degrees; internal math is in radians.
The sphere radius follows the IUGG mean earth radius.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

EARTH_RADIUS_KM: float = 6371.0088
HALF_CIRCUMFERENCE_KM: float = math.pi * EARTH_RADIUS_KM

# angular tolerance below which two points count as coincident/antipodal
_EPS_RAD = 1e-9
# normalized scalar triple product below this counts as "on the great circle"
_SIDE_EPS = 1e-12


class GeodesyError(ValueError):
    """Base class for geodesic domain errors."""


class UndefinedBearingError(GeodesyError):
    """Bearing requested between coincident or antipodal points."""


class AntipodalPointsError(GeodesyError):
    """Operation undefined for an antipodal point pair."""


class DegenerateBaselineError(GeodesyError):
    """Side-of-track undefined: baseline endpoints coincident or antipodal."""


def normalize_lon(lon: float) -> float:
    """Wrap a longitude into (-180, 180]."""
    lon = math.fmod(lon, 360.0)
    if lon <= -180.0:
        lon += 360.0
    elif lon > 180.0:
        lon -= 360.0
    return lon + 0.0  # avoid -0.0


def normalize_bearing(deg: float) -> float:
    """Wrap a bearing into [0, 360)."""
    deg = math.fmod(deg, 360.0)
    if deg < 0.0:
        deg += 360.0
    return 0.0 if deg == 360.0 else deg


@dataclass(frozen=True)
class GeoCoord:
    """A point on the sphere; lat in [-90, 90], lon normalized to (-180, 180]."""

    lat: float
    lon: float

    def __post_init__(self) -> None:
        if not (-90.0 <= self.lat <= 90.0) or not math.isfinite(self.lon):
            raise GeodesyError(f"invalid coordinate ({self.lat}, {self.lon})")
        object.__setattr__(self, "lon", normalize_lon(self.lon))


def to_unit_vector(p: GeoCoord) -> tuple[float, float, float]:
    """Geographic coordinate -> unit vector on the sphere."""
    lat = math.radians(p.lat)
    lon = math.radians(p.lon)
    c = math.cos(lat)
    return (c * math.cos(lon), c * math.sin(lon), math.sin(lat))


def from_unit_vector(v: tuple[float, float, float]) -> GeoCoord:
    """Unit vector -> geographic coordinate."""
    x, y, z = v
    hyp = math.hypot(x, y)
    return GeoCoord(math.degrees(math.atan2(z, hyp)), math.degrees(math.atan2(y, x)))


def _cross(a, b):
    return (a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0])


def _dot(a, b):
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]


def _norm(a):
    return math.sqrt(_dot(a, a))


def angular_separation_rad(a: GeoCoord, b: GeoCoord) -> float:
    """Central angle between two points, in radians."""
    va, vb = to_unit_vector(a), to_unit_vector(b)
    # atan2 form is accurate for both tiny and near-antipodal separations
    return math.atan2(_norm(_cross(va, vb)), _dot(va, vb))


def great_circle_distance(a: GeoCoord, b: GeoCoord) -> float:
    """Great-circle distance in kilometres."""
    return angular_separation_rad(a, b) * EARTH_RADIUS_KM


def initial_bearing(a: GeoCoord, b: GeoCoord) -> float:
    """Forward azimuth at `a` toward `b`, degrees in [0, 360).

    Raises UndefinedBearingError for coincident or antipodal inputs.
    """
    sep = angular_separation_rad(a, b)
    if sep < _EPS_RAD or sep > math.pi - _EPS_RAD:
        raise UndefinedBearingError(f"bearing undefined between {a} and {b}")
    lat1, lat2 = math.radians(a.lat), math.radians(b.lat)
    dlon = math.radians(b.lon - a.lon)
    y = math.sin(dlon) * math.cos(lat2)
    x = math.cos(lat1) * math.sin(lat2) - math.sin(lat1) * math.cos(lat2) * math.cos(dlon)
    return normalize_bearing(math.degrees(math.atan2(y, x)))


def destination_point(origin: GeoCoord, bearing_deg: float, distance_km: float) -> GeoCoord:
    """Point reached from `origin` along `bearing_deg` after `distance_km`."""
    if distance_km < 0.0:
        raise GeodesyError("distance must be non-negative")
    delta = distance_km / EARTH_RADIUS_KM
    theta = math.radians(bearing_deg)
    lat1 = math.radians(origin.lat)
    lon1 = math.radians(origin.lon)
    sin_lat2 = math.sin(lat1) * math.cos(delta) + math.cos(lat1) * math.sin(delta) * math.cos(theta)
    sin_lat2 = max(-1.0, min(1.0, sin_lat2))
    lat2 = math.asin(sin_lat2)
    lon2 = lon1 + math.atan2(
        math.sin(theta) * math.sin(delta) * math.cos(lat1),
        math.cos(delta) - math.sin(lat1) * sin_lat2,
    )
    return GeoCoord(math.degrees(lat2), math.degrees(lon2))


def geodesic_interpolate(a: GeoCoord, b: GeoCoord, t: float) -> GeoCoord:
    """Point a fraction `t` in [0, 1] along the shorter great-circle arc a->b.

    Raises AntipodalPointsError when the arc is ambiguous.
    """
    if not (0.0 <= t <= 1.0):
        raise GeodesyError(f"interpolation fraction {t} outside [0, 1]")
    va, vb = to_unit_vector(a), to_unit_vector(b)
    omega = math.atan2(_norm(_cross(va, vb)), _dot(va, vb))
    if omega > math.pi - _EPS_RAD:
        raise AntipodalPointsError(f"geodesic between {a} and {b} is ambiguous")
    if t == 0.0 or omega < _EPS_RAD:
        return a
    if t == 1.0:
        return b
    sin_omega = math.sin(omega)
    ka = math.sin((1.0 - t) * omega) / sin_omega
    kb = math.sin(t * omega) / sin_omega
    v = (ka * va[0] + kb * vb[0], ka * va[1] + kb * vb[1], ka * va[2] + kb * vb[2])
    return from_unit_vector(v)


def cross_track_side(a: GeoCoord, b: GeoCoord, p: GeoCoord) -> int:
    """Which side of the directed geodesic a->b the point p lies on.

    +1 left, -1 right, 0 on the great circle (within tolerance).
    """
    va, vb, vp = to_unit_vector(a), to_unit_vector(b), to_unit_vector(p)
    n = _cross(va, vb)
    nn = _norm(n)
    if nn < _EPS_RAD:
        raise DegenerateBaselineError(f"baseline {a} -> {b} is degenerate")
    s = _dot(n, vp) / nn
    if abs(s) < _SIDE_EPS:
        return 0
    return 1 if s > 0.0 else -1


def antipode(p: GeoCoord) -> GeoCoord:
    """The point diametrically opposite `p`."""
    return GeoCoord(-p.lat, p.lon + 180.0)
