import math
import random

import pytest
from hypothesis import strategies as st

from egomap.geodesy import GeoCoord, geodesic_interpolate, great_circle_distance

# well-spread city coordinates reused across suites
BERLIN = GeoCoord(52.517, 13.389)
TOKYO = GeoCoord(35.700, 139.767)
NEW_YORK = GeoCoord(40.713, -74.006)
SYDNEY = GeoCoord(-33.868, 151.209)
CAPE_TOWN = GeoCoord(-33.925, 18.424)
REYKJAVIK = GeoCoord(64.147, -21.942)


def coords(min_lat=-85.0, max_lat=85.0):
    """Strategy for geographic coordinates away from the poles."""
    return st.builds(
        GeoCoord,
        st.floats(min_value=min_lat, max_value=max_lat),
        st.floats(min_value=-180.0, max_value=180.0),
    )


def _midpoint_off_pole(ab, limit=89.0):
    # a pair at equal latitudes 180 degrees apart puts its midpoint on a
    # pole, where the north-up orientation is genuinely undefined
    return abs(geodesic_interpolate(*ab, 0.5).lat) < limit


def separated_pairs(min_km=50.0, max_km=18000.0):
    """Strategy for node pairs with a comfortably non-degenerate baseline."""
    return (
        st.tuples(coords(-80, 80), coords(-80, 80))
        .filter(lambda ab: min_km < great_circle_distance(*ab) < max_km)
        .filter(_midpoint_off_pole)
    )


def random_coord(rng: random.Random, max_abs_lat: float = 90.0) -> GeoCoord:
    """Uniform point on the sphere (rejection on the latitude band)."""
    while True:
        z = rng.uniform(-1.0, 1.0)
        lat = math.degrees(math.asin(z))
        if abs(lat) <= max_abs_lat:
            return GeoCoord(lat, rng.uniform(-180.0, 180.0))


@pytest.fixture
def rng():
    return random.Random(20240817)


# -- acceptance reporting ----------------------------------------------------
# tests marked @pytest.mark.criterion("...") get one PASS/FAIL line each in
# the terminal summary, so a run shows the contract checklist at a glance.


def pytest_configure(config):
    config.addinivalue_line(
        "markers", "criterion(label): acceptance criterion checked by this test"
    )
    config._criterion_labels = {}


def pytest_collection_modifyitems(config, items):
    for item in items:
        marker = item.get_closest_marker("criterion")
        if marker is not None:
            config._criterion_labels[item.nodeid] = marker.args[0]


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    labels = getattr(config, "_criterion_labels", {})
    if not labels:
        return
    status: dict[str, str] = {}
    for reports in terminalreporter.stats.values():
        for rep in reports:
            label = labels.get(getattr(rep, "nodeid", None))
            if label is None:
                continue
            outcome = getattr(rep, "outcome", "")
            if outcome == "failed":
                status[label] = "FAIL"
            elif outcome == "skipped":
                status.setdefault(label, "SKIP")
            elif outcome == "passed" and getattr(rep, "when", "") == "call":
                status.setdefault(label, "PASS")
    if not status:
        return
    terminalreporter.section("acceptance criteria")
    for label in sorted(status):
        terminalreporter.write_line(f"{status[label]}  {label}")
