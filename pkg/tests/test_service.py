"""Explorer service contract: endpoints, errors, session behavior."""
import json
import warnings

import pytest

warnings.filterwarnings("ignore", message="Using `httpx`")

from fastapi.testclient import TestClient

from egomap.config import AppConfig, PipelineConfig
from egomap.doi import default_config, select_vertices
from egomap.graph import load_graph
from egomap.layout import layout_frame
from egomap.service import create_app
from egomap.transitions import TransitionConfig, frame_at, plan_transition

GRAPH = "data/fixture_graph.json"
BASEMAP = "data/fixture_basemap.geojson"


@pytest.fixture(scope="module")
def client(tmp_path_factory):
    cfg = AppConfig(
        graph_path=GRAPH,
        basemap_paths=(BASEMAP,),
        assets_dir=str(tmp_path_factory.mktemp("assets")),
        pipeline=PipelineConfig(transition=TransitionConfig(frame_rate=10.0),
                                morph_keyframes=3),
    )
    with TestClient(create_app(cfg)) as c:
        yield c


_SESSION_COUNTER = [0]


def fresh_session() -> str:
    _SESSION_COUNTER[0] += 1
    return f"s{_SESSION_COUNTER[0]}"


class TestGraphEndpoint:
    def test_full_serialization(self, client):
        r = client.get("/api/graph")
        assert r.status_code == 200
        doc = r.json()
        assert doc["schemaVersion"] == 1
        assert len(doc["vertices"]) == 10
        assert ["berlin", "tokyo"] in doc["edges"]
        berlin = next(v for v in doc["vertices"] if v["id"] == "berlin")
        assert berlin["lat"] == pytest.approx(52.517)
        assert berlin["attributes"]["population"] == 3769000

    def test_stable_across_calls(self, client):
        assert client.get("/api/graph").text == client.get("/api/graph").text

    def test_503_before_load(self, tmp_path):
        cfg = AppConfig(graph_path=str(tmp_path / "nope.json"))
        with TestClient(create_app(cfg)) as c:
            assert c.get("/api/graph").status_code == 503
            assert c.get("/api/view", params={"vertex": "x"}).status_code == 503


class TestViewEndpoint:
    def test_unknown_vertex(self, client):
        assert client.get("/api/view", params={"vertex": "atlantis"}).status_code == 404

    def test_static_view_shape(self, client):
        r = client.get("/api/view", params={"vertex": "berlin"})
        assert r.status_code == 200
        doc = r.json()
        assert doc["frame"]["northArrowRad"] == pytest.approx(0.0, abs=1e-12)
        assert doc["frame"]["spec"]["kind"] == "azeqd"
        names = [v["vertex"] for v in doc["layout"]["onScreen"]]
        assert "berlin" in names
        assert doc["geometry"]["layers"]  # basemap present

    def test_matches_layout_module(self, client):
        sid = fresh_session()
        r = client.get("/api/view", params={"vertex": "berlin", "session": sid})
        doc = r.json()

        graph = load_graph(GRAPH)
        tcfg = TransitionConfig(frame_rate=10.0)
        plan = plan_transition(graph, "berlin", "berlin", tcfg, projection="azeqd")
        frame = frame_at(plan, 0.0)
        layout = layout_frame(frame, graph, select_vertices(graph, "berlin", default_config()),
                              focus_ids=("berlin",))
        got = doc["layout"]
        assert [v["vertex"] for v in got["onScreen"]] == [v.vertex for v in layout.on_screen]
        assert [p["vertices"] for p in got["proxies"]] == [list(p.vertices) for p in layout.proxies]
        for p_doc, p in zip(got["proxies"], layout.proxies):
            assert p_doc["anchor"][0] == pytest.approx(p.anchor.x)
            assert p_doc["directionRad"] == pytest.approx(p.direction_rad)

    def test_no_selection_means_no_proxies(self, client):
        sid = fresh_session()
        # a half-life so short every other vertex scores ~0, below the threshold
        put = client.put("/api/doi-config", params={"session": sid}, json={
            "components": [{"function": "geo_distance", "weight": 1.0,
                            "params": {"halfLifeKm": 1.0}}],
            "threshold": 0.5,
            "maxProxies": 8,
        })
        assert put.status_code == 200
        doc = client.get("/api/view", params={"vertex": "berlin", "session": sid}).json()
        assert doc["layout"]["proxies"] == []
        assert [v["vertex"] for v in doc["layout"]["onScreen"]] == ["berlin"]

    def test_far_neighbor_becomes_proxy(self, client):
        sid = fresh_session()
        doc = client.get("/api/view", params={"vertex": "berlin", "session": sid}).json()
        proxied = [v for p in doc["layout"]["proxies"] for v in p["vertices"]]
        assert "tokyo" in proxied  # neighbor, far outside a 200 km window

    def test_identical_requests_identical_bodies(self, client):
        sid = fresh_session()
        a = client.get("/api/view", params={"vertex": "sydney", "session": sid})
        b = client.get("/api/view", params={"vertex": "sydney", "session": sid})
        assert a.text == b.text


class TestTransitionEndpoint:
    def test_plan_reports_phases(self, client):
        sid = fresh_session()
        r = client.post("/api/transition", params={"session": sid},
                        json={"from": "berlin", "to": "tokyo", "projection": "tpeqd"})
        assert r.status_code == 201
        doc = r.json()
        assert [p["kind"] for p in doc["phases"]] == ["morph_in", "zoom_pan", "morph_out"]
        assert doc["durationS"] > 0
        assert doc["frameCount"] > 1
        assert doc["bundleKey"]

    def test_self_transition_degenerates(self, client):
        sid = fresh_session()
        r = client.post("/api/transition", params={"session": sid},
                        json={"from": "lima", "to": "lima"})
        assert r.status_code == 201
        assert r.json()["durationS"] == 0.0
        assert r.json()["frameCount"] == 1

    def test_second_post_while_active_409(self, client):
        sid = fresh_session()
        first = client.post("/api/transition", params={"session": sid},
                            json={"from": "berlin", "to": "tokyo"})
        assert first.status_code == 201
        second = client.post("/api/transition", params={"session": sid},
                             json={"from": "tokyo", "to": "sydney"})
        assert second.status_code == 409

    def test_unknown_vertex_404(self, client):
        r = client.post("/api/transition", params={"session": fresh_session()},
                        json={"from": "berlin", "to": "atlantis"})
        assert r.status_code == 404

    def test_bad_projection_rejected(self, client):
        r = client.post("/api/transition", params={"session": fresh_session()},
                        json={"from": "berlin", "to": "tokyo", "projection": "sinusoidal"})
        assert r.status_code == 422

    def test_antipodal_pair_422_and_state_unchanged(self, tmp_path):
        graph_doc = {
            "schemaVersion": 1,
            "vertices": [
                {"id": "p", "name": "P", "lat": 0.0, "lon": 0.0},
                {"id": "q", "name": "Q", "lat": 0.0, "lon": 180.0},
                {"id": "r", "name": "R", "lat": 10.0, "lon": 20.0},
            ],
            "edges": [["p", "q"], ["p", "r"]],
        }
        gpath = tmp_path / "g.json"
        gpath.write_text(json.dumps(graph_doc))
        cfg = AppConfig(graph_path=str(gpath), basemap_paths=(BASEMAP,),
                        assets_dir=str(tmp_path / "assets"))
        with TestClient(create_app(cfg)) as c:
            r = c.post("/api/transition", json={"from": "p", "to": "q"})
            assert r.status_code == 422
            # failed POST left the session free and unchanged
            session = c.get("/api/session").json()
            assert session["activeTransition"] is None
            assert session["history"] == []
            ok = c.post("/api/transition", json={"from": "p", "to": "r"})
            assert ok.status_code == 201

    def test_mercator_plan_has_no_bundle(self, client):
        sid = fresh_session()
        r = client.post("/api/transition", params={"session": sid},
                        json={"from": "berlin", "to": "new_york", "projection": "mercator"})
        assert r.status_code == 201
        assert r.json()["bundleKey"] is None
        assert [p["kind"] for p in r.json()["phases"]] == ["zoom_pan"]

    def test_session_tracks_navigation(self, client):
        sid = fresh_session()
        client.post("/api/transition", params={"session": sid},
                    json={"from": "lima", "to": "lima"})
        doc = client.get("/api/session", params={"session": sid}).json()
        assert doc["currentVertex"] == "lima"
        assert doc["history"] == ["lima", "lima"]


class TestFrameEndpoint:
    @pytest.fixture()
    def transition(self, client):
        sid = fresh_session()
        r = client.post("/api/transition", params={"session": sid},
                        json={"from": "berlin", "to": "tokyo"})
        return sid, r.json()

    def test_start_frame(self, client, transition):
        sid, doc = transition
        r = client.get(f"/api/transition/{doc['id']}/frame", params={"t": 0.0})
        assert r.status_code == 200
        frame = r.json()
        assert frame["frameIndex"] == 0
        assert frame["frame"]["phase"] == "morph_in"
        assert frame["geometry"]["section"] == "morphIn"
        assert frame["geometry"]["index"] == 0

    def test_end_frame_centered_on_destination(self, client, transition):
        sid, doc = transition
        r = client.get(f"/api/transition/{doc['id']}/frame", params={"t": doc["durationS"]})
        frame = r.json()
        assert frame["frame"]["phase"] == "morph_out"
        assert frame["geometry"]["section"] == "morphOut"
        tokyo = next(v for v in frame["layout"]["onScreen"] if v["vertex"] == "tokyo")
        cx, cy, _, _ = frame["frame"]["viewport"]
        assert tokyo["pos"][0] == pytest.approx(cx, abs=1e-6)
        assert tokyo["pos"][1] == pytest.approx(cy, abs=1e-6)

    def test_monotone_sweep(self, client, transition):
        sid, doc = transition
        steps = 12
        indices = []
        for k in range(steps + 1):
            t = doc["durationS"] * k / steps
            r = client.get(f"/api/transition/{doc['id']}/frame", params={"t": t})
            assert r.status_code == 200
            indices.append(r.json()["frameIndex"])
        assert indices == sorted(indices)
        assert indices[-1] == doc["frameCount"] - 1

    def test_interest_set_includes_destination_side(self, client, transition):
        sid, doc = transition
        mid = doc["durationS"] / 2
        r = client.get(f"/api/transition/{doc['id']}/frame", params={"t": mid})
        layout = r.json()["layout"]
        shown = {v["vertex"] for v in layout["onScreen"]}
        shown.update(v for p in layout["proxies"] for v in p["vertices"])
        assert "berlin" in shown and "tokyo" in shown

    def test_out_of_range_t(self, client, transition):
        sid, doc = transition
        tid = doc["id"]
        assert client.get(f"/api/transition/{tid}/frame", params={"t": -0.5}).status_code == 416
        too_late = doc["durationS"] + 1.0
        assert client.get(f"/api/transition/{tid}/frame", params={"t": too_late}).status_code == 416

    def test_unknown_transition(self, client):
        assert client.get("/api/transition/t999999/frame", params={"t": 0}).status_code == 404


class TestDoIConfigEndpoint:
    def test_applied_config_is_echoed(self, client):
        sid = fresh_session()
        body = {
            "components": [{"function": "degree", "weight": 2.0, "params": {}}],
            "threshold": 0.1,
            "maxProxies": 3,
        }
        r = client.put("/api/doi-config", params={"session": sid}, json=body)
        assert r.status_code == 200
        applied = r.json()["applied"]
        assert applied["threshold"] == 0.1
        assert applied["maxProxies"] == 3
        assert applied["components"][0]["function"] == "degree"

    def test_threshold_above_one_422(self, client):
        r = client.put("/api/doi-config", params={"session": fresh_session()},
                       json={"components": [{"function": "degree", "weight": 1.0}],
                             "threshold": 1.1})
        assert r.status_code == 422

    def test_all_zero_weights_422(self, client):
        r = client.put("/api/doi-config", params={"session": fresh_session()},
                       json={"components": [{"function": "degree", "weight": 0.0}],
                             "threshold": 0.0})
        assert r.status_code == 422

    def test_unknown_attribute_422(self, client):
        r = client.put("/api/doi-config", params={"session": fresh_session()},
                       json={"components": [{"function": "attribute", "weight": 1.0,
                                             "params": {"name": "elevation"}}],
                             "threshold": 0.0})
        assert r.status_code == 422

    def test_raising_threshold_shrinks_proxy_set(self, client):
        sid = fresh_session()
        def proxies_at(threshold):
            body = {
                "components": [{"function": "geo_distance", "weight": 1.0,
                                "params": {"halfLifeKm": 8000.0}}],
                "threshold": threshold,
                "maxProxies": 10,
            }
            assert client.put("/api/doi-config", params={"session": sid},
                              json=body).status_code == 200
            doc = client.get("/api/view",
                             params={"vertex": "berlin", "session": sid}).json()
            return {v for p in doc["layout"]["proxies"] for v in p["vertices"]}

        low = proxies_at(0.2)
        high = proxies_at(0.55)
        assert high <= low
        assert low  # the check is vacuous if nothing was selected

    def test_sessions_are_isolated(self, client):
        sa, sb = fresh_session(), fresh_session()
        client.put("/api/doi-config", params={"session": sa}, json={
            "components": [{"function": "geo_distance", "weight": 1.0,
                            "params": {"halfLifeKm": 1.0}}],
            "threshold": 0.9,
        })
        doc_a = client.get("/api/view", params={"vertex": "berlin", "session": sa}).json()
        doc_b = client.get("/api/view", params={"vertex": "berlin", "session": sb}).json()
        assert doc_a["layout"]["proxies"] == []
        assert doc_b["layout"]["proxies"] != []


class TestTilesAndAssets:
    def test_mercator_tile_plan(self, client):
        sid = fresh_session()
        r = client.post("/api/transition", params={"session": sid},
                        json={"from": "berlin", "to": "reykjavik", "projection": "mercator"})
        tid = r.json()["id"]
        plan = client.get("/api/tiles/plan", params={"transition": tid})
        assert plan.status_code == 200
        tiles = plan.json()["tiles"]
        assert tiles and all(u.startswith("https://tile.openstreetmap.org/") for u in tiles)
        assert plan.headers["cache-control"]

    def test_tpeqd_plan_409(self, client):
        sid = fresh_session()
        r = client.post("/api/transition", params={"session": sid},
                        json={"from": "cape_town", "to": "nairobi", "projection": "tpeqd"})
        tid = r.json()["id"]
        assert client.get("/api/tiles/plan", params={"transition": tid}).status_code == 409

    def test_unknown_transition_404(self, client):
        assert client.get("/api/tiles/plan", params={"transition": "zz"}).status_code == 404

    def test_bundle_served_with_cache_headers(self, client):
        sid = fresh_session()
        r = client.post("/api/transition", params={"session": sid},
                        json={"from": "singapore", "to": "sydney"})
        key = r.json()["bundleKey"]
        asset = client.get(f"/api/assets/{key}")
        assert asset.status_code == 200
        assert asset.headers["cache-control"]
        doc = asset.json()
        assert doc["pair"] == ["singapore", "sydney"]
        assert doc["schemaVersion"] == 1

    def test_unknown_bundle_404(self, client):
        assert client.get("/api/assets/none--none--0000000000000000").status_code == 404
