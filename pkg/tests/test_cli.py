"""Command line behavior: exit codes, outputs, determinism."""
import json
import math
from pathlib import Path

import pytest

from egomap.cli import DISTANCE_BINS_KM, baseline_deviation, main
from egomap.geodesy import EARTH_RADIUS_KM, GeoCoord, great_circle_distance


def write_graph(path: Path, vertices, edges) -> Path:
    path.write_text(json.dumps({
        "schemaVersion": 1,
        "vertices": [
            {"id": vid, "name": vid.title(), "lat": lat, "lon": lon, "attributes": {}}
            for vid, lat, lon in vertices
        ],
        "edges": [list(e) for e in edges],
    }))
    return path


CHAIN = [("a", 10.0, 0.0), ("b", 20.0, 10.0), ("c", 30.0, 20.0),
         ("d", 40.0, 30.0), ("e", 50.0, 40.0)]
CHAIN_EDGES = [("a", "b"), ("b", "c"), ("c", "d"), ("d", "e")]


class TestValidate:
    def test_clean_graph(self, tmp_path, capsys):
        g = write_graph(tmp_path / "g.json", CHAIN, CHAIN_EDGES)
        assert main(["validate", str(g)]) == 0
        assert capsys.readouterr().out.strip() == "ok"

    def test_missing_file_is_io_error(self, tmp_path):
        assert main(["validate", str(tmp_path / "absent.json")]) == 2

    def test_unparseable_json(self, tmp_path, capsys):
        p = tmp_path / "g.json"
        p.write_text("{not json")
        assert main(["validate", str(p)]) == 1
        assert "not valid JSON" in capsys.readouterr().out

    def test_dangling_edge_named(self, tmp_path, capsys):
        g = write_graph(tmp_path / "g.json", CHAIN, [("a", "zz")])
        assert main(["validate", str(g)]) == 1
        out = capsys.readouterr().out
        assert "'zz'" in out and "unknown vertex" in out

    def test_invalid_coordinate_named(self, tmp_path, capsys):
        g = write_graph(tmp_path / "g.json", [("p", 95.0, 0.0)], [])
        assert main(["validate", str(g)]) == 1
        assert "'p'" in capsys.readouterr().out

    def test_missing_basemap_is_io_error(self, tmp_path):
        g = write_graph(tmp_path / "g.json", CHAIN, CHAIN_EDGES)
        rc = main(["validate", str(g), "--basemap", str(tmp_path / "nope.geojson")])
        assert rc == 2

    def test_broken_basemap_is_violation(self, tmp_path, capsys):
        g = write_graph(tmp_path / "g.json", CHAIN, CHAIN_EDGES)
        bad = tmp_path / "b.geojson"
        bad.write_text('{"type": "Topology"}')
        assert main(["validate", str(g), "--basemap", str(bad)]) == 1
        assert "b.geojson" in capsys.readouterr().out


@pytest.fixture(scope="module")
def chain_graph(tmp_path_factory):
    return write_graph(tmp_path_factory.mktemp("g") / "chain.json",
                       CHAIN, CHAIN_EDGES)


class TestPrecompute:
    def test_edges_by_default_both_directions(self, chain_graph, tmp_path, capsys):
        out = tmp_path / "bundles"
        assert main(["precompute", str(chain_graph), "--out", str(out)]) == 0
        files = sorted(p.name for p in out.glob("*.json"))
        assert len(files) == 8  # 4 edges, forward and reverse keys
        assert any(f.startswith("a--b--") for f in files)
        assert any(f.startswith("b--a--") for f in files)
        assert "4 bundle(s)" in capsys.readouterr().out

    def test_all_pairs(self, chain_graph, tmp_path):
        out = tmp_path / "bundles"
        rc = main(["precompute", str(chain_graph), "--out", str(out),
                   "--all-pairs", "--jobs", "4"])
        assert rc == 0
        assert len(list(out.glob("*.json"))) == 20  # C(5,2) pairs, both directions

    def test_rerun_rewrites_nothing(self, chain_graph, tmp_path):
        out = tmp_path / "bundles"
        main(["precompute", str(chain_graph), "--out", str(out)])
        stamps = {p.name: p.stat().st_mtime_ns for p in out.glob("*.json")}
        main(["precompute", str(chain_graph), "--out", str(out)])
        assert {p.name: p.stat().st_mtime_ns for p in out.glob("*.json")} == stamps

    def test_antipodal_pair_skipped(self, tmp_path, capsys):
        g = write_graph(tmp_path / "g.json",
                        [("p", 0.0, 0.0), ("q", 0.0, 180.0), ("r", 10.0, 20.0)],
                        [("p", "q"), ("p", "r")])
        out = tmp_path / "bundles"
        assert main(["precompute", str(g), "--out", str(out)]) == 0
        text = capsys.readouterr().out
        assert "skipped p--q" in text
        assert "1 bundle(s)" in text
        assert len(list(out.glob("*.json"))) == 2

    def test_missing_graph_is_io_error(self, tmp_path):
        rc = main(["precompute", str(tmp_path / "absent.json"),
                   "--out", str(tmp_path / "o")])
        assert rc == 2


def read_index(out_dir: Path) -> dict:
    return json.loads((out_dir / "index.json").read_text())


def stimulus(tmp_path, *args):
    out = tmp_path / "stim"
    rc = main(["render-stimulus", "--out", str(out), "--fps", "2", *args])
    return rc, out


class TestRenderStimulus:
    def test_explicit_pair_equator(self, tmp_path):
        rc, out = stimulus(tmp_path, "--projection", "tpeqd",
                           "--from", "0,0", "--to", "0,45")
        assert rc == 0
        meta = read_index(out)
        assert meta["azimuthDeg"] == pytest.approx(90.0, abs=1e-9)
        assert meta["distanceKm"] == pytest.approx(
            EARTH_RADIUS_KM * math.pi / 4.0, rel=1e-12)
        assert meta["frameCount"] == len(meta["frames"])
        assert all((out / name).exists() for name in meta["frames"])
        assert (out / meta["frames"][0]).read_text().startswith("<svg")

    def test_seeded_bin_is_deterministic(self, tmp_path):
        rc1, out1 = stimulus(tmp_path / "x", "--projection", "mercator",
                             "--bin", "1", "--seed", "11")
        rc2, out2 = stimulus(tmp_path / "y", "--projection", "mercator",
                             "--bin", "1", "--seed", "11")
        assert rc1 == rc2 == 0
        assert (out1 / "index.json").read_bytes() == (out2 / "index.json").read_bytes()
        meta = read_index(out1)
        for name in meta["frames"]:
            assert (out1 / name).read_bytes() == (out2 / name).read_bytes()

    def test_bin_distance_contained(self, tmp_path):
        rc, out = stimulus(tmp_path, "--projection", "tpeqd",
                           "--bin", "3", "--seed", "5")
        assert rc == 0
        meta = read_index(out)
        lo, hi = DISTANCE_BINS_KM[3]
        assert lo <= meta["distanceKm"] <= hi
        a, b = meta["from"], meta["to"]
        assert meta["distanceKm"] == pytest.approx(
            great_circle_distance(GeoCoord(*a), GeoCoord(*b)), rel=1e-12)

    def test_azeqd_has_no_correction(self, tmp_path):
        rc, out = stimulus(tmp_path, "--projection", "azeqd",
                           "--from", "52.517,13.389", "--to", "35.7,139.767")
        assert rc == 0
        meta = read_index(out)
        assert meta["projection"] == "azeqd"
        assert meta["azimuthCorrectionDeg"] == 0.0

    def test_tpeqd_correction_matches_known_pair(self, tmp_path):
        rc, out = stimulus(tmp_path, "--projection", "tpeqd",
                           "--from", "52.517,13.389", "--to", "35.7,139.767")
        assert rc == 0
        meta = read_index(out)
        assert meta["azimuthCorrectionDeg"] == pytest.approx(
            72.31839483025004, abs=1e-9)

    def test_bin_and_pair_exclusive(self, tmp_path):
        rc, _ = stimulus(tmp_path, "--projection", "tpeqd",
                         "--bin", "1", "--from", "0,0")
        assert rc == 2

    def test_pair_requires_both_ends(self, tmp_path):
        rc, _ = stimulus(tmp_path, "--projection", "tpeqd", "--from", "0,0")
        assert rc == 2

    def test_invalid_coordinate(self, tmp_path):
        rc, _ = stimulus(tmp_path, "--projection", "tpeqd",
                         "--from", "95,0", "--to", "0,45")
        assert rc == 2
        rc, _ = stimulus(tmp_path, "--projection", "tpeqd",
                         "--from", "zero,0", "--to", "0,45")
        assert rc == 2

    def test_unsamplable_bin_fails_cleanly(self, tmp_path, monkeypatch, capsys):
        monkeypatch.setitem(DISTANCE_BINS_KM, 4, (1.0, 1.001))
        monkeypatch.setattr("egomap.cli.SAMPLING_CAP", 200)
        rc, _ = stimulus(tmp_path, "--projection", "tpeqd", "--bin", "4")
        assert rc == 1
        assert "no pair found" in capsys.readouterr().err


class TestBaselineCompare:
    def run(self, capsys, *args):
        rc = main(["baseline-compare", *args])
        return rc, json.loads(capsys.readouterr().out) if rc == 0 else None

    def test_zero_radius_zero_deviation(self, capsys):
        rc, report = self.run(capsys, "--from", "40,-74", "--to", "48,2",
                              "--radius-km", "0")
        assert rc == 0
        assert report["maxDeviationPx"] == 0.0
        assert report["meanDeviationPx"] == 0.0

    def test_same_point_degenerate(self, capsys):
        rc, report = self.run(capsys, "--from", "10,10", "--to", "10,10",
                              "--radius-km", "100")
        assert rc == 0
        assert report["degenerate"] is True
        assert report["maxDeviationPx"] == 0.0

    def test_deviation_monotone_in_radius(self):
        a, b = GeoCoord(40.0, -74.0), GeoCoord(48.0, 2.0)
        devs = [baseline_deviation(a, b, r)["maxDeviationPx"]
                for r in (0.0, 25.0, 100.0, 400.0)]
        assert devs == sorted(devs)
        assert devs[0] == 0.0 and devs[-1] > devs[1] > 0.0

    def test_report_shape(self, capsys):
        rc, report = self.run(capsys, "--from", "52.517,13.389",
                              "--to", "35.7,139.767", "--radius-km", "50")
        assert rc == 0
        for key in ("from", "to", "radiusKm", "screenPx", "windowKm",
                    "samples", "maxDeviationPx", "meanDeviationPx"):
            assert key in report
        assert report["samples"] > 0
        assert report["maxDeviationPx"] >= report["meanDeviationPx"] > 0.0

    def test_invalid_coordinate(self, capsys):
        assert main(["baseline-compare", "--from", "x,0", "--to", "0,1"]) == 2


class TestServeConfigErrors:
    def test_missing_config_file(self, tmp_path):
        assert main(["serve", str(tmp_path / "absent.json")]) == 2

    def test_bad_data_fails_before_serving(self, tmp_path):
        cfg = tmp_path / "app.json"
        cfg.write_text(json.dumps({"graphPath": "no-such-graph.json"}))
        assert main(["serve", str(cfg)]) == 2
