import json

import pytest

from egomap.config import ConfigError, PipelineConfig, load_config, with_overrides
from egomap.doi import default_config
from egomap.transitions import TransitionConfig


class TestPipelineConfig:
    def test_defaults(self):
        cfg = PipelineConfig()
        assert cfg.tolerance_px == 0.5
        assert cfg.screen_px == 1024
        assert cfg.tile_px == 256
        assert cfg.z_max == 19
        assert cfg.morph_keyframes == 5
        assert cfg.transition == TransitionConfig()

    def test_tolerance_plane_scales_with_viewport_width(self):
        cfg = PipelineConfig(tolerance_px=2.0, screen_px=1000)
        # 2 px out of 1000 px across a 500-unit window is one plane unit
        assert cfg.tolerance_plane(500.0) == pytest.approx(1.0)

    def test_rejects_bad_values(self):
        with pytest.raises(ConfigError):
            PipelineConfig(tolerance_px=-0.1)
        with pytest.raises(ConfigError):
            PipelineConfig(screen_px=0)
        with pytest.raises(ConfigError):
            PipelineConfig(morph_keyframes=1)
        with pytest.raises(ConfigError):
            PipelineConfig(z_max=-1)


def write_config(tmp_path, doc):
    path = tmp_path / "app.json"
    path.write_text(json.dumps(doc))
    return path


class TestLoadConfig:
    def test_minimal(self, tmp_path):
        path = write_config(tmp_path, {"graphPath": "graph.json"})
        cfg = load_config(path)
        assert cfg.graph_path == str(tmp_path / "graph.json")
        assert cfg.basemap_paths == ()
        assert cfg.listen_port == 8000
        assert cfg.pipeline == PipelineConfig()
        assert cfg.doi == default_config()

    def test_full_round_trip(self, tmp_path):
        doc = {
            "graphPath": "data/g.json",
            "basemapPaths": ["data/a.geojson", "/abs/b.geojson"],
            "tileUrlTemplate": "https://tiles.example/{z}/{x}/{y}.png",
            "assetsDir": "cache",
            "staticDir": "www",
            "listenHost": "0.0.0.0",
            "listenPort": 9001,
            "pipeline": {
                "tolerancePx": 1.0,
                "screenPx": 512,
                "tilePx": 512,
                "zMax": 10,
                "morphKeyframes": 3,
                "transition": {
                    "rho": 1.2,
                    "animationSpeed": 2.0,
                    "morphDurationS": 0.5,
                    "frameRate": 60.0,
                    "vertexWidthKm": 100.0,
                    "viewPadding": 1.5,
                    "aspect": 0.75,
                },
            },
            "doi": {
                "components": [
                    {"function": "geo_distance", "weight": 1.0, "params": {"halfLifeKm": 500.0}}
                ],
                "threshold": 0.25,
                "maxProxies": 4,
            },
        }
        cfg = load_config(write_config(tmp_path, doc))
        assert cfg.graph_path == str(tmp_path / "data" / "g.json")
        assert cfg.basemap_paths[0] == str(tmp_path / "data" / "a.geojson")
        assert cfg.basemap_paths[1] == "/abs/b.geojson"  # absolute stays put
        assert cfg.tile_url_template == "https://tiles.example/{z}/{x}/{y}.png"
        assert cfg.assets_dir == str(tmp_path / "cache")
        assert cfg.static_dir == str(tmp_path / "www")
        assert cfg.listen_host == "0.0.0.0"
        assert cfg.listen_port == 9001
        assert cfg.pipeline.tolerance_px == 1.0
        assert cfg.pipeline.morph_keyframes == 3
        assert cfg.pipeline.transition.rho == 1.2
        assert cfg.pipeline.transition.frame_rate == 60.0
        assert cfg.doi.threshold == 0.25
        assert cfg.doi.max_proxies == 4

    def test_graph_path_required(self, tmp_path):
        with pytest.raises(ConfigError, match="graphPath"):
            load_config(write_config(tmp_path, {}))

    def test_unknown_top_level_key_rejected(self, tmp_path):
        path = write_config(tmp_path, {"graphPath": "g.json", "grphPath": 1})
        with pytest.raises(ConfigError, match="grphPath"):
            load_config(path)

    def test_unknown_pipeline_key_rejected(self, tmp_path):
        doc = {"graphPath": "g.json", "pipeline": {"tolerancePix": 1.0}}
        with pytest.raises(ConfigError, match="tolerancePix"):
            load_config(write_config(tmp_path, doc))

    def test_unknown_transition_key_rejected(self, tmp_path):
        doc = {"graphPath": "g.json", "pipeline": {"transition": {"rh": 1.1}}}
        with pytest.raises(ConfigError, match="rh"):
            load_config(write_config(tmp_path, doc))

    def test_invalid_json_rejected(self, tmp_path):
        path = tmp_path / "app.json"
        path.write_text("{nope")
        with pytest.raises(ConfigError):
            load_config(path)

    def test_non_object_rejected(self, tmp_path):
        path = tmp_path / "app.json"
        path.write_text("[1, 2]")
        with pytest.raises(ConfigError):
            load_config(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError):
            load_config(tmp_path / "absent.json")


class TestOverrides:
    def test_with_overrides_replaces_fields(self, tmp_path):
        path = write_config(tmp_path, {"graphPath": "g.json"})
        cfg = load_config(path)
        out = with_overrides(cfg, listen_port=8081)
        assert out.listen_port == 8081
        assert out.graph_path == cfg.graph_path
        assert cfg.listen_port == 8000  # original untouched

    def test_unknown_override_rejected(self, tmp_path):
        cfg = load_config(write_config(tmp_path, {"graphPath": "g.json"}))
        with pytest.raises(TypeError):
            with_overrides(cfg, listen_prot=1)
