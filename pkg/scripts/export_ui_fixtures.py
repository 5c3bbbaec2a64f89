"""Capture service responses into JSON fixtures for the browser UI tests.

Runs the service in-process against the fixture graph and basemap, walks the
endpoints a UI session would hit (graph, static view, transition, one frame
per phase, session), and writes each body under frontend/tests/fixtures/.
Re-run after changing the service wire format and commit the diff.
"""
import json
import sys
import warnings
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))

warnings.filterwarnings("ignore", message="Using `httpx`")

from fastapi.testclient import TestClient

from egomap.config import AppConfig, PipelineConfig
from egomap.service import create_app
from egomap.transitions import TransitionConfig


def dump(path: Path, doc) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    print(f"wrote {path.relative_to(ROOT)}")


def main() -> int:
    import tempfile

    out = ROOT / "frontend" / "tests" / "fixtures"
    with tempfile.TemporaryDirectory() as assets:
        cfg = AppConfig(
            graph_path=str(ROOT / "data" / "fixture_graph.json"),
            basemap_paths=(str(ROOT / "data" / "fixture_basemap.geojson"),),
            assets_dir=assets,
            pipeline=PipelineConfig(
                transition=TransitionConfig(frame_rate=10.0), morph_keyframes=3
            ),
        )
        with TestClient(create_app(cfg)) as client:
            dump(out / "graph.json", client.get("/api/graph").json())
            dump(out / "view_berlin.json",
                 client.get("/api/view?vertex=berlin").json())

            r = client.post("/api/transition",
                            json={"from": "berlin", "to": "tokyo"})
            tr = r.json()
            dump(out / "transition.json", tr)

            duration = tr["durationS"]
            for name, t in (("frame_first", 0.0),
                            ("frame_mid", duration / 2.0),
                            ("frame_last", duration)):
                frame = client.get(
                    f"/api/transition/{tr['id']}/frame", params={"t": t}
                ).json()
                dump(out / f"{name}.json", frame)

            bundle = client.get(f"/api/assets/{tr['bundleKey']}").json()
            # keyframe geometry dominates the payload; UI tests only need shape
            for section in ("morphIn", "morphOut"):
                for kf in bundle[section]:
                    kf["geometry"]["layers"] = kf["geometry"]["layers"][:1]
            bundle["zoom"]["geometry"]["layers"] = \
                bundle["zoom"]["geometry"]["layers"][:1]
            dump(out / "bundle.json", bundle)

            dump(out / "view_tokyo.json",
                 client.get("/api/view?vertex=tokyo").json())
            dump(out / "session.json", client.get("/api/session").json())
    return 0


if __name__ == "__main__":
    sys.exit(main())
