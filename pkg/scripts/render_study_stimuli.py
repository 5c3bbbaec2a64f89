"""Render the full stimulus matrix: every distance bin under every projection.

Writes out_dir/<projection>/bin<k>_seed<seed>/ directories, each holding the
frame SVGs plus index.json, by driving the render-stimulus subcommand. With
the shipped 1:110m basemap this takes a few minutes at 30 fps; use --fps to
iterate faster.
"""
import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from egomap.cli import DISTANCE_BINS_KM, main as egomap_main

PROJECTIONS = ("mercator", "tpeqd", "azeqd")


def run(out_dir: Path, basemap: str, seeds: list[int], fps: float | None) -> int:
    failures = 0
    for projection in PROJECTIONS:
        for bin_id in DISTANCE_BINS_KM:
            for seed in seeds:
                dest = out_dir / projection / f"bin{bin_id}_seed{seed}"
                argv = ["render-stimulus", "--projection", projection,
                        "--bin", str(bin_id), "--seed", str(seed),
                        "--out", str(dest), "--basemap", basemap]
                if fps:
                    argv += ["--fps", str(fps)]
                rc = egomap_main(argv)
                if rc != 0:
                    print(f"failed: {projection} bin {bin_id} seed {seed} (rc {rc})")
                    failures += 1
    return failures


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="stimuli")
    ap.add_argument("--basemap", default="data/ne_110m_basemap.geojson")
    ap.add_argument("--seeds", type=int, nargs="+", default=[0])
    ap.add_argument("--fps", type=float, default=None)
    args = ap.parse_args()
    sys.exit(1 if run(Path(args.out), args.basemap, args.seeds, args.fps) else 0)
