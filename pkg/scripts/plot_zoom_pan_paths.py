"""Plot camera width and pan position over path time for a few hop lengths.

Produces one figure with w(s) (log scale) and u(s) panels, marking the widest
point of each path. Handy for eyeballing how rho shapes the flight arc.
"""
import argparse
import math
import sys
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from egomap.projection import PlanePoint
from egomap.transitions import Viewport, plan_zoom_pan, sample_zoom_pan, widest_sample

DISTANCES_KM = (500, 1000, 3000, 8000, 12000)


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--rho", type=float, default=1.4)
    ap.add_argument("--width-km", type=float, default=200.0,
                    help="camera width at both endpoints")
    ap.add_argument("--out", default="zoom_pan_paths.png")
    args = ap.parse_args()

    fig, (ax_w, ax_u) = plt.subplots(2, 1, figsize=(7, 7), sharex=False)
    for d in DISTANCES_KM:
        start = Viewport(PlanePoint(0.0, 0.0), args.width_km)
        end = Viewport(PlanePoint(float(d), 0.0), args.width_km)
        path = plan_zoom_pan(start, end, args.rho)
        ss = [path.s_total * i / 400 for i in range(401)]
        vps = [sample_zoom_pan(path, s) for s in ss]
        label = f"{d} km (S={path.s_total:.2f})"
        ax_w.plot(ss, [vp.width for vp in vps], label=label)
        ax_u.plot(ss, [vp.center.x for vp in vps], label=label)
        s_top = widest_sample(path)
        ax_w.plot([s_top], [sample_zoom_pan(path, s_top).width], "k.", ms=6)

    ax_w.set_yscale("log")
    ax_w.set_ylabel("camera width (km)")
    ax_w.set_xlabel("path position s")
    ax_w.legend(fontsize=8)
    ax_u.set_ylabel("pan position (km)")
    ax_u.set_xlabel("path position s")
    fig.suptitle(f"zoom-and-pan paths, rho={args.rho}")
    fig.tight_layout()
    fig.savefig(args.out, dpi=150)
    print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
