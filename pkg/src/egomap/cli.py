"""Batch command line: validation, precomputation, stimulus rendering,
projection comparison, and serving.

Exit codes: 0 clean, 1 for violations or domain failures, 2 for I/O and
usage errors.
"""
from __future__ import annotations

import argparse
import json
import math
import random
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from itertools import combinations
from pathlib import Path

from .assets import AssetStore, build_bundle, bundle_key, compute_transition_geometry, frame_sections
from .config import AppConfig, ConfigError, PipelineConfig, load_config, with_overrides
from .features import FeatureError, FeatureSet, load_features
from .geodesy import (
    EARTH_RADIUS_KM,
    AntipodalPointsError,
    GeoCoord,
    GeodesyError,
    destination_point,
    geodesic_interpolate,
    great_circle_distance,
    initial_bearing,
)
from .graph import GeoGraph, GeoVertex, load_graph, validate_graph_document
from .layout import layout_frame
from .projection import MERCATOR, OutOfDomainError, PlanePoint, make_tpeqd, project
from .render import render_frame_svg
from .transitions import correct_azimuth_start_vs_mid

DISTANCE_BINS_KM = {1: (500.0, 3000.0), 2: (3000.0, 6000.0),
                    3: (6000.0, 9000.0), 4: (9000.0, 12000.0)}
SAMPLING_CAP = 100_000


# -- validate -----------------------------------------------------------------


def cmd_validate(args) -> int:
    violations: list[str] = []
    try:
        raw = Path(args.graph).read_text()
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        doc = json.loads(raw)
    except json.JSONDecodeError as exc:
        violations.append(f"{args.graph}: not valid JSON ({exc})")
    else:
        violations.extend(f"{args.graph}: {v}" for v in validate_graph_document(doc))

    for bpath in args.basemap:
        try:
            Path(bpath).stat()
        except OSError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2
        try:
            fs = load_features(bpath)
        except (FeatureError, ValueError) as exc:
            violations.append(f"{bpath}: {exc}")
            continue
        if fs.warnings:
            print(f"note: {bpath}: skipped {fs.warnings} unsupported geometries")

    for v in violations:
        print(v)
    if violations:
        print(f"{len(violations)} violation(s)")
        return 1
    print("ok")
    return 0


# -- precompute ---------------------------------------------------------------


def _load_basemaps(paths) -> FeatureSet:
    feats: list = []
    warnings = 0
    for p in paths:
        fs = load_features(p)
        feats.extend(fs.features)
        warnings += fs.warnings
    return FeatureSet(tuple(feats), warnings)


def _pipeline_config(args) -> PipelineConfig:
    if getattr(args, "config", None):
        return load_config(args.config).pipeline
    return PipelineConfig()


def cmd_precompute(args) -> int:
    try:
        graph = load_graph(args.graph)
        fs = _load_basemaps(args.basemap)
        cfg = _pipeline_config(args)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    if args.all_pairs:
        pairs = list(combinations(graph.vertex_ids, 2))
    else:
        pairs = graph.edges
    store = AssetStore(args.out)

    written: list[str] = []
    skipped: list[str] = []

    def one(pair: tuple[str, str]) -> None:
        a, b = sorted(pair)
        try:
            doc = build_bundle(graph, a, b, fs, cfg)
        except (AntipodalPointsError, GeodesyError) as exc:
            skipped.append(f"{a}--{b}: {exc}")
            return
        # geometry is direction-free, so derive the reverse doc for free
        store.write(bundle_key(a, b, cfg), doc)
        store.write(bundle_key(b, a, cfg),
                    {**doc, "from": b, "to": a, "direction": "reverse"})
        written.append(f"{a}--{b}")

    with ThreadPoolExecutor(max_workers=max(1, args.jobs)) as pool:
        list(pool.map(one, pairs))

    for note in sorted(skipped):
        print(f"skipped {note}")
    print(f"{len(written)} bundle(s) in {args.out}")
    return 0


# -- render-stimulus ----------------------------------------------------------


def _parse_coord(text: str) -> GeoCoord:
    parts = text.split(",")
    if len(parts) != 2:
        raise ValueError(f"expected lat,lon, got {text!r}")
    return GeoCoord(float(parts[0]), float(parts[1]))


def _sample_bin_pair(bin_id: int, seed: int) -> tuple[GeoCoord, GeoCoord]:
    """Uniform pairs on the sphere, rejected into the requested distance bin."""
    lo, hi = DISTANCE_BINS_KM[bin_id]
    rng = random.Random(seed)

    def point() -> GeoCoord:
        lat = math.degrees(math.asin(2.0 * rng.random() - 1.0))
        lon = rng.uniform(-180.0, 180.0)
        return GeoCoord(lat, lon)

    for _ in range(SAMPLING_CAP):
        a, b = point(), point()
        if lo <= great_circle_distance(a, b) <= hi:
            return a, b
    raise RuntimeError(f"no pair found in bin {bin_id} after {SAMPLING_CAP} draws")


def cmd_render_stimulus(args) -> int:
    if args.bin is not None:
        if args.from_ or args.to:
            print("error: --bin excludes --from/--to", file=sys.stderr)
            return 2
        try:
            a, b = _sample_bin_pair(args.bin, args.seed)
        except RuntimeError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 1
    else:
        if not (args.from_ and args.to):
            print("error: need either --bin or both --from and --to", file=sys.stderr)
            return 2
        try:
            a, b = _parse_coord(args.from_), _parse_coord(args.to)
        except ValueError as exc:
            print(f"error: invalid coordinate: {exc}", file=sys.stderr)
            return 2

    try:
        fs = _load_basemaps(args.basemap) if args.basemap else FeatureSet((), 0)
        cfg = _pipeline_config(args)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if args.fps:
        cfg = replace(cfg, transition=replace(cfg.transition, frame_rate=args.fps))

    graph = GeoGraph(
        [GeoVertex("start", "Start", a, {}), GeoVertex("target", "Target", b, {})],
        [("start", "target")],
    )
    try:
        tg = compute_transition_geometry(graph, "start", "target", fs, cfg,
                                         projection=args.projection)
    except (AntipodalPointsError, GeodesyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    plan = tg.plan
    sections = frame_sections(plan, tg.frame_list, cfg.morph_keyframes)
    out_dir = Path(args.out)
    frames_dir = out_dir / "frames"
    frames_dir.mkdir(parents=True, exist_ok=True)

    names = []
    for i, frame in enumerate(tg.frame_list):
        section, index = sections[i]
        geometry = tg.geometry_for(section, index)
        layout = layout_frame(frame, graph, [], focus_ids=("start", "target"))
        svg = render_frame_svg(frame.viewport, frame.spec.kind, geometry, layout,
                               screen_px=cfg.screen_px, with_labels=False)
        name = f"frames/frame_{i:04d}.svg"
        (out_dir / name).write_text(svg)
        names.append(name)

    if args.projection == "tpeqd" and not plan.spec_mid.is_azeqd:
        correction = correct_azimuth_start_vs_mid(plan.spec_mid)
    else:
        # a single-node plane (and the north-up Mercator) need no correction
        correction = 0.0
    meta = {
        "schemaVersion": 1,
        "projection": args.projection,
        "seed": args.seed,
        "bin": args.bin,
        "from": [a.lat, a.lon],
        "to": [b.lat, b.lon],
        "distanceKm": great_circle_distance(a, b),
        "azimuthDeg": initial_bearing(a, b),
        "azimuthCorrectionDeg": correction,
        "durationS": plan.total_duration_s,
        "frameRate": plan.frame_rate,
        "frameCount": len(names),
        "screenPx": cfg.screen_px,
        "frames": names,
    }
    (out_dir / "index.json").write_text(
        json.dumps(meta, sort_keys=True, separators=(",", ":")) + "\n"
    )
    print(f"{len(names)} frame(s) in {out_dir}")
    return 0


# -- baseline-compare ---------------------------------------------------------


def _tangent(images: list) -> tuple[float, float]:
    dx = images[1].x - images[0].x
    dy = images[1].y - images[0].y
    n = math.hypot(dx, dy)
    if n == 0.0:
        raise GeodesyError("degenerate tangent")
    return dx / n, dy / n


def baseline_deviation(a: GeoCoord, b: GeoCoord, radius_km: float,
                       samples: int = 25, offsets: int = 4,
                       screen_px: int = 1024, window_km: float = 200.0) -> dict:
    """Compare tpeqd and Mercator placement of points near the baseline.

    Both projections are read through a moving window anchored at the nearest
    baseline point, rotated so the baseline runs along +x and scaled to
    screen_px pixels per window_km. The deviation of a sample is the screen
    distance between its two window positions. On the baseline itself both
    windows agree exactly; off it, the projections' different distortions
    separate with distance.
    """
    base = {
        "from": [a.lat, a.lon], "to": [b.lat, b.lon],
        "radiusKm": radius_km, "screenPx": screen_px, "windowKm": window_km,
    }
    if (a.lat, a.lon) == (b.lat, b.lon):
        return {**base, "degenerate": True, "samples": 0,
                "maxDeviationPx": 0.0, "meanDeviationPx": 0.0}

    spec = make_tpeqd(a, b)
    px_per_km = screen_px / window_km
    ds = 1e-4
    deviations: list[float] = []
    skipped = 0

    radii = [0.0]
    if radius_km > 0.0:
        radii = [radius_km * j / offsets for j in range(-offsets, offsets + 1)]

    for k in range(samples):
        s = k / (samples - 1) if samples > 1 else 0.5
        s0, s1 = max(0.0, s - ds), min(1.0, s + ds)
        g = geodesic_interpolate(a, b, s)
        g0, g1 = geodesic_interpolate(a, b, s0), geodesic_interpolate(a, b, s1)

        t_t = _tangent([project(spec, g0), project(spec, g1)])
        try:
            # Mercator y grows southward; flip into the plane's handedness
            m0, m1, m_g = (project(MERCATOR, q) for q in (g0, g1, g))
            t_m = _tangent([PlanePoint(m0.x, -m0.y), PlanePoint(m1.x, -m1.y)])
        except OutOfDomainError:
            skipped += 1
            continue
        q_g = project(spec, g)
        km_per_unit = math.cos(math.radians(g.lat)) * 2.0 * math.pi * EARTH_RADIUS_KM
        normal = initial_bearing(g, g1 if s1 > s else g0) + (90.0 if s1 > s else -90.0)

        for r in radii:
            if r == 0.0:
                p = g
            else:
                p = destination_point(g, normal if r > 0 else normal + 180.0, abs(r))
            v_t = project(spec, p) - q_g
            along_t = v_t.x * t_t[0] + v_t.y * t_t[1]
            across_t = v_t.x * -t_t[1] + v_t.y * t_t[0]
            try:
                m_p = project(MERCATOR, p)
            except OutOfDomainError:
                skipped += 1
                continue
            v_m = PlanePoint(m_p.x - m_g.x, -(m_p.y - m_g.y))
            along_m = (v_m.x * t_m[0] + v_m.y * t_m[1]) * km_per_unit
            across_m = (v_m.x * -t_m[1] + v_m.y * t_m[0]) * km_per_unit
            deviations.append(
                math.hypot(along_t - along_m, across_t - across_m) * px_per_km
            )

    if not deviations:
        return {**base, "degenerate": True, "samples": 0, "skipped": skipped,
                "maxDeviationPx": 0.0, "meanDeviationPx": 0.0}
    return {
        **base,
        "degenerate": False,
        "samples": len(deviations),
        "skipped": skipped,
        "maxDeviationPx": max(deviations),
        "meanDeviationPx": sum(deviations) / len(deviations),
    }


def cmd_baseline_compare(args) -> int:
    try:
        a, b = _parse_coord(args.from_), _parse_coord(args.to)
    except ValueError as exc:
        print(f"error: invalid coordinate: {exc}", file=sys.stderr)
        return 2
    try:
        report = baseline_deviation(a, b, args.radius_km, samples=args.samples,
                                    screen_px=args.screen_px, window_km=args.window_km)
    except (AntipodalPointsError, GeodesyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(json.dumps(report, indent=2, sort_keys=True))
    return 0


# -- serve ---------------------------------------------------------------------


def cmd_serve(args) -> int:
    try:
        cfg = load_config(args.config)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    overrides = {}
    if args.host:
        overrides["listen_host"] = args.host
    if args.port:
        overrides["listen_port"] = args.port
    if overrides:
        cfg = with_overrides(cfg, **overrides)

    from fastapi import HTTPException

    from .service import create_app

    app = create_app(cfg)
    try:
        app.state.egomap.ensure_loaded()  # fail fast before binding the port
    except HTTPException as exc:
        print(f"error: {exc.detail}", file=sys.stderr)
        return 2
    import uvicorn

    uvicorn.run(app, host=cfg.listen_host, port=cfg.listen_port)
    return 0


# -- parser ---------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="egomap",
                                 description="geo-graph explorer batch tools")
    sub = ap.add_subparsers(dest="command", required=True)

    v = sub.add_parser("validate", help="check a graph and basemaps for violations")
    v.add_argument("graph")
    v.add_argument("--basemap", action="append", default=[])
    v.set_defaults(fn=cmd_validate)

    p = sub.add_parser("precompute", help="build transition asset bundles")
    p.add_argument("graph")
    p.add_argument("--basemap", action="append", default=[])
    p.add_argument("--out", required=True)
    p.add_argument("--all-pairs", action="store_true",
                   help="every unordered vertex pair, not just edges")
    p.add_argument("--config", help="service config supplying pipeline settings")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(fn=cmd_precompute)

    r = sub.add_parser("render-stimulus", help="render one transition to SVG frames")
    r.add_argument("--projection", required=True, choices=["mercator", "tpeqd", "azeqd"])
    r.add_argument("--bin", type=int, choices=[1, 2, 3, 4])
    r.add_argument("--from", dest="from_", metavar="LAT,LON")
    r.add_argument("--to", metavar="LAT,LON")
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--out", required=True)
    r.add_argument("--basemap", action="append", default=[])
    r.add_argument("--config", help="service config supplying pipeline settings")
    r.add_argument("--fps", type=float, default=None)
    r.set_defaults(fn=cmd_render_stimulus)

    c = sub.add_parser("baseline-compare",
                       help="tpeqd vs Mercator deviation near a baseline")
    c.add_argument("--from", dest="from_", required=True, metavar="LAT,LON")
    c.add_argument("--to", required=True, metavar="LAT,LON")
    c.add_argument("--radius-km", type=float, default=0.0)
    c.add_argument("--samples", type=int, default=25)
    c.add_argument("--screen-px", type=int, default=1024)
    c.add_argument("--window-km", type=float, default=200.0)
    c.set_defaults(fn=cmd_baseline_compare)

    s = sub.add_parser("serve", help="run the explorer service")
    s.add_argument("config")
    s.add_argument("--host")
    s.add_argument("--port", type=int)
    s.set_defaults(fn=cmd_serve)

    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
