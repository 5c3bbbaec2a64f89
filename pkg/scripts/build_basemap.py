#!/usr/bin/env python3
"""Convert world-atlas TopoJSON into the basemap GeoJSON shipped in data/.

The source files come from the `world-atlas` npm package (Natural Earth
1:110m, public domain):

    npm pack world-atlas@2
    tar xzf world-atlas-2.0.2.tgz package/countries-110m.json package/land-110m.json

Layers written:
    land        one polygon feature per land ring
    coastline   land boundary arcs as lines
    countries   interior country borders (arcs shared by two countries)

Usage:
    python3 scripts/build_basemap.py --land package/land-110m.json \
        --countries package/countries-110m.json --out data/ne_110m_basemap.geojson
"""
import argparse
import json
from pathlib import Path


def decode_arcs(topo: dict) -> list[list[tuple[float, float]]]:
    sx, sy = topo["transform"]["scale"]
    tx, ty = topo["transform"]["translate"]
    out = []
    for arc in topo["arcs"]:
        x = y = 0
        pts = []
        for dx, dy in arc:
            x += dx
            y += dy
            pts.append((round(x * sx + tx, 6), round(y * sy + ty, 6)))
        out.append(pts)
    return out


def assemble_ring(arc_idxs: list[int], arcs) -> list[tuple[float, float]]:
    pts: list[tuple[float, float]] = []
    for i in arc_idxs:
        seg = arcs[i] if i >= 0 else arcs[~i][::-1]
        if pts and pts[-1] == seg[0]:
            pts.extend(seg[1:])
        else:
            pts.extend(seg)
    return pts


def polygon_arc_lists(geom: dict):
    if geom["type"] == "Polygon":
        yield from geom["arcs"]
    elif geom["type"] == "MultiPolygon":
        for poly in geom["arcs"]:
            yield from poly


def feature(layer: str, kind: str, coords, **props) -> dict:
    return {
        "type": "Feature",
        "properties": {"layer": layer, **props},
        "geometry": {"type": kind, "coordinates": coords},
    }


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--land", required=True, type=Path)
    ap.add_argument("--countries", required=True, type=Path)
    ap.add_argument("--out", required=True, type=Path)
    args = ap.parse_args()

    land_topo = json.loads(args.land.read_text())
    land_arcs = decode_arcs(land_topo)
    features = []
    for geom in land_topo["objects"]["land"]["geometries"]:
        for ring_idxs in polygon_arc_lists(geom):
            ring = assemble_ring(ring_idxs, land_arcs)
            if len(ring) >= 4:
                features.append(feature("land", "Polygon", [ring]))
    # at 110m the land boundary is the coastline
    for pts in land_arcs:
        if len(pts) >= 2:
            features.append(feature("coastline", "LineString", pts))

    countries_topo = json.loads(args.countries.read_text())
    country_arcs = decode_arcs(countries_topo)
    use_count = [0] * len(country_arcs)
    for geom in countries_topo["objects"]["countries"]["geometries"]:
        if geom.get("type") not in ("Polygon", "MultiPolygon"):
            continue
        for ring_idxs in polygon_arc_lists(geom):
            for i in ring_idxs:
                use_count[i if i >= 0 else ~i] += 1
    for idx, pts in enumerate(country_arcs):
        if use_count[idx] >= 2 and len(pts) >= 2:
            features.append(feature("countries", "LineString", pts))

    doc = {"type": "FeatureCollection", "features": features}
    args.out.parent.mkdir(parents=True, exist_ok=True)
    args.out.write_text(json.dumps(doc, separators=(",", ":")) + "\n")
    print(f"{args.out}: {len(features)} features")


if __name__ == "__main__":
    main()
