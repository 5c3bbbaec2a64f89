"""Vector rendering of frames: basemap geometry plus layout widgets to SVG.

One frame becomes one self-contained SVG document. The plane-to-screen
transform flips y for the kilometre-based projections (plane y grows north)
but not for Mercator (plane y already grows south).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .features import ProjectedGeometry
from .layout import FrameLayout
from .projection import PlanePoint
from .transitions import Viewport

LAYER_STYLES = {
    "land": ("#e8e4d6", None),
    "coastline": (None, "#54778f"),
    "countries": (None, "#b9ada3"),
    "graticule": (None, "#d4dde6"),
}
DEFAULT_POLYGON_FILL = "#e0e0da"
DEFAULT_LINE_STROKE = "#8a8a8a"
POINT_FILL = "#b5543c"
BACKGROUND = "#f2f7fa"


@dataclass(frozen=True)
class Transform:
    viewport: Viewport
    flip_y: bool
    width_px: float
    height_px: float

    def __call__(self, p: PlanePoint) -> tuple[float, float]:
        vp = self.viewport
        sx = (p.x - (vp.center.x - vp.width / 2.0)) / vp.width * self.width_px
        if self.flip_y:
            sy = ((vp.center.y + vp.height / 2.0) - p.y) / vp.height * self.height_px
        else:
            sy = (p.y - (vp.center.y - vp.height / 2.0)) / vp.height * self.height_px
        return sx, sy


def make_transform(viewport: Viewport, kind: str, screen_px: int) -> Transform:
    return Transform(
        viewport=viewport,
        flip_y=kind != "mercator",
        width_px=float(screen_px),
        height_px=float(screen_px) * viewport.aspect,
    )


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def _path_d(points, tr: Transform, close: bool) -> str:
    cmds = []
    for i, p in enumerate(points):
        x, y = tr(p)
        cmds.append(f"{'M' if i == 0 else 'L'}{_fmt(x)} {_fmt(y)}")
    if close:
        cmds.append("Z")
    return "".join(cmds)


def _geometry_svg(geometry: ProjectedGeometry, tr: Transform) -> list[str]:
    out = []
    for layer in geometry.layers:
        fill, stroke = LAYER_STYLES.get(layer.name, (None, None))
        poly_fill = fill or DEFAULT_POLYGON_FILL
        line_stroke = stroke or DEFAULT_LINE_STROKE
        parts = [f'<g id="layer-{layer.name}">']
        for ring in layer.polygons:
            parts.append(
                f'<path d="{_path_d(ring, tr, close=True)}" fill="{poly_fill}" stroke="none"/>'
            )
        for line in layer.lines:
            parts.append(
                f'<path d="{_path_d(line, tr, close=False)}" fill="none" '
                f'stroke="{line_stroke}" stroke-width="1"/>'
            )
        for p in layer.points:
            x, y = tr(p)
            parts.append(f'<circle cx="{_fmt(x)}" cy="{_fmt(y)}" r="2.5" fill="{POINT_FILL}"/>')
        parts.append("</g>")
        out.extend(parts)
    return out


def _layout_svg(layout: FrameLayout, tr: Transform, with_labels: bool) -> list[str]:
    out = ['<g id="layout">']
    positions = {v.vertex: tr(v.pos) for v in layout.on_screen}
    for a, b in layout.explicit_edges:
        (x1, y1), (x2, y2) = positions[a], positions[b]
        out.append(
            f'<line x1="{_fmt(x1)}" y1="{_fmt(y1)}" x2="{_fmt(x2)}" y2="{_fmt(y2)}" '
            f'stroke="#44618c" stroke-width="1.5"/>'
        )
    for v in layout.on_screen:
        x, y = positions[v.vertex]
        r = 4.0 + 4.0 * v.score
        out.append(f'<circle cx="{_fmt(x)}" cy="{_fmt(y)}" r="{_fmt(r)}" '
                   f'fill="#2a4d7d" stroke="#ffffff" stroke-width="1.5"/>')
        if with_labels:
            out.append(f'<text x="{_fmt(x + r + 3)}" y="{_fmt(y + 4)}" '
                       f'font-size="12" fill="#22303c">{v.vertex}</text>')
    for proxy in layout.proxies:
        x, y = tr(proxy.anchor)
        out.append(f'<g class="proxy" transform="translate({_fmt(x)} {_fmt(y)})">')
        out.append('<circle r="14" fill="#ffffff" stroke="#2a4d7d" stroke-width="2"/>')
        deg = math.degrees(proxy.direction_rad)
        out.append(f'<path d="M0 -14L4 -8L-4 -8Z" fill="#2a4d7d" '
                   f'transform="rotate({_fmt(deg)})"/>')
        count = len(proxy.vertices)
        label = proxy.vertices[0] if count == 1 else str(count)
        out.append(f'<text y="4" font-size="10" text-anchor="middle" '
                   f'fill="#22303c">{label}</text>')
        out.append("</g>")
    out.append("</g>")
    return out


def _north_arrow_svg(angle_rad: float, width_px: float) -> list[str]:
    deg = math.degrees(angle_rad)
    cx, cy = width_px - 28.0, 28.0
    return [
        f'<g id="north" transform="translate({_fmt(cx)} {_fmt(cy)}) rotate({_fmt(deg)})">',
        '<circle r="16" fill="#ffffff" fill-opacity="0.8" stroke="#8a8a8a"/>',
        '<path d="M0 -12L5 6L0 2L-5 6Z" fill="#b5543c"/>',
        '<text y="-18" font-size="9" text-anchor="middle" fill="#22303c">N</text>',
        "</g>",
    ]


def render_frame_svg(
    viewport: Viewport,
    kind: str,
    geometry: ProjectedGeometry,
    layout: FrameLayout | None = None,
    screen_px: int = 1024,
    with_labels: bool = True,
) -> str:
    """Render one frame. `kind` is the projection family of the plane the
    viewport lives in ("mercator" or anything kilometre-based)."""
    tr = make_transform(viewport, kind, screen_px)
    w, h = tr.width_px, tr.height_px
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {_fmt(w)} {_fmt(h)}" '
        f'width="{_fmt(w)}" height="{_fmt(h)}">',
        f'<rect width="{_fmt(w)}" height="{_fmt(h)}" fill="{BACKGROUND}"/>',
        f'<clipPath id="map"><rect width="{_fmt(w)}" height="{_fmt(h)}"/></clipPath>',
        '<g clip-path="url(#map)">',
    ]
    parts.extend(_geometry_svg(geometry, tr))
    if layout is not None:
        parts.extend(_layout_svg(layout, tr, with_labels))
    parts.append("</g>")
    arrow = layout.north_arrow_rad if layout is not None else 0.0
    parts.extend(_north_arrow_svg(arrow, w))
    parts.append("</svg>")
    return "\n".join(parts)
