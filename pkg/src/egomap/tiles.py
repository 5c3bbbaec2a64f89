"""Mercator tile prefetch planning.

A transition rendered on raster tiles needs every tile it will touch fetched
before the animation starts. For each frame we pick the zoom whose tile
resolution matches the screen, take the tiles intersecting the viewport plus
a one-tile pad, and union the per-frame sets.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .transitions import TransitionPlan, Viewport, frames

DEFAULT_Z_MAX = 19


class TileError(ValueError):
    pass


@dataclass(frozen=True, order=True)
class TileRef:
    z: int
    x: int
    y: int

    def __post_init__(self) -> None:
        n = 1 << self.z
        if self.z < 0 or not (0 <= self.x < n and 0 <= self.y < n):
            raise TileError(f"tile indices out of range: {self}")


def choose_zoom(width_norm: float, tile_px: int, screen_px: int, z_max: int = DEFAULT_Z_MAX) -> int:
    """Zoom whose tiles are roughly screen resolution for a viewport of the
    given normalized width."""
    if width_norm <= 0.0 or tile_px <= 0 or screen_px <= 0:
        raise TileError("width, tile size, and screen size must be positive")
    z = round(math.log2(screen_px / (tile_px * width_norm)))
    return min(max(int(z), 0), z_max)


def tiles_for_viewport(vp: Viewport, z: int, pad: int = 1) -> set[TileRef]:
    """Tiles at zoom z intersecting the viewport, with a pad-tile border.
    x wraps around the antimeridian; y clamps at the poles."""
    n = 1 << z
    x0 = math.floor((vp.center.x - vp.width / 2.0) * n) - pad
    x1 = math.floor((vp.center.x + vp.width / 2.0) * n) + pad
    y0 = max(math.floor((vp.center.y - vp.height / 2.0) * n) - pad, 0)
    y1 = min(math.floor((vp.center.y + vp.height / 2.0) * n) + pad, n - 1)
    if x1 - x0 + 1 >= n:
        xs = range(n)
    else:
        xs = [(x % n) for x in range(x0, x1 + 1)]
    return {TileRef(z, x, y) for x in xs for y in range(y0, y1 + 1)}


def plan_tiles(plan: TransitionPlan, tile_px: int = 256, screen_px: int = 1024,
               z_max: int = DEFAULT_Z_MAX) -> set[TileRef]:
    """Union of padded tile sets over every frame of a Mercator plan."""
    if plan.projection != "mercator":
        raise TileError("tile plans are only defined for Mercator transitions")
    out: set[TileRef] = set()
    for frame in frames(plan):
        z = choose_zoom(frame.viewport.width, tile_px, screen_px, z_max)
        out |= tiles_for_viewport(frame.viewport, z)
    return out


def tile_url(template: str, ref: TileRef) -> str:
    """Fill a z/x/y URL template like https://tiles.example/{z}/{x}/{y}.png."""
    return template.format(z=ref.z, x=ref.x, y=ref.y)
