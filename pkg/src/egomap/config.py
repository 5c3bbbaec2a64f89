"""Configuration containers for precomputation and the explorer service."""
from __future__ import annotations

import json
import re
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

from .doi import DoIConfig, default_config
from .transitions import TransitionConfig


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class PipelineConfig:
    """Tunables for asset precomputation and tile planning."""

    transition: TransitionConfig = field(default_factory=TransitionConfig)
    tolerance_px: float = 0.5
    screen_px: int = 1024
    tile_px: int = 256
    z_max: int = 19
    morph_keyframes: int = 5

    def __post_init__(self) -> None:
        if self.tolerance_px < 0.0:
            raise ConfigError("tolerance_px must be >= 0")
        if self.screen_px <= 0 or self.tile_px <= 0:
            raise ConfigError("screen_px and tile_px must be positive")
        if self.z_max < 0:
            raise ConfigError("z_max must be >= 0")
        if self.morph_keyframes < 2:
            raise ConfigError("morph_keyframes must be >= 2")

    def tolerance_plane(self, viewport_width: float) -> float:
        """Simplification tolerance in plane units for a given camera width."""
        return self.tolerance_px * viewport_width / self.screen_px


@dataclass(frozen=True)
class AppConfig:
    """Explorer service configuration."""

    graph_path: str
    basemap_paths: tuple[str, ...] = ()
    tile_url_template: str = "https://tile.openstreetmap.org/{z}/{x}/{y}.png"
    assets_dir: str = "assets"
    static_dir: str | None = None
    listen_host: str = "127.0.0.1"
    listen_port: int = 8000
    pipeline: PipelineConfig = field(default_factory=PipelineConfig)
    doi: DoIConfig = field(default_factory=default_config)


def _snake(key: str) -> str:
    return re.sub(r"([A-Z])", r"_\1", key).lower()


def _kwargs(doc: dict, cls, section: str) -> dict:
    """Map camelCase keys onto dataclass fields, rejecting unknowns by their
    original spelling."""
    known = {f.name for f in fields(cls)}
    out = {}
    for key, value in doc.items():
        name = _snake(key)
        if name not in known:
            raise ConfigError(f"unknown {section} setting: {key!r}")
        out[name] = value
    return out


def _transition_from_dict(doc: dict) -> TransitionConfig:
    return TransitionConfig(**_kwargs(doc, TransitionConfig, "transition"))


def _pipeline_from_dict(doc: dict) -> PipelineConfig:
    doc = dict(doc)
    transition = _transition_from_dict(doc.pop("transition", {}))
    kw = _kwargs(doc, PipelineConfig, "pipeline")
    return PipelineConfig(transition=transition, **kw)


def load_config(path: str | Path) -> AppConfig:
    """Read service configuration from a JSON document.

    Paths inside the document are resolved relative to its directory.
    """
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError("config root must be an object")
    allowed = {
        "graphPath", "basemapPaths", "tileUrlTemplate", "assetsDir", "staticDir",
        "listenHost", "listenPort", "pipeline", "doi",
    }
    unknown = set(doc) - allowed
    if unknown:
        raise ConfigError(f"unknown settings: {sorted(unknown)}")
    if "graphPath" not in doc:
        raise ConfigError("config needs a graphPath")

    base = path.parent

    def resolve(p: str) -> str:
        q = Path(p)
        return str(q if q.is_absolute() else base / q)

    try:
        cfg = AppConfig(
            graph_path=resolve(doc["graphPath"]),
            basemap_paths=tuple(resolve(p) for p in doc.get("basemapPaths", [])),
            tile_url_template=doc.get(
                "tileUrlTemplate", AppConfig.__dataclass_fields__["tile_url_template"].default
            ),
            assets_dir=resolve(doc.get("assetsDir", "assets")),
            static_dir=resolve(doc["staticDir"]) if doc.get("staticDir") else None,
            listen_host=doc.get("listenHost", "127.0.0.1"),
            listen_port=int(doc.get("listenPort", 8000)),
            pipeline=_pipeline_from_dict(doc.get("pipeline", {})),
            doi=DoIConfig.from_dict(doc["doi"]) if "doi" in doc else default_config(),
        )
    except TypeError as exc:
        raise ConfigError(f"malformed config: {exc}") from exc
    return cfg


def with_overrides(cfg: AppConfig, **kw) -> AppConfig:
    return replace(cfg, **kw)
