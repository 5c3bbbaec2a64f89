"""Degree-of-interest scoring and proxy selection.

Component functions all map into [0, 1]:

* geo_distance: exp(-ln2 * d / halfLifeKm) — 1 at the focus, 0.5 one
  half-life away.
* topo_distance: 1 - min(hops, maxHops) / maxHops, unreachable -> 0.
* degree: degree / max degree over the graph.
* attribute:<name>: value / max value over the graph, missing -> 0.

A configuration combines weighted components into a single score; selection
filters by threshold and keeps the top maxProxies, ordered by score with ties
broken by vertex id.
"""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field

from .graph import GeoGraph, GeoVertex
from .geodesy import great_circle_distance

DEFAULT_HALF_LIFE_KM = 2000.0
DEFAULT_MAX_HOPS = 4

_FUNCTIONS = ("geo_distance", "topo_distance", "degree")  # plus attribute:<name>


class DoIConfigError(ValueError):
    """Invalid DoI configuration."""


class UnknownAttributeError(ValueError):
    """Attribute named in a component is absent from every vertex."""


@dataclass(frozen=True)
class DoIComponent:
    function: str
    weight: float
    params: dict[str, float] = field(default_factory=dict)


@dataclass(frozen=True)
class DoIConfig:
    components: tuple[DoIComponent, ...]
    threshold: float = 0.0
    max_proxies: int = 8

    def __post_init__(self) -> None:
        if not self.components:
            raise DoIConfigError("at least one component is required")
        total = 0.0
        for c in self.components:
            if not (isinstance(c.weight, (int, float)) and math.isfinite(c.weight)):
                raise DoIConfigError(f"weight of {c.function!r} must be finite")
            if c.weight < 0.0:
                raise DoIConfigError(f"weight of {c.function!r} must be >= 0")
            if c.function not in _FUNCTIONS and not (
                c.function.startswith("attribute:") and len(c.function) > len("attribute:")
            ):
                raise DoIConfigError(f"unknown DoI function {c.function!r}")
            if c.function == "geo_distance":
                if self._param(c, "halfLifeKm", DEFAULT_HALF_LIFE_KM) <= 0.0:
                    raise DoIConfigError("halfLifeKm must be positive")
            if c.function == "topo_distance":
                if self._param(c, "maxHops", DEFAULT_MAX_HOPS) < 1:
                    raise DoIConfigError("maxHops must be >= 1")
            total += c.weight
        if total <= 0.0:
            raise DoIConfigError("at least one component needs a positive weight")
        if not (0.0 <= self.threshold <= 1.0):
            raise DoIConfigError(f"threshold {self.threshold} outside [0, 1]")
        if self.max_proxies < 0:
            raise DoIConfigError("maxProxies must be >= 0")

    @staticmethod
    def _param(c: DoIComponent, name: str, default):
        return c.params.get(name, default)

    def to_dict(self) -> dict:
        return {
            "components": [
                {"function": c.function, "weight": c.weight, "params": dict(c.params)}
                for c in self.components
            ],
            "threshold": self.threshold,
            "maxProxies": self.max_proxies,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "DoIConfig":
        try:
            components = tuple(
                DoIComponent(
                    function=str(entry["function"]),
                    weight=float(entry["weight"]),
                    params={k: float(v) for k, v in (entry.get("params") or {}).items()},
                )
                for entry in doc["components"]
            )
            threshold = float(doc.get("threshold", 0.0))
            max_proxies = int(doc.get("maxProxies", 8))
        except (KeyError, TypeError, ValueError) as exc:
            raise DoIConfigError(f"malformed DoI configuration: {exc}") from exc
        return cls(components=components, threshold=threshold, max_proxies=max_proxies)


def default_config() -> DoIConfig:
    return DoIConfig(
        components=(
            DoIComponent("geo_distance", 1.0, {"halfLifeKm": DEFAULT_HALF_LIFE_KM}),
            DoIComponent("topo_distance", 1.0, {"maxHops": DEFAULT_MAX_HOPS}),
            DoIComponent("degree", 0.5),
        ),
        threshold=0.1,
        max_proxies=8,
    )


@dataclass(frozen=True)
class DoIScore:
    vertex: str
    score: float


# -- component functions ---------------------------------------------------


def doi_geo_distance(focus: GeoVertex, v: GeoVertex, half_life_km: float = DEFAULT_HALF_LIFE_KM) -> float:
    if half_life_km <= 0.0:
        raise DoIConfigError("halfLifeKm must be positive")
    d = great_circle_distance(focus.coord, v.coord)
    return math.exp(-math.log(2.0) * d / half_life_km)


def hop_counts(graph: GeoGraph, focus: str) -> dict[str, int]:
    """Unweighted shortest-path hop count from focus to every reachable vertex."""
    graph.vertex(focus)
    hops = {focus: 0}
    queue = deque([focus])
    while queue:
        cur = queue.popleft()
        for nxt in graph.neighbors(cur):
            if nxt not in hops:
                hops[nxt] = hops[cur] + 1
                queue.append(nxt)
    return hops


def doi_topo_distance(graph: GeoGraph, focus: str, v: str, max_hops: int = DEFAULT_MAX_HOPS) -> float:
    if max_hops < 1:
        raise DoIConfigError("maxHops must be >= 1")
    graph.vertex(v)
    hops = hop_counts(graph, focus).get(v)
    if hops is None:
        return 0.0
    return 1.0 - min(hops, max_hops) / max_hops


def doi_degree(graph: GeoGraph, v: str) -> float:
    deg = graph.degree(v)
    top = graph.max_degree()
    return deg / top if top > 0 else 0.0


def doi_attribute(graph: GeoGraph, v: str, name: str) -> float:
    top = graph.attribute_max(name)
    if top is None:
        raise UnknownAttributeError(f"attribute {name!r} is absent from every vertex")
    value = graph.vertex(v).attributes.get(name)
    if value is None or top == 0.0:
        return 0.0
    return value / top


def combine_doi(cfg: DoIConfig, component_scores: list[float]) -> float:
    if len(component_scores) != len(cfg.components):
        raise DoIConfigError("component/score length mismatch")
    total_w = sum(c.weight for c in cfg.components)
    if total_w <= 0.0:
        raise DoIConfigError("at least one component needs a positive weight")
    return sum(c.weight * s for c, s in zip(cfg.components, component_scores)) / total_w


# -- scoring and selection --------------------------------------------------


def score_vertex(graph: GeoGraph, focus: str, vid: str, cfg: DoIConfig,
                 _hops: dict[str, int] | None = None) -> float:
    """Combined DoI of `vid` relative to `focus` under `cfg`."""
    focus_vertex = graph.vertex(focus)
    v = graph.vertex(vid)
    scores = []
    for c in cfg.components:
        if c.function == "geo_distance":
            scores.append(
                doi_geo_distance(focus_vertex, v, c.params.get("halfLifeKm", DEFAULT_HALF_LIFE_KM))
            )
        elif c.function == "topo_distance":
            max_hops = int(c.params.get("maxHops", DEFAULT_MAX_HOPS))
            if max_hops < 1:
                raise DoIConfigError("maxHops must be >= 1")
            hops = (_hops if _hops is not None else hop_counts(graph, focus)).get(vid)
            scores.append(0.0 if hops is None else 1.0 - min(hops, max_hops) / max_hops)
        elif c.function == "degree":
            scores.append(doi_degree(graph, vid))
        else:
            scores.append(doi_attribute(graph, vid, c.function.split(":", 1)[1]))
    return combine_doi(cfg, scores)


def _ranked(scored: list[DoIScore], threshold: float, cap: int) -> list[DoIScore]:
    kept = [s for s in scored if s.score >= threshold]
    kept.sort(key=lambda s: (-s.score, s.vertex))
    return kept[:cap]


def select_vertices(graph: GeoGraph, focus: str, cfg: DoIConfig) -> list[DoIScore]:
    """Ranked proxy candidates: every vertex except the focus, scored,
    filtered by threshold, sorted score-descending (ties by id), capped."""
    graph.vertex(focus)
    hops = hop_counts(graph, focus)
    scored = [
        DoIScore(vid, score_vertex(graph, focus, vid, cfg, _hops=hops))
        for vid in graph.vertex_ids
        if vid != focus
    ]
    return _ranked(scored, cfg.threshold, cfg.max_proxies)


def transition_interest_set(graph: GeoGraph, from_id: str, to_id: str, cfg: DoIConfig) -> list[DoIScore]:
    """Interest set shown during a transition: the union of both endpoints'
    selections (endpoints themselves excluded), re-ranked by the score
    relative to whichever endpoint is geodesically nearer to the candidate."""
    if from_id == to_id:
        return select_vertices(graph, from_id, cfg)
    candidates = {s.vertex for s in select_vertices(graph, from_id, cfg)}
    candidates |= {s.vertex for s in select_vertices(graph, to_id, cfg)}
    candidates -= {from_id, to_id}
    a, b = graph.vertex(from_id).coord, graph.vertex(to_id).coord
    hops_a, hops_b = hop_counts(graph, from_id), hop_counts(graph, to_id)
    scored = []
    for vid in sorted(candidates):
        p = graph.vertex(vid).coord
        nearer, hops = (
            (from_id, hops_a)
            if great_circle_distance(p, a) <= great_circle_distance(p, b)
            else (to_id, hops_b)
        )
        scored.append(DoIScore(vid, score_vertex(graph, nearer, vid, cfg, _hops=hops)))
    return _ranked(scored, cfg.threshold, cfg.max_proxies)
