"""Geo-referenced graph model and document loading.

The on-disk format is a single JSON document (see docs/formats.md):

    {"schemaVersion": 1,
     "vertices": [{"id", "name", "lat", "lon", "attributes": {...}}, ...],
     "edges": [["id1", "id2"], ...]}

Edges are undirected, self-loops and duplicates are invalid, and every
attribute value is a non-negative finite number so that max-normalized
scores stay in [0, 1].
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import jsonschema

from .geodesy import GeoCoord, GeodesyError

SCHEMA_VERSION = 1

GRAPH_SCHEMA = {
    "type": "object",
    "required": ["vertices", "edges"],
    "properties": {
        "schemaVersion": {"type": "integer"},
        "vertices": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["id", "name", "lat", "lon"],
                "properties": {
                    "id": {"type": "string", "minLength": 1},
                    "name": {"type": "string"},
                    "lat": {"type": "number"},
                    "lon": {"type": "number"},
                    "attributes": {
                        "type": "object",
                        "additionalProperties": {"type": "number"},
                    },
                },
                "additionalProperties": False,
            },
        },
        "edges": {
            "type": "array",
            "items": {
                "type": "array",
                "items": {"type": "string"},
                "minItems": 2,
                "maxItems": 2,
            },
        },
    },
    "additionalProperties": False,
}


class GraphError(ValueError):
    """Invalid graph structure or unknown vertex."""


class GraphFormatError(GraphError):
    """Document failed validation; carries the violation list."""

    def __init__(self, violations: list[str]):
        super().__init__("; ".join(violations))
        self.violations = violations


@dataclass(frozen=True)
class GeoVertex:
    id: str
    name: str
    coord: GeoCoord
    attributes: dict[str, float] = field(default_factory=dict)


class GeoGraph:
    """Immutable undirected graph with geographic vertices."""

    def __init__(self, vertices: list[GeoVertex], edges: list[tuple[str, str]]):
        self._vertices: dict[str, GeoVertex] = {}
        for v in vertices:
            if v.id in self._vertices:
                raise GraphError(f"duplicate vertex id {v.id!r}")
            self._vertices[v.id] = v
        self._adjacency: dict[str, set[str]] = {vid: set() for vid in self._vertices}
        self._edges: list[tuple[str, str]] = []
        seen: set[tuple[str, str]] = set()
        for a, b in edges:
            if a not in self._vertices or b not in self._vertices:
                raise GraphError(f"edge ({a!r}, {b!r}) references an unknown vertex")
            if a == b:
                raise GraphError(f"self-loop on {a!r}")
            key = (a, b) if a < b else (b, a)
            if key in seen:
                raise GraphError(f"duplicate edge ({a!r}, {b!r})")
            seen.add(key)
            self._edges.append(key)
            self._adjacency[a].add(b)
            self._adjacency[b].add(a)
        self._edges.sort()
        # sorted tuples so traversal order never depends on set iteration
        self._neighbors: dict[str, tuple[str, ...]] = {
            vid: tuple(sorted(adj)) for vid, adj in self._adjacency.items()
        }
        self._attribute_max: dict[str, float] = {}
        for v in self._vertices.values():
            for name, value in v.attributes.items():
                cur = self._attribute_max.get(name)
                if cur is None or value > cur:
                    self._attribute_max[name] = value

    # -- access ----------------------------------------------------------

    def __len__(self) -> int:
        return len(self._vertices)

    def __contains__(self, vid: str) -> bool:
        return vid in self._vertices

    @property
    def vertex_ids(self) -> list[str]:
        return sorted(self._vertices)

    @property
    def edges(self) -> list[tuple[str, str]]:
        return list(self._edges)

    def vertex(self, vid: str) -> GeoVertex:
        try:
            return self._vertices[vid]
        except KeyError:
            raise GraphError(f"unknown vertex {vid!r}") from None

    def vertices(self) -> list[GeoVertex]:
        return [self._vertices[vid] for vid in self.vertex_ids]

    def neighbors(self, vid: str) -> tuple[str, ...]:
        self.vertex(vid)
        return self._neighbors[vid]

    def degree(self, vid: str) -> int:
        self.vertex(vid)
        return len(self._adjacency[vid])

    def max_degree(self) -> int:
        if not self._adjacency:
            return 0
        return max(len(n) for n in self._adjacency.values())

    def attribute_max(self, name: str) -> float | None:
        """Largest value of an attribute across the graph, None if unset."""
        return self._attribute_max.get(name)

    def attribute_names(self) -> list[str]:
        return sorted(self._attribute_max)


# -- document handling ----------------------------------------------------


def _semantic_violations(doc: dict) -> list[str]:
    violations: list[str] = []
    ids: set[str] = set()
    for entry in doc.get("vertices", []):
        vid = entry.get("id")
        if vid in ids:
            violations.append(f"duplicate vertex id {vid!r}")
        ids.add(vid)
        lat, lon = entry.get("lat"), entry.get("lon")
        try:
            GeoCoord(lat, lon)
        except (GeodesyError, TypeError):
            violations.append(f"vertex {vid!r} has invalid coordinate ({lat}, {lon})")
        for name, value in (entry.get("attributes") or {}).items():
            if not (isinstance(value, (int, float)) and math.isfinite(value) and value >= 0):
                violations.append(
                    f"vertex {vid!r} attribute {name!r} must be a finite number >= 0"
                )
    seen_edges: set[tuple[str, str]] = set()
    for edge in doc.get("edges", []):
        a, b = edge
        if a not in ids:
            violations.append(f"edge ({a!r}, {b!r}) references unknown vertex {a!r}")
        if b not in ids:
            violations.append(f"edge ({a!r}, {b!r}) references unknown vertex {b!r}")
        if a == b:
            violations.append(f"self-loop on {a!r}")
        key = (a, b) if a < b else (b, a)
        if key in seen_edges:
            violations.append(f"duplicate edge ({a!r}, {b!r})")
        seen_edges.add(key)
    return violations


def validate_graph_document(doc) -> list[str]:
    """All schema and semantic violations in the document; empty when clean."""
    validator = jsonschema.Draft7Validator(GRAPH_SCHEMA)
    violations = [
        f"schema: {err.json_path}: {err.message}"
        for err in sorted(validator.iter_errors(doc), key=lambda e: e.json_path)
    ]
    if violations:
        return violations
    version = doc.get("schemaVersion", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        violations.append(f"unsupported schemaVersion {version}")
    return violations + _semantic_violations(doc)


def graph_from_document(doc) -> GeoGraph:
    """Build a GeoGraph, raising GraphFormatError listing every violation."""
    violations = validate_graph_document(doc)
    if violations:
        raise GraphFormatError(violations)
    vertices = [
        GeoVertex(
            id=entry["id"],
            name=entry["name"],
            coord=GeoCoord(entry["lat"], entry["lon"]),
            attributes=dict(entry.get("attributes") or {}),
        )
        for entry in doc["vertices"]
    ]
    edges = [(a, b) for a, b in doc["edges"]]
    return GeoGraph(vertices, edges)


def load_graph(path: str | Path) -> GeoGraph:
    """Load and validate a graph document from a JSON file."""
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise GraphFormatError([f"not valid JSON: {exc}"]) from exc
    return graph_from_document(doc)
