"""Bidirectional optical-network topologies.

Topologies are loaded from JSON files listing undirected edges (both link
directions are materialized), or generated as random Gabriel graphs. Link
span counts and node degrees drive the monitoring baseline.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import cached_property
from importlib import resources
from pathlib import Path

import numpy as np

DEFAULT_SPAN_KM = 80.0
DEFAULT_EXTENT_KM = 1000.0


class TopologyError(ValueError):
    """Malformed topology data: schema violations, bad lengths, unknown nodes."""


def ceil_div(a: int, b: int) -> int:
    """Ceiling of a/b for integers with positive b."""
    return -(-a // b)


def span_count(length_km: float, span_length_km: float) -> int:
    """Number of amplifier spans on a link: ceil(length / span length)."""
    if length_km <= 0:
        raise TopologyError(f"link length must be positive, got {length_km}")
    if span_length_km <= 0:
        raise TopologyError(f"span length must be positive, got {span_length_km}")
    return max(1, math.ceil(length_km / span_length_km))


@dataclass(frozen=True)
class DirectedLink:
    src: str
    dst: str
    length_km: float
    spans: int

    @property
    def label(self) -> str:
        return f"{self.src}->{self.dst}"


def link_label(src: str, dst: str) -> str:
    return f"{src}->{dst}"


@dataclass(frozen=True)
class Topology:
    """Immutable directed-link view of a bidirectional fiber network."""

    name: str
    span_length_km: float
    nodes: tuple[str, ...]
    links: tuple[DirectedLink, ...]

    @cached_property
    def _link_map(self) -> dict[tuple[str, str], DirectedLink]:
        return {(l.src, l.dst): l for l in self.links}

    @cached_property
    def _adjacency(self) -> dict[str, tuple[str, ...]]:
        adj: dict[str, list[str]] = {n: [] for n in self.nodes}
        for l in self.links:
            adj[l.src].append(l.dst)
        return {n: tuple(vs) for n, vs in adj.items()}

    @cached_property
    def undirected_edges(self) -> tuple[tuple[str, str, float], ...]:
        """One (a, b, length) entry per bidirectional pair, in link order."""
        order = {n: i for i, n in enumerate(self.nodes)}
        seen: set[tuple[str, str]] = set()
        edges = []
        for l in self.links:
            a, b = sorted((l.src, l.dst), key=order.__getitem__)
            if (a, b) not in seen:
                seen.add((a, b))
                edges.append((a, b, l.length_km))
        return tuple(edges)

    @property
    def link_labels(self) -> tuple[str, ...]:
        return tuple(l.label for l in self.links)

    def link(self, src: str, dst: str) -> DirectedLink:
        try:
            return self._link_map[(src, dst)]
        except KeyError:
            raise TopologyError(f"no link {src}->{dst} in topology {self.name!r}") from None

    def has_link(self, src: str, dst: str) -> bool:
        return (src, dst) in self._link_map

    def neighbors(self, node: str) -> tuple[str, ...]:
        if node not in self._adjacency:
            raise TopologyError(f"unknown node {node!r} in topology {self.name!r}")
        return self._adjacency[node]

    def max_link_length(self) -> float:
        return max(l.length_km for l in self.links) if self.links else 0.0


def node_degree(topology: Topology, node: str) -> int:
    """Undirected degree: number of distinct bidirectional neighbors."""
    return len(topology.neighbors(node))


def _build(name: str, span_length_km: float,
           nodes: list[str], edges: list[tuple[str, str, float]]) -> Topology:
    if span_length_km <= 0:
        raise TopologyError(f"span_length_km must be positive, got {span_length_km}")
    if len(set(nodes)) != len(nodes):
        raise TopologyError("duplicate node ids")
    node_set = set(nodes)
    seen: set[frozenset[str]] = set()
    links: list[DirectedLink] = []
    for a, b, length in edges:
        if a not in node_set or b not in node_set:
            raise TopologyError(f"edge {a}-{b} references unknown node")
        if a == b:
            raise TopologyError(f"self-loop on node {a!r}")
        key = frozenset((a, b))
        if key in seen:
            raise TopologyError(f"duplicate or asymmetric edge {a}-{b}")
        seen.add(key)
        if not (length > 0):
            raise TopologyError(f"edge {a}-{b} has non-positive length {length}")
        spans = span_count(length, span_length_km)
        links.append(DirectedLink(a, b, float(length), spans))
        links.append(DirectedLink(b, a, float(length), spans))
    return Topology(name=name, span_length_km=float(span_length_km),
                    nodes=tuple(nodes), links=tuple(links))


def topology_from_dict(data: dict, span_length_km: float | None = None) -> Topology:
    """Build a Topology from the JSON schema dict; both directions materialized."""
    try:
        name = data["name"]
        nodes = [str(n) for n in data["nodes"]]
        raw_edges = data["edges"]
    except (KeyError, TypeError) as exc:
        raise TopologyError(f"topology schema missing field: {exc}") from None
    span = span_length_km if span_length_km is not None else data.get("span_length_km", DEFAULT_SPAN_KM)
    edges = []
    for e in raw_edges:
        try:
            edges.append((str(e["a"]), str(e["b"]), float(e["length_km"])))
        except (KeyError, TypeError, ValueError) as exc:
            raise TopologyError(f"bad edge entry {e!r}: {exc}") from None
    return _build(str(name), float(span), nodes, edges)


def load_topology(path: str | Path, span_length_km: float | None = None) -> Topology:
    """Load and validate a topology JSON file.

    `span_length_km`, when given, overrides the file's value.
    """
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise TopologyError(f"invalid JSON in {path}: {exc}") from None
    return topology_from_dict(data, span_length_km)


def topology_to_dict(topology: Topology) -> dict:
    return {
        "name": topology.name,
        "span_length_km": topology.span_length_km,
        "nodes": list(topology.nodes),
        "edges": [{"a": a, "b": b, "length_km": length}
                  for a, b, length in topology.undirected_edges],
    }


def save_topology(topology: Topology, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(topology_to_dict(topology), fh, indent=2, sort_keys=True)
        fh.write("\n")


def bundled_topology(name: str, span_length_km: float | None = None) -> Topology:
    """Load one of the packaged reference datasets ('j14' or 'n14')."""
    ref = resources.files("ppmplan.data").joinpath(f"{name.lower()}.json")
    if not ref.is_file():
        raise TopologyError(f"no bundled dataset named {name!r}")
    return topology_from_dict(json.loads(ref.read_text(encoding="utf-8")), span_length_km)


def gabriel_edges(points: np.ndarray) -> list[tuple[int, int]]:
    """Index pairs (i < j) forming the Gabriel graph of 2-D `points`.

    Edge (i, j) is kept iff no third point lies strictly inside the circle
    with diameter ij. Candidates come from the Delaunay triangulation when
    available (the Gabriel graph is one of its subgraphs); degenerate inputs
    fall back to checking all pairs.
    """
    pts = np.asarray(points, dtype=float)
    n = len(pts)
    if n < 2:
        raise TopologyError("need at least 2 points")
    if n == 2:
        return [(0, 1)]
    candidates: set[tuple[int, int]] = set()
    try:
        from scipy.spatial import Delaunay, QhullError

        tri = Delaunay(pts)
        for simplex in tri.simplices:
            for i in range(3):
                a, b = int(simplex[i]), int(simplex[(i + 1) % 3])
                candidates.add((min(a, b), max(a, b)))
    except QhullError:
        candidates = {(i, j) for i in range(n) for j in range(i + 1, n)}
    edges = []
    for i, j in sorted(candidates):
        # strictly inside the diameter circle <=> angle at k is obtuse
        vecs_i = pts[i] - pts
        vecs_j = pts[j] - pts
        dots = np.einsum("ij,ij->i", vecs_i, vecs_j)
        dots[i] = dots[j] = 1.0
        if np.all(dots >= 0):
            edges.append((i, j))
    return edges


def generate_gabriel(n: int, seed: int, extent_km: float = DEFAULT_EXTENT_KM,
                     span_length_km: float = DEFAULT_SPAN_KM) -> Topology:
    """Random Gabriel-graph topology over `n` uniform points in a square."""
    if n < 2:
        raise TopologyError(f"need at least 2 nodes, got {n}")
    if extent_km <= 0:
        raise TopologyError(f"extent_km must be positive, got {extent_km}")
    rng = np.random.default_rng(seed)
    pts = rng.uniform(0.0, extent_km, size=(n, 2))
    nodes = [str(i) for i in range(n)]
    edges = []
    for i, j in gabriel_edges(pts):
        length = float(np.hypot(*(pts[i] - pts[j])))
        if length <= 0:
            raise TopologyError("coincident points in Gabriel generation")
        edges.append((nodes[i], nodes[j], length))
    return _build(f"gabriel-n{n}-s{seed}", span_length_km, nodes, edges)
