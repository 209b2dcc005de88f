"""Directed bandwidth-weighted mesh graph and widest-path computation.

Models a wireless mesh underlay: nodes are outdoor routers with geographic
coordinates, links are directed and carry a measured bandwidth in Mbps.
Links are directed because a large share of real mesh links is usable in
one direction only, and bidirectional links are often asymmetric.

Path bandwidth between two nodes follows max-min (widest-path) semantics:
the value of a path is its weakest link, and the pair value is the best
such bottleneck over all paths. This models the achievable throughput of
a service route that is limited by its narrowest hop.
"""

from __future__ import annotations

import csv
import heapq
import json
import math
import os
import tempfile
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np

GRAPH_FORMAT_VERSION = 1

#: Environment variable capping internal worker threads (0 or unset = auto).
THREADS_ENV_VAR = "MESHPLACE_THREADS"


class GraphFormatError(ValueError):
    """Raised when a graph file cannot be parsed into a usable graph."""


@dataclass(frozen=True)
class Node:
    """A mesh router with a geographic position.

    ``id`` must be dense 0..n-1 within a graph; the placement operations
    index matrices by node id.
    """

    id: int
    lat: float
    lon: float
    name: str | None = None


@dataclass(frozen=True)
class Link:
    """A directed wireless link with measured bandwidth in Mbps."""

    src: int
    dst: int
    bandwidth: float


@dataclass(frozen=True, eq=False)
class NetworkGraph:
    """Immutable underlay graph.

    Instances are safe to share across threads; derived structures
    (adjacency, the all-pairs bandwidth matrix) are memoized on first use.
    Use :func:`validate` to check the structural invariants of untrusted
    data before running placement operations on it.
    """

    nodes: tuple[Node, ...]
    links: tuple[Link, ...]
    meta: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        object.__setattr__(self, "nodes", tuple(self.nodes))
        object.__setattr__(self, "links", tuple(self.links))

    @property
    def n(self) -> int:
        return len(self.nodes)

    def latlon(self) -> np.ndarray:
        """(n, 2) array of node (lat, lon) in degrees, indexed by node id."""
        out = np.zeros((self.n, 2))
        for node in self.nodes:
            out[node.id] = (node.lat, node.lon)
        return out

    @cached_property
    def _adjacency(self) -> list[list[tuple[int, float]]]:
        adj: list[list[tuple[int, float]]] = [[] for _ in range(self.n)]
        for link in self.links:
            adj[link.src].append((link.dst, link.bandwidth))
        for entries in adj:
            entries.sort()
        return adj

    @cached_property
    def bandwidth_matrix(self) -> np.ndarray:
        """Memoized :func:`all_pairs_bandwidth` of this graph."""
        return all_pairs_bandwidth(self)


def _check_node(g: NetworkGraph, i: int) -> None:
    if not 0 <= i < g.n:
        raise ValueError(f"unknown node id {i} (graph has {g.n} nodes)")


def _widest_from(g: NetworkGraph, src: int) -> np.ndarray:
    """Single-source widest-path widths via greedy best-first label setting.

    The source gets the ``inf`` self sentinel; unreachable nodes stay 0.
    Zero-bandwidth links never relax a label, so a node reachable only
    through them reports 0 (no usable capacity).
    """
    adj = g._adjacency
    width = [0.0] * g.n
    width[src] = math.inf
    heap: list[tuple[float, int]] = [(-math.inf, src)]
    while heap:
        neg_w, u = heapq.heappop(heap)
        w = -neg_w
        if w < width[u]:
            continue
        for v, bw in adj[u]:
            nw = min(w, bw)
            if nw > width[v]:
                width[v] = nw
                heapq.heappush(heap, (-nw, v))
    return np.array(width)


def path_bandwidth(g: NetworkGraph, i: int, j: int) -> float:
    """Max-min bandwidth over all i -> j paths, in Mbps.

    Returns 0 if ``j`` is unreachable from ``i`` and the ``inf`` self
    sentinel for ``i == j``; the sentinel never contributes to placement
    objectives. Only the width is computed, never a witness path.
    """
    _check_node(g, i)
    _check_node(g, j)
    if i == j:
        return math.inf
    return float(_widest_from(g, i)[j])


def _worker_count(n_tasks: int) -> int:
    raw = os.environ.get(THREADS_ENV_VAR, "0")
    try:
        cap = int(raw)
    except ValueError:
        cap = 0
    if cap <= 0:
        # auto: the search is pure Python, so threads buy nothing; stay sequential
        return 1
    return max(1, min(cap, n_tasks))


def all_pairs_bandwidth(g: NetworkGraph) -> np.ndarray:
    """(n, n) matrix of max-min path bandwidths; entry (i, j) is f_ij.

    Diagonal entries carry the ``inf`` self sentinel. Per-source rows are
    independent, so computation may be spread over MESHPLACE_THREADS
    workers; the result is identical to the sequential order.
    """
    if g.n == 0:
        return np.zeros((0, 0))
    workers = _worker_count(g.n)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(lambda s: _widest_from(g, s), range(g.n)))
    else:
        rows = [_widest_from(g, s) for s in range(g.n)]
    return np.vstack(rows)


def validate(g: NetworkGraph) -> list[str]:
    """Check all NetworkGraph invariants; returns violations as messages.

    An empty list means the graph is safe for every other operation in
    this package. Violations are data, not errors: callers decide whether
    to refuse the graph.
    """
    violations: list[str] = []
    ids = [node.id for node in g.nodes]
    seen: set[int] = set()
    for node in g.nodes:
        if node.id in seen:
            violations.append(f"node {node.id}: duplicate id")
        seen.add(node.id)
        if not -90.0 <= node.lat <= 90.0:
            violations.append(f"node {node.id}: latitude {node.lat} outside [-90, 90]")
        if not -180.0 <= node.lon <= 180.0:
            violations.append(f"node {node.id}: longitude {node.lon} outside [-180, 180]")
    if sorted(set(ids)) != list(range(len(ids))):
        violations.append(f"node ids are not dense 0..{len(ids) - 1}")
    seen_pairs: set[tuple[int, int]] = set()
    valid_ids = set(ids)
    for link in g.links:
        for endpoint in (link.src, link.dst):
            if endpoint not in valid_ids:
                violations.append(f"link {link.src}->{link.dst}: unknown node {endpoint}")
        if link.src == link.dst:
            violations.append(f"link {link.src}->{link.dst}: self loop")
        if not math.isfinite(link.bandwidth) or link.bandwidth < 0:
            violations.append(
                f"link {link.src}->{link.dst}: bandwidth {link.bandwidth} not a non-negative finite Mbps value"
            )
        pair = (link.src, link.dst)
        if pair in seen_pairs:
            violations.append(f"link {link.src}->{link.dst}: duplicate ordered pair")
        seen_pairs.add(pair)
    return violations


# ---------------------------------------------------------------------------
# Canonical graph file format (versioned JSON) and CSV measurement importer.


def graph_to_dict(g: NetworkGraph) -> dict:
    """Canonical JSON-ready dict: nodes sorted by id, links by (src, dst)."""
    nodes = []
    for node in sorted(g.nodes, key=lambda nd: nd.id):
        entry: dict = {"id": node.id, "lat": node.lat, "lon": node.lon}
        if node.name is not None:
            entry["name"] = node.name
        nodes.append(entry)
    links = [
        {"src": link.src, "dst": link.dst, "bw_mbps": link.bandwidth}
        for link in sorted(g.links, key=lambda ln: (ln.src, ln.dst))
    ]
    doc: dict = {"version": GRAPH_FORMAT_VERSION, "nodes": nodes, "links": links}
    if g.meta:
        doc["meta"] = g.meta
    return doc


def graph_from_dict(doc: dict) -> NetworkGraph:
    if not isinstance(doc, dict):
        raise GraphFormatError("graph document must be a JSON object")
    version = doc.get("version")
    if version != GRAPH_FORMAT_VERSION:
        raise GraphFormatError(f"unsupported graph format version {version!r}")
    try:
        nodes = tuple(
            Node(
                id=int(entry["id"]),
                lat=float(entry["lat"]),
                lon=float(entry["lon"]),
                name=entry.get("name"),
            )
            for entry in doc["nodes"]
        )
        links = tuple(
            Link(src=int(entry["src"]), dst=int(entry["dst"]), bandwidth=float(entry["bw_mbps"]))
            for entry in doc["links"]
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise GraphFormatError(f"malformed graph document: {exc}") from exc
    ids = sorted(node.id for node in nodes)
    if ids != list(range(len(nodes))):
        raise GraphFormatError("node ids must be dense 0..n-1")
    nodes = tuple(sorted(nodes, key=lambda nd: nd.id))
    meta = doc.get("meta", {})
    if not isinstance(meta, dict):
        raise GraphFormatError("meta must be an object")
    return NetworkGraph(nodes=nodes, links=links, meta=meta)


def _atomic_write_text(path: str | Path, text: str) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or Path("."), prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def save_graph_json(g: NetworkGraph, path: str | Path) -> None:
    """Write the canonical graph JSON atomically (temp file + rename)."""
    _atomic_write_text(path, json.dumps(graph_to_dict(g), indent=2, sort_keys=True) + "\n")


def load_graph_json(path: str | Path) -> NetworkGraph:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise GraphFormatError(f"{path}: not valid JSON: {exc}") from exc
    return graph_from_dict(doc)


def load_graph_csv(links_path: str | Path, nodes_path: str | Path) -> NetworkGraph:
    """Import a measurement dump: a `src,dst,bw_mbps` edge list plus an
    `id,lat,lon[,name]` node file.

    Router ids in dumps are arbitrary; they are remapped to dense 0..n-1
    (ascending original id), the original id kept as the node name and the
    full mapping recorded under ``meta["csv_id_map"]``.
    """
    raw_nodes: list[tuple[int, float, float, str | None]] = []
    with open(nodes_path, newline="") as fh:
        for row in csv.DictReader(fh):
            try:
                raw_nodes.append(
                    (int(row["id"]), float(row["lat"]), float(row["lon"]), row.get("name"))
                )
            except (KeyError, TypeError, ValueError) as exc:
                raise GraphFormatError(f"{nodes_path}: bad node row {row!r}: {exc}") from exc
    if not raw_nodes:
        raise GraphFormatError(f"{nodes_path}: no node rows")
    raw_nodes.sort(key=lambda item: item[0])
    id_map = {orig: dense for dense, (orig, _, _, _) in enumerate(raw_nodes)}
    if len(id_map) != len(raw_nodes):
        raise GraphFormatError(f"{nodes_path}: duplicate node ids")
    remapped = any(orig != dense for orig, dense in id_map.items())
    nodes = tuple(
        Node(id=id_map[orig], lat=lat, lon=lon, name=name if name else (str(orig) if remapped else None))
        for orig, lat, lon, name in raw_nodes
    )
    links = []
    with open(links_path, newline="") as fh:
        for row in csv.DictReader(fh):
            try:
                src, dst, bw = int(row["src"]), int(row["dst"]), float(row["bw_mbps"])
            except (KeyError, TypeError, ValueError) as exc:
                raise GraphFormatError(f"{links_path}: bad link row {row!r}: {exc}") from exc
            if src not in id_map or dst not in id_map:
                raise GraphFormatError(f"{links_path}: link {src}->{dst} references unknown node")
            links.append(Link(src=id_map[src], dst=id_map[dst], bandwidth=bw))
    meta: dict = {}
    if remapped:
        meta["csv_id_map"] = {str(orig): dense for orig, dense in id_map.items()}
    return NetworkGraph(nodes=nodes, links=tuple(links), meta=meta)
