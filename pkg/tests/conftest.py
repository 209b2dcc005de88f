from __future__ import annotations

import numpy as np
import pytest

from meshplace.netgraph import Link, NetworkGraph, Node
from meshplace.synthgen import TopologyProfile, generate


def make_graph(n: int, edges, coords=None) -> NetworkGraph:
    """Small test graph; default coordinates spread nodes on a city-scale line."""
    if coords is None:
        coords = [(41.40 + 0.001 * i, 2.10 + 0.001 * i) for i in range(n)]
    nodes = tuple(Node(id=i, lat=coords[i][0], lon=coords[i][1]) for i in range(n))
    links = tuple(Link(src, dst, float(bw)) for src, dst, bw in edges)
    return NetworkGraph(nodes=nodes, links=links)


def random_graph(seed: int, n: int, p: float = 0.35, bw_max: float = 100.0) -> NetworkGraph:
    """Random directed graph with uniform bandwidths; coordinates random."""
    rng = np.random.default_rng(seed)
    edges = []
    for i in range(n):
        for j in range(n):
            if i != j and rng.random() < p:
                edges.append((i, j, float(rng.uniform(0.1, bw_max))))
    coords = [
        (41.40 + float(rng.uniform(-0.01, 0.01)), 2.10 + float(rng.uniform(-0.01, 0.01)))
        for _ in range(n)
    ]
    return make_graph(n, edges, coords)


@pytest.fixture
def two_node():
    # single directed link a->b at 10 Mbps
    return make_graph(2, [(0, 1, 10.0)])


@pytest.fixture
def diamond():
    # a->b->d bottleneck 5, a->c->d bottleneck 8
    return make_graph(4, [(0, 1, 5.0), (1, 3, 9.0), (0, 2, 8.0), (2, 3, 10.0)])


@pytest.fixture
def triangle():
    # complete bidirectional triangle, all links 7 Mbps
    edges = [(i, j, 7.0) for i in range(3) for j in range(3) if i != j]
    return make_graph(3, edges)


@pytest.fixture
def star():
    # hub 0 with spokes 1..3 at 10 Mbps both ways; spokes only reach each
    # other through the hub
    edges = []
    for spoke in (1, 2, 3):
        edges.append((0, spoke, 10.0))
        edges.append((spoke, 0, 10.0))
    return make_graph(4, edges)


@pytest.fixture(scope="session")
def g54():
    return generate(TopologyProfile(n=54, seed=7))


@pytest.fixture(scope="session")
def g54_path(g54, tmp_path_factory):
    from meshplace.netgraph import save_graph_json

    path = tmp_path_factory.mktemp("graphs") / "g54.json"
    save_graph_json(g54, path)
    return str(path)
