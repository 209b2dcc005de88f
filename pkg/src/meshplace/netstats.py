"""Graph and snapshot analytics: centrality of heads, ECDFs, link asymmetry.

Centrality metrics use the undirected view of the mesh: a link in either
direction counts as one edge. Cluster diameter is the maximum hop-count
distance within the cluster's induced undirected subgraph (pairs in
different components of the subgraph are ignored).
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import networkx as nx
import numpy as np

from meshplace.netgraph import NetworkGraph
from meshplace.placement import Placement, _check_placement


@dataclass(frozen=True)
class CentralityReport:
    """Per-node degree / neighborhood connectivity plus per-cluster diameter."""

    heads: tuple[int, ...]
    degree: dict[int, int]
    neighborhood_connectivity: dict[int, float]
    cluster_diameter: tuple[int, ...]

    def head_rows(self) -> list[dict]:
        """One row per cluster with its head's metrics (Table-style view)."""
        return [
            {
                "cluster": idx,
                "head": h,
                "head_degree": self.degree[h],
                "neighborhood_connectivity": self.neighborhood_connectivity[h],
                "diameter": self.cluster_diameter[idx],
            }
            for idx, h in enumerate(self.heads)
        ]

    def to_csv(self) -> str:
        lines = ["cluster,head,head_degree,neighborhood_connectivity,diameter"]
        for row in self.head_rows():
            lines.append(
                f"{row['cluster']},{row['head']},{row['head_degree']},"
                f"{row['neighborhood_connectivity']:.6g},{row['diameter']}"
            )
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class EcdfTable:
    """Right-continuous empirical CDF: sorted unique values with cumulative
    fractions ending at exactly 1.0."""

    values: tuple[float, ...]
    fractions: tuple[float, ...]

    def evaluate(self, x: float) -> float:
        """Fraction of the sample <= x."""
        idx = np.searchsorted(self.values, x, side="right")
        return self.fractions[idx - 1] if idx > 0 else 0.0

    def to_csv(self) -> str:
        lines = ["value,cum_fraction"]
        for v, f in zip(self.values, self.fractions):
            lines.append(f"{v:.10g},{f:.10g}")
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class AsymmetryStats:
    """Asymmetry of bidirectional pairs plus the unidirectional share."""

    threshold: float
    asymmetric_fraction: float
    unidirectional_share: float
    bidirectional_pairs: int
    unidirectional_pairs: int

    def to_json(self) -> str:
        return json.dumps(
            {
                "threshold": self.threshold,
                "asymmetric_fraction": self.asymmetric_fraction,
                "unidirectional_share": self.unidirectional_share,
                "bidirectional_pairs": self.bidirectional_pairs,
                "unidirectional_pairs": self.unidirectional_pairs,
            },
            indent=2,
            sort_keys=True,
        ) + "\n"


def undirected_view(g: NetworkGraph) -> nx.Graph:
    """Undirected simple graph with an edge wherever any link exists."""
    ug = nx.Graph()
    ug.add_nodes_from(range(g.n))
    ug.add_edges_from((link.src, link.dst) for link in g.links)
    return ug


def centrality(g: NetworkGraph, p: Placement) -> CentralityReport:
    """Degree and neighborhood connectivity per node, diameter per cluster.

    Neighborhood connectivity of a node is the mean degree of its
    neighbors (0 for an isolated node). Degrees are taken on the whole
    graph; diameters on each cluster's induced subgraph.
    """
    _check_placement(g, p)
    ug = undirected_view(g)
    degree = {node: int(deg) for node, deg in ug.degree()}
    neighborhood = {}
    for node in ug.nodes:
        neighbors = list(ug.neighbors(node))
        neighborhood[node] = (
            float(np.mean([degree[v] for v in neighbors])) if neighbors else 0.0
        )
    diameters = []
    for members in p.clusters():
        sub = ug.subgraph(members)
        worst = 0
        for component in nx.connected_components(sub):
            if len(component) > 1:
                worst = max(worst, nx.diameter(sub.subgraph(component)))
        diameters.append(worst)
    return CentralityReport(
        heads=tuple(p.heads),
        degree=degree,
        neighborhood_connectivity=neighborhood,
        cluster_diameter=tuple(diameters),
    )


def ecdf(samples) -> EcdfTable:
    """Empirical CDF table of a non-empty sample."""
    arr = np.asarray(samples, dtype=float).ravel()
    if arr.size == 0:
        raise ValueError("ecdf requires a non-empty sample")
    values, counts = np.unique(arr, return_counts=True)
    fractions = np.cumsum(counts) / arr.size
    fractions[-1] = 1.0
    return EcdfTable(
        values=tuple(float(v) for v in values),
        fractions=tuple(float(f) for f in fractions),
    )


def fit_exponential(samples) -> float:
    """Maximum-likelihood exponential mean of a positive sample.

    The MLE of the exponential mean is exactly the sample mean.
    """
    arr = np.asarray(samples, dtype=float).ravel()
    if arr.size == 0:
        raise ValueError("fit requires a non-empty sample")
    if np.any(arr <= 0):
        raise ValueError("exponential fit requires all samples > 0")
    return float(arr.mean())


def link_asymmetry(g: NetworkGraph, threshold: float) -> AsymmetryStats:
    """Fraction of bidirectional pairs whose bandwidth deviation exceeds
    ``threshold``, plus the unidirectional share of all used pairs.

    Deviation of a pair is |bw_ab - bw_ba| / max(bw_ab, bw_ba), which lies
    in [0, 1]; a pair with both directions at 0 Mbps has deviation 0.
    """
    if not 0 < threshold < 1:
        raise ValueError(f"threshold must be in (0, 1), got {threshold}")
    by_pair: dict[tuple[int, int], float] = {}
    for link in g.links:
        by_pair[(link.src, link.dst)] = link.bandwidth
    bidi = 0
    uni = 0
    exceeding = 0
    for (a, b), fwd in by_pair.items():
        if a > b:
            continue
        back = by_pair.get((b, a))
        if back is None:
            uni += 1
            continue
        bidi += 1
        top = max(fwd, back)
        deviation = abs(fwd - back) / top if top > 0 else 0.0
        if deviation > threshold:
            exceeding += 1
    # pairs that only have the reverse direction
    uni += sum(1 for (a, b) in by_pair if a > b and (b, a) not in by_pair)
    used = bidi + uni
    return AsymmetryStats(
        threshold=threshold,
        asymmetric_fraction=exceeding / bidi if bidi else 0.0,
        unidirectional_share=uni / used if used else 0.0,
        bidirectional_pairs=bidi,
        unidirectional_pairs=uni,
    )
