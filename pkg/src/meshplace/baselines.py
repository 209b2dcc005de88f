"""Comparison strategies: naive k-means, random heads, exact brute force.

The naive baseline is bandwidth-blind by construction: it clusters by
geography and crowns the node nearest each centroid. The random baseline
models organic placement where heads are picked with no network insight.
The brute-force oracle enumerates every head set and is exact for the
separable objective; a Stirling counter documents why enumerating full
partitions instead would be hopeless.
"""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass

import numpy as np

from meshplace.geocluster import Partition, kmeans, project
from meshplace.netgraph import NetworkGraph
from meshplace.placement import (
    DEFAULT_REPETITIONS,
    Placement,
    PlacementReport,
    make_report,
    recompute_clusters,
)
from meshplace.seeds import derive_seed

_ORACLE_CHUNK = 4096


class OracleBudgetError(RuntimeError):
    """Raised when the brute-force oracle refuses or exceeds its budget."""


@dataclass(frozen=True)
class OracleBudget:
    """Enumeration limits for the brute-force oracle."""

    max_combinations: int = 10_000_000
    max_seconds: float = 600.0

    def __post_init__(self) -> None:
        if self.max_combinations <= 0:
            raise ValueError(f"max_combinations must be positive, got {self.max_combinations}")
        if self.max_seconds <= 0:
            raise ValueError(f"max_seconds must be positive, got {self.max_seconds}")


def naive_placement_from_partition(g: NetworkGraph, part: Partition) -> Placement:
    """Head of each cluster is the member nearest its centroid (planar).

    Assignment is the k-means assignment unchanged; distance ties break to
    the lowest node id.
    """
    points = project(g.latlon())
    centroids = np.asarray(part.centroids)
    heads = []
    for c in range(part.k):
        members = part.members(c)
        if not members:
            raise ValueError(f"cluster {c} is empty")
        dist2 = ((points[members] - centroids[c]) ** 2).sum(axis=1)
        heads.append(members[int(np.argmin(dist2))])
    return Placement(heads=tuple(heads), assignment=tuple(part.labels))


def naive_kmeans_placement(
    g: NetworkGraph,
    k: int,
    seed: int,
    repetitions: int = DEFAULT_REPETITIONS,
) -> PlacementReport:
    """Bandwidth-blind baseline: geographic k-means, centroid-nearest heads.

    Best of ``repetitions`` by lowest within-cluster sum of squares (never
    by bandwidth). Child seeds are derived exactly as in the bandwidth-aware
    strategy, so runs sharing a parent seed see the same k-means inits.
    """
    if not 1 <= k <= g.n:
        raise ValueError(f"k must be in [1, {g.n}], got {k}")
    if repetitions < 1:
        raise ValueError(f"repetitions must be >= 1, got {repetitions}")
    t0 = time.perf_counter()
    points = project(g.latlon())
    best_part: Partition | None = None
    best_rep = -1
    rep_wcss: list[float] = []
    for rep in range(repetitions):
        part = kmeans(points, k, derive_seed(seed, rep))
        rep_wcss.append(part.wcss)
        if best_part is None or part.wcss < best_part.wcss:
            best_part, best_rep = part, rep
    assert best_part is not None
    placed = naive_placement_from_partition(g, best_part)
    runtime = time.perf_counter() - t0
    extras = {
        "repetitions": repetitions,
        "best_repetition": best_rep,
        "rep_wcss": rep_wcss,
        "wcss": best_part.wcss,
        "partition": best_part.to_dict(),
    }
    return make_report(g, placed, "naive", seed, runtime, extras)


def random_placement(
    g: NetworkGraph,
    k: int,
    seed: int,
    assignment_rule: str = "bandwidth",
) -> PlacementReport:
    """k heads drawn uniformly without replacement, then assignment.

    The default "bandwidth" rule gives every node its best head, which is
    the strongest reasonable random baseline (reported gains over it are
    conservative). The "geo" rule assigns by planar nearest head instead,
    for sensitivity analysis.
    """
    if not 1 <= k <= g.n:
        raise ValueError(f"k must be in [1, {g.n}], got {k}")
    if assignment_rule not in ("bandwidth", "geo"):
        raise ValueError(f"unknown assignment rule {assignment_rule!r}")
    t0 = time.perf_counter()
    rng = np.random.default_rng(seed)
    heads = sorted(int(h) for h in rng.choice(g.n, size=k, replace=False))
    if assignment_rule == "bandwidth":
        placed = recompute_clusters(g, heads)
    else:
        points = project(g.latlon())
        dist2 = ((points[None, :, :] - points[heads][:, None, :]) ** 2).sum(axis=2)
        assignment = np.argmin(dist2, axis=0)
        for idx, h in enumerate(heads):
            assignment[h] = idx
        placed = Placement(heads=tuple(heads), assignment=tuple(int(a) for a in assignment))
    runtime = time.perf_counter() - t0
    return make_report(g, placed, "random", seed, runtime, {"assignment_rule": assignment_rule})


def brute_force_optimal(
    g: NetworkGraph,
    k: int,
    budget: OracleBudget | None = None,
) -> PlacementReport:
    """Exact optimum by enumerating all C(n, k) head sets.

    For a fixed head set the objective is separable per node, so assigning
    every node to its best head is optimal; enumerating head sets therefore
    reaches the global optimum without touching the (vastly larger) space
    of full partitions. Ties keep the lexicographically smallest head set.

    Raises OracleBudgetError if C(n, k) exceeds the combination budget or
    the wall-clock cap is exceeded mid-enumeration.
    """
    if not 1 <= k <= g.n:
        raise ValueError(f"k must be in [1, {g.n}], got {k}")
    budget = budget or OracleBudget()
    combinations = math.comb(g.n, k)
    if combinations > budget.max_combinations:
        raise OracleBudgetError(
            f"C({g.n},{k}) = {combinations:,} head sets exceeds the oracle budget "
            f"of {budget.max_combinations:,} combinations"
        )
    t0 = time.perf_counter()
    deadline = t0 + budget.max_seconds
    bw = g.bandwidth_matrix
    node_idx = np.arange(g.n)
    best_score = -float("inf")
    best_heads: tuple[int, ...] | None = None
    combo_iter = itertools.combinations(range(g.n), k)
    while True:
        chunk = list(itertools.islice(combo_iter, _ORACLE_CHUNK))
        if not chunk:
            break
        if time.perf_counter() > deadline:
            raise OracleBudgetError(
                f"oracle exceeded its wall-clock budget of {budget.max_seconds} s "
                f"while enumerating C({g.n},{k}) = {combinations:,} head sets"
            )
        idx = np.array(chunk)
        col_max = bw[idx].max(axis=1)
        np.put_along_axis(col_max, idx, 0.0, axis=1)
        scores = col_max.sum(axis=1)
        local = int(np.argmax(scores))
        if scores[local] > best_score:
            best_score = float(scores[local])
            best_heads = chunk[local]
    assert best_heads is not None
    placed = recompute_clusters(g, list(best_heads))
    runtime = time.perf_counter() - t0
    extras = {"combinations": combinations, "max_combinations": budget.max_combinations}
    return make_report(g, placed, "optimal", None, runtime, extras)


def stirling2(n: int, k: int) -> int:
    """Stirling number of the second kind: partitions of an n-set into k
    non-empty blocks, via S(n,k) = k*S(n-1,k) + S(n-1,k-1) in exact integer
    arithmetic."""
    if n < 0 or k < 0:
        raise ValueError(f"n and k must be non-negative, got n={n}, k={k}")
    row = [1] + [0] * k
    for _ in range(n):
        new = [0] * (k + 1)
        for j in range(1, k + 1):
            new[j] = j * row[j] + row[j - 1]
        row = new
    return row[k]
