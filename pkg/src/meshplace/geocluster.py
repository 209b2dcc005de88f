"""Geographic clustering: planar projection plus seeded naive k-means.

Phase one of the placement heuristic groups routers by location. The
k-means runs on an equirectangular projection in meters so that Euclidean
distance is physically meaningful; at city scale (a few km) the projection
error is far below typical inter-router spacing.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

EARTH_RADIUS_M = 6_371_000.0

DEFAULT_MAX_ITER = 100


@dataclass(frozen=True)
class Partition:
    """Assignment of every point to one of k non-empty clusters."""

    k: int
    labels: tuple[int, ...]
    centroids: tuple[tuple[float, ...], ...]
    wcss: float
    n_iter: int

    def members(self, cluster: int) -> list[int]:
        return [i for i, c in enumerate(self.labels) if c == cluster]

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "labels": list(self.labels),
            "centroids": [list(c) for c in self.centroids],
            "wcss": self.wcss,
            "n_iter": self.n_iter,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"


def project(latlon) -> np.ndarray:
    """Project (lat, lon) degrees to planar (x, y) meters.

    Equirectangular projection about the centroid of the input: x along
    longitude scaled by cos(centroid latitude), y along latitude. Euclidean
    distance on the output approximates great-circle distance for
    city-scale extents.
    """
    pts = np.asarray(latlon, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2 or len(pts) == 0:
        raise ValueError("expected a non-empty (n, 2) array of (lat, lon)")
    center = pts.mean(axis=0)
    lat0 = np.radians(center[0])
    x = EARTH_RADIUS_M * np.radians(pts[:, 1] - center[1]) * np.cos(lat0)
    y = EARTH_RADIUS_M * np.radians(pts[:, 0] - center[0])
    return np.column_stack([x, y])


def _repair_empty_clusters(
    points: np.ndarray, labels: np.ndarray, centroids: np.ndarray, k: int
) -> np.ndarray:
    """Give every empty cluster the point farthest from its stale centroid.

    Only points whose donor cluster keeps at least one member are eligible,
    so no repair empties another cluster. Ties pick the lowest point index.
    """
    counts = np.bincount(labels, minlength=k)
    for c in np.flatnonzero(counts == 0):
        dist2 = ((points - centroids[c]) ** 2).sum(axis=1)
        eligible = counts[labels] >= 2
        dist2 = np.where(eligible, dist2, -1.0)
        donor = int(np.argmax(dist2))
        if dist2[donor] < 0:
            raise AssertionError("no eligible donor point; requires k <= n")
        counts[labels[donor]] -= 1
        labels[donor] = c
        counts[c] = 1
    return labels


def kmeans(points, k: int, seed: int, max_iter: int = DEFAULT_MAX_ITER) -> Partition:
    """Naive Lloyd k-means with seeded random initial centroids.

    Initial centroids are k points drawn without replacement from the
    input. Each iteration assigns every point to its nearest centroid
    (distance ties go to the lowest cluster index), repairs any empty
    cluster, then recomputes centroids as cluster means. Stops when the
    assignment reaches a fixed point or after ``max_iter`` iterations.
    The within-cluster sum of squares never increases across iterations.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or len(pts) == 0:
        raise ValueError("expected a non-empty (n, d) point array")
    n = len(pts)
    if not 1 <= k <= n:
        raise ValueError(f"k must be in [1, {n}], got {k}")
    if max_iter < 1:
        raise ValueError(f"max_iter must be >= 1, got {max_iter}")

    rng = np.random.default_rng(seed)
    centroids = pts[rng.choice(n, size=k, replace=False)].copy()
    labels: np.ndarray | None = None
    n_iter = 0
    for n_iter in range(1, max_iter + 1):
        dist2 = ((pts[:, None, :] - centroids[None, :, :]) ** 2).sum(axis=2)
        new_labels = dist2.argmin(axis=1)
        new_labels = _repair_empty_clusters(pts, new_labels, centroids, k)
        if labels is not None and np.array_equal(new_labels, labels):
            break
        labels = new_labels
        centroids = np.vstack([pts[labels == c].mean(axis=0) for c in range(k)])
    assert labels is not None
    wcss = float(((pts - centroids[labels]) ** 2).sum())
    return Partition(
        k=k,
        labels=tuple(int(c) for c in labels),
        centroids=tuple(tuple(float(v) for v in row) for row in centroids),
        wcss=wcss,
        n_iter=n_iter,
    )
