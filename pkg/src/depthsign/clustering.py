"""Two-means clustering of hand pixels in image space.

Lloyd iterations with K=2 separate the signer's hands. When the two centroids
end up closer than ``merge_distance`` the frame is treated as one hand.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

_ASSIGN_CHUNK = 8192


@dataclass(frozen=True)
class ClusterConfig:
    merge_distance: float = 80.0
    max_iterations: int = 100
    init: str = "extreme"        # "extreme" | "random"
    random_state: int | None = None
    n_jobs: int = 1

    def __post_init__(self):
        if not self.merge_distance > 0:
            raise ValueError("merge_distance must be > 0")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if self.init not in ("extreme", "random"):
            raise ValueError(f"unknown init {self.init!r}")
        if self.n_jobs < 1:
            raise ValueError("n_jobs must be >= 1")


@dataclass(eq=False)
class HandCluster:
    pixels: np.ndarray          # (n, 2) int (x, y)
    centroid: tuple
    side: str = "only"          # "left" | "right" | "only"

    def __len__(self):
        return len(self.pixels)


@dataclass(eq=False)
class ClusterResult:
    """Output of :func:`kmeans_two` plus diagnostics."""

    clusters: list
    iterations: int
    converged: bool
    merged: bool
    objective: list = field(default_factory=list)

    def __iter__(self):
        return iter(self.clusters)

    def __len__(self):
        return len(self.clusters)

    def __getitem__(self, i):
        return self.clusters[i]


def _as_points(mask_or_points) -> np.ndarray:
    pixels = getattr(mask_or_points, "pixels", mask_or_points)
    pts = np.asarray(pixels)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ValueError(f"expected (n, 2) pixel coordinates, got shape {pts.shape}")
    if len(pts) == 0:
        raise ValueError("cannot cluster an empty pixel set")
    return pts.astype(np.int64, copy=False)


_CENTROID_BITS = 32


def pixel_centroid(pixels) -> tuple:
    """Mean of integer ``(x, y)`` pixels, rounded to a 2**-32 grid.

    Done in exact integer arithmetic, so shifting the pixels by an integer
    offset shifts the result by exactly that offset.
    """
    pts = np.asarray(pixels, dtype=np.int64)
    n = len(pts)
    if n == 0:
        raise ValueError("centroid of an empty pixel set")
    sums = pts.sum(axis=0).tolist()
    return tuple(((v << _CENTROID_BITS) + n // 2) // n / 2 ** _CENTROID_BITS for v in sums)


def init_centroids(mask) -> tuple:
    """Seed with the leftmost and rightmost pixels (ties: smallest y)."""
    pts = _as_points(mask)
    x, y = pts[:, 0], pts[:, 1]
    lo = np.lexsort((y, x))[0]
    hi = np.lexsort((y, -x))[0]
    return tuple(int(v) for v in pts[lo]), tuple(int(v) for v in pts[hi])


def _random_centroids(pts, random_state):
    rng = np.random.default_rng(random_state)
    i, j = rng.choice(len(pts), size=2, replace=len(pts) < 2)
    return tuple(pts[i].tolist()), tuple(pts[j].tolist())


def _assign(xs, ys, c, out):
    # squared distances to each centroid; ties go to centroid 0
    d0 = (xs - c[0, 0]) ** 2
    d0 += (ys - c[0, 1]) ** 2
    d1 = (xs - c[1, 0]) ** 2
    d1 += (ys - c[1, 1]) ** 2
    np.less(d1, d0, out=out)


def _assign_all(xs, ys, c, labels, pool):
    if pool is None:
        _assign(xs, ys, c, labels)
        return
    futures = [
        pool.submit(
            _assign,
            xs[s:s + _ASSIGN_CHUNK],
            ys[s:s + _ASSIGN_CHUNK],
            c,
            labels[s:s + _ASSIGN_CHUNK],
        )
        for s in range(0, len(xs), _ASSIGN_CHUNK)
    ]
    for f in futures:
        f.result()


def _centroids(xs, ys, totals, labels, counts):
    # coordinates are integers held in float64: every partial sum is exact, so
    # the result does not depend on summation order or chunking
    w = labels.view(np.uint8)
    s1 = np.array([np.dot(w, xs), np.dot(w, ys)], dtype=float)
    sums = np.vstack((totals - s1, s1))
    return sums / np.maximum(counts, 1)[:, None]


def _objective(xs, ys, labels, c):
    lab = labels.astype(np.intp)
    return float(np.sum((xs - c[lab, 0]) ** 2 + (ys - c[lab, 1]) ** 2))


def kmeans_two(mask, config: ClusterConfig | None = None, track_objective=False) -> ClusterResult:
    """Split hand pixels into one or two clusters.

    ``mask`` is a :class:`HandMask` or an ``(n, 2)`` array of ``(x, y)``.
    Iteration stops once no pixel changes membership or after
    ``config.max_iterations`` passes; in the latter case ``converged`` is
    False but the last partition is still returned. With
    ``track_objective`` the within-cluster sum of squares after every
    assignment step is recorded in ``objective``.
    """
    config = config or ClusterConfig()
    pts = _as_points(mask)
    n = len(pts)

    if config.init == "random":
        seeds = _random_centroids(pts, config.random_state)
    else:
        seeds = init_centroids(pts)
    c = np.array(seeds, dtype=float)

    workers = min(config.n_jobs, os.cpu_count() or 1)
    pool = ThreadPoolExecutor(workers) if workers > 1 and n > 2 * _ASSIGN_CHUNK else None

    xs = np.ascontiguousarray(pts[:, 0], dtype=float)
    ys = np.ascontiguousarray(pts[:, 1], dtype=float)
    totals = np.array([xs.sum(), ys.sum()])

    labels = np.zeros(n, dtype=bool)
    new = np.empty(n, dtype=bool)
    objective = []
    converged = False
    iterations = 0
    try:
        for it in range(config.max_iterations):
            _assign_all(xs, ys, c, new, pool)
            iterations = it + 1
            if track_objective:
                objective.append(_objective(xs, ys, new, c))
            if it > 0 and np.array_equal(new, labels):
                converged = True
                break
            labels, new = new, labels
            counts = np.array([n - np.count_nonzero(labels), np.count_nonzero(labels)])
            if counts.min() == 0:
                break
            c = _centroids(xs, ys, totals, labels, counts)
    finally:
        if pool is not None:
            pool.shutdown()

    counts = np.array([n - np.count_nonzero(labels), np.count_nonzero(labels)])
    merged = bool(counts.min() == 0)
    if not merged:
        parts = [HandCluster(p, pixel_centroid(p)) for p in (pts[~labels], pts[labels])]
        gap = np.hypot(parts[0].centroid[0] - parts[1].centroid[0],
                       parts[0].centroid[1] - parts[1].centroid[1])
        merged = bool(gap < config.merge_distance)

    if merged:
        clusters = [HandCluster(pts, pixel_centroid(pts), "only")]
    else:
        parts.sort(key=lambda h: h.centroid[0])
        parts[0].side, parts[1].side = "left", "right"
        clusters = parts
    return ClusterResult(clusters, iterations, converged, merged, objective)
