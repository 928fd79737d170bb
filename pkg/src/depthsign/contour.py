"""Outer-boundary tracing and equal-angle resampling around the centroid."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit
from scipy import ndimage

from .errors import AllBinsEmpty, DegenerateShape, RegionTooSmall

MIN_REGION = 8
DEFAULT_SAMPLES = 128

# Moore neighbourhood in clockwise screen order (y grows downwards),
# starting west: W, NW, N, NE, E, SE, S, SW.
_DX = np.array([-1, -1, 0, 1, 1, 1, 0, -1], dtype=np.int64)
_DY = np.array([0, -1, -1, -1, 0, 1, 1, 1], dtype=np.int64)
# (dy + 1) * 3 + (dx + 1) -> direction index; centre is unused
_DIR_OF = np.array([1, 2, 3, 0, -1, 4, 7, 6, 5], dtype=np.int64)

_EIGHT = np.ones((3, 3), dtype=bool)


@dataclass(eq=False)
class Contour:
    """Traced outer boundary of a pixel region.

    ``path`` is the closed clockwise walk produced by the tracer, starting at
    the topmost-leftmost pixel; one-pixel-wide spurs are walked out and back,
    so pixels may repeat. ``points`` lists each boundary pixel once, in
    first-visit order.
    """

    path: np.ndarray
    points: np.ndarray

    def __len__(self):
        return len(self.points)


@dataclass(eq=False)
class SampledBoundary:
    radii: np.ndarray
    centroid: tuple
    occupied: np.ndarray    # bool per bin, False where the radius was interpolated

    @property
    def count(self) -> int:
        return len(self.radii)


@njit(cache=True, nogil=True)
def _moore_walk(grid, sy, sx, dx, dy, dir_of, max_steps):
    out = np.empty((max_steps + 1, 2), dtype=np.int64)
    out[0, 0] = sx
    out[0, 1] = sy
    n = 1
    y = sy
    x = sx
    back = 0            # the west neighbour of the start pixel is background
    first = -1
    for step in range(max_steps):
        found = -1
        for i in range(1, 9):
            d = (back + i) % 8
            if grid[y + dy[d], x + dx[d]]:
                found = d
                break
        if found < 0:   # isolated pixel
            break
        if step == 0:
            first = found
        elif y == sy and x == sx and found == first:
            # Jacob's criterion: the start is left the same way as initially,
            # so the walk would repeat from here
            break
        prev = (found + 7) % 8
        by = y + dy[prev]
        bx = x + dx[prev]
        y += dy[found]
        x += dx[found]
        back = dir_of[(by - y + 1) * 3 + (bx - x + 1)]
        out[n, 0] = x
        out[n, 1] = y
        n += 1
    if n > 1 and out[n - 1, 0] == sx and out[n - 1, 1] == sy:
        n -= 1
    return out[:n]


def _largest_region(grid):
    labels, count = ndimage.label(grid, structure=_EIGHT)
    if count <= 1:
        return grid
    sizes = np.bincount(labels.ravel())
    sizes[0] = 0
    return labels == int(np.argmax(sizes))


def trace_contour(cluster) -> Contour:
    """Moore-neighbour trace of the outer boundary, 8-connectivity.

    ``cluster`` is a :class:`HandCluster` or an ``(n, 2)`` array of
    ``(x, y)`` pixels. Only the largest 8-connected region is traced and
    interior holes are ignored.
    """
    pixels = np.asarray(getattr(cluster, "pixels", cluster))
    if len(pixels) < MIN_REGION:
        raise RegionTooSmall(f"region has {len(pixels)} pixels, need {MIN_REGION}")
    x0, y0 = pixels.min(axis=0)
    x1, y1 = pixels.max(axis=0)
    # one pixel of background padding on each side
    grid = np.zeros((y1 - y0 + 3, x1 - x0 + 3), dtype=np.bool_)
    grid[pixels[:, 1] - y0 + 1, pixels[:, 0] - x0 + 1] = True
    grid = _largest_region(grid)

    rows = np.flatnonzero(grid.any(axis=1))
    sy = int(rows[0])
    sx = int(np.flatnonzero(grid[sy])[0])
    max_steps = 4 * int(np.count_nonzero(grid)) + 8
    walk = _moore_walk(grid, sy, sx, _DX, _DY, _DIR_OF, max_steps)

    walk = walk + np.array([x0 - 1, y0 - 1])
    _, first = np.unique(walk[:, 0] * (grid.shape[0] + y0) + walk[:, 1], return_index=True)
    points = walk[np.sort(first)]
    return Contour(walk, points)


def is_power_of_two(n) -> bool:
    n = int(n)
    return n >= 1 and n & (n - 1) == 0


def equal_angle_sample(contour, centroid, n=DEFAULT_SAMPLES) -> SampledBoundary:
    """Resample a boundary into ``n`` radii at equal angular steps.

    Each contour pixel lands in bin ``floor(angle / (2*pi/n))`` of its polar
    angle about ``centroid``; a bin keeps the largest radius it receives.
    Bins that receive no pixel are filled by circular linear interpolation
    between the nearest occupied bins.
    """
    if not is_power_of_two(n):
        raise ValueError(f"sample count must be a power of two, got {n}")
    pts = np.asarray(getattr(contour, "points", contour), dtype=float)
    if pts.ndim != 2 or len(pts) == 0:
        raise AllBinsEmpty("contour has no points")
    xc, yc = float(centroid[0]), float(centroid[1])
    dx = pts[:, 0] - xc
    dy = pts[:, 1] - yc
    radius = np.hypot(dx, dy)
    if not np.any(radius > 0):
        raise DegenerateShape("every contour point coincides with the centroid")

    angle = np.mod(np.arctan2(dy, dx), 2 * np.pi)
    bins = np.floor(angle / (2 * np.pi / n)).astype(np.intp) % n

    radii = np.full(n, -np.inf)
    np.maximum.at(radii, bins, radius)
    occupied = np.isfinite(radii)
    if not occupied.any():
        raise AllBinsEmpty("no contour point fell into any angular bin")
    if not occupied.all():
        k = np.flatnonzero(occupied)
        radii[~occupied] = np.interp(
            np.flatnonzero(~occupied), k, radii[k], period=n
        )
    return SampledBoundary(radii, (xc, yc), occupied)


def write_contour_overlay(contours, width, height, path, maxval=4095):
    """Write a PGM with every contour pixel at ``maxval`` for inspection."""
    from .frames import DepthFrame, write_frame

    img = np.zeros((height, width), dtype=np.uint16)
    for c in contours:
        pts = np.asarray(getattr(c, "points", c))
        img[pts[:, 1], pts[:, 0]] = maxval
    write_frame(DepthFrame(img), path, "pgm")
