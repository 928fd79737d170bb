"""Depth-histogram hand segmentation.

The nearest object in front of the sensor is located on the per-layer pixel
histogram, then every pixel within a fixed depth band behind it is kept.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import NoObject, TooFewPixels
from .frames import MAX_DEPTH, DepthFrame

N_LAYERS = MAX_DEPTH + 1

DEFAULT_THRESHOLD = 150
DEFAULT_NOISE_WINDOW = 16
DEFAULT_MIN_OBJECT_SIZE = 400


@dataclass(frozen=True, eq=False)
class DepthHistogram:
    bins: np.ndarray

    def __post_init__(self):
        if self.bins.shape != (N_LAYERS,):
            raise ValueError(f"histogram must have {N_LAYERS} bins")

    @property
    def total(self) -> int:
        return int(self.bins.sum())


@dataclass(frozen=True, eq=False)
class HandMask:
    """Pixels inside the depth band ``[near_depth, far_depth]``."""

    mask: np.ndarray
    near_depth: int
    far_depth: int

    @property
    def width(self) -> int:
        return self.mask.shape[1]

    @property
    def height(self) -> int:
        return self.mask.shape[0]

    @property
    def pixels(self) -> np.ndarray:
        """Member coordinates as an ``(n, 2)`` array of ``(x, y)``, raster order."""
        ys, xs = np.nonzero(self.mask)
        return np.column_stack((xs, ys))

    def __len__(self):
        return int(np.count_nonzero(self.mask))


def apply_body_mask(frame: DepthFrame, body_mask) -> DepthFrame:
    """Zero every pixel outside ``body_mask`` before histogramming.

    Stands in for skeleton-gated segmentation: anything not flagged as part
    of the user's body is treated as "no reading".
    """
    body_mask = np.asarray(body_mask, dtype=bool)
    if body_mask.shape != frame.depths.shape:
        raise ValueError(
            f"body mask shape {body_mask.shape} != frame shape {frame.depths.shape}"
        )
    return DepthFrame(np.where(body_mask, frame.depths, 0).astype(np.uint16))


def build_histogram(frame: DepthFrame) -> DepthHistogram:
    bins = np.bincount(frame.depths.ravel(), minlength=N_LAYERS).astype(np.int64)
    bins[0] = 0
    return DepthHistogram(bins)


def find_nearest_object(
    hist: DepthHistogram,
    min_object_size=DEFAULT_MIN_OBJECT_SIZE,
    noise_window=DEFAULT_NOISE_WINDOW,
) -> int:
    """Return the first occupied layer that opens a dense enough window.

    A layer ``d`` qualifies when ``bins[d] > 0`` and the pixel count over
    ``[d, d + noise_window]`` reaches ``min_object_size``. Isolated speckle
    layers in front of the hands therefore never become the near plane.
    """
    bins = hist.bins
    csum = np.concatenate(([0], np.cumsum(bins)))
    d = np.arange(N_LAYERS)
    hi = np.minimum(d + noise_window + 1, N_LAYERS)
    window = csum[hi] - csum[d]
    hits = np.flatnonzero((bins > 0) & (window >= min_object_size))
    if hits.size == 0:
        raise NoObject(
            f"no depth window of {noise_window + 1} layers holds "
            f"{min_object_size} pixels"
        )
    return int(hits[0])


def segment_hands(
    frame: DepthFrame,
    d0: int,
    threshold=DEFAULT_THRESHOLD,
    min_object_size=DEFAULT_MIN_OBJECT_SIZE,
) -> HandMask:
    if threshold <= 0:
        raise ValueError("threshold must be positive")
    depths = frame.depths
    far = d0 + threshold
    mask = (depths >= d0) & (depths <= far)
    if d0 <= 0:
        mask &= depths > 0
    count = int(np.count_nonzero(mask))
    if count < min_object_size:
        raise TooFewPixels(
            f"only {count} pixels in depth band [{d0}, {far}], "
            f"need {min_object_size}"
        )
    return HandMask(mask, int(d0), int(far))


def write_histogram(hist: DepthHistogram, path):
    """Dump non-empty bins as ``layer count`` lines."""
    layers = np.flatnonzero(hist.bins)
    lines = [f"{d} {hist.bins[d]}\n" for d in layers]
    Path(path).write_text("".join(lines))
