"""End-to-end recognition with per-stage timing, benchmarking and evaluation."""

from __future__ import annotations

import atexit
import csv
import io
import math
import statistics
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from time import perf_counter

import numpy as np

from .classify import HandMatch, TemplateSet, classify_hand, combine
from .clustering import ClusterConfig, kmeans_two
from .config import RunConfig, normalize_mode
from .contour import equal_angle_sample, trace_contour
from .descriptors import centroid_distance_signature, descriptor
from .errors import DepthSignError
from .segmentation import (
    apply_body_mask,
    build_histogram,
    find_nearest_object,
    segment_hands,
)

SEGMENTATION = "Hand Segmentation"
KMEANS = "K-Means Calculation"
TRACING = "Hand Contour Tracing"
NORMALIZE = "Normalize Image (128 points)"
SIGNATURE = "Centroid Distance Signature"
FOURIER = "Discrete Fourier Description"
CLASSIFICATION = "Gesture Classification"

STAGE_NAMES = (SEGMENTATION, KMEANS, TRACING, NORMALIZE, SIGNATURE, FOURIER, CLASSIFICATION)
PER_HAND_STAGES = STAGE_NAMES[2:]

REALTIME_FPS = 30

_pool = None
_pool_lock = threading.Lock()


def _executor():
    global _pool
    with _pool_lock:
        if _pool is None:
            _pool = ThreadPoolExecutor(max_workers=4, thread_name_prefix="hand")
            atexit.register(_pool.shutdown)
        return _pool


def _ms(t0, t1):
    return (t1 - t0) * 1000.0


def round_half_up(x) -> int:
    return int(math.floor(x + 0.5))


@dataclass
class StageTimings:
    """Per-stage wall-clock milliseconds, in pipeline order.

    ``total`` is end-to-end wall clock. For a benchmark, stages and total are
    means over ``runs`` and ``totals`` keeps every run's total.
    """

    stages: dict
    total: float
    mode: str = "sequential"
    runs: int = 1
    totals: tuple = ()

    @property
    def fps(self) -> int:
        return int(1000.0 / self.total) if self.total > 0 else 0

    @property
    def fps_rounded(self) -> int:
        return round_half_up(1000.0 / self.total) if self.total > 0 else 0

    @property
    def median_total(self) -> float:
        return statistics.median(self.totals) if self.totals else self.total

    def table(self) -> str:
        width = max(len(s) for s in STAGE_NAMES) + 4
        lines = [f"{'Processes':<{width}}Time in milliseconds"]
        lines += [f"{name:<{width}}{self.stages[name]:.4f}" for name in STAGE_NAMES]
        lines.append(f"{'Total':<{width}}{self.total:.4f}")
        lines.append(f"{'FPS':<{width}}{self.fps} (rounded {self.fps_rounded})")
        verdict = "met" if self.fps >= REALTIME_FPS else "NOT met"
        lines.append(f"{'Real-time line':<{width}}{REALTIME_FPS} FPS {verdict}")
        return "\n".join(lines)


@dataclass
class HandOutcome:
    side: str
    centroid: tuple
    descriptor: object
    match: HandMatch | None
    timings: dict


def _cluster_config(cfg: RunConfig, mode):
    return ClusterConfig(
        merge_distance=cfg.merge_distance,
        max_iterations=cfg.max_iterations,
        init=cfg.kmeans_init,
        random_state=cfg.seed,
        n_jobs=2 if mode == "parallel" else 1,
    )


def _hand_chain(cluster, templates, cfg):
    t = {}
    t0 = perf_counter()
    contour = trace_contour(cluster)
    t1 = perf_counter()
    boundary = equal_angle_sample(contour, cluster.centroid, cfg.sample_count)
    t2 = perf_counter()
    signature = centroid_distance_signature(boundary)
    t3 = perf_counter()
    desc = descriptor(signature, cfg.coefficient_count)
    t4 = perf_counter()
    match = None
    if templates is not None:
        label, dist = classify_hand(desc, templates, cfg.max_distance)
        match = HandMatch(label, dist, cluster.side)
    t5 = perf_counter()
    t[TRACING], t[NORMALIZE], t[SIGNATURE] = _ms(t0, t1), _ms(t1, t2), _ms(t2, t3)
    t[FOURIER], t[CLASSIFICATION] = _ms(t3, t4), _ms(t4, t5)
    return HandOutcome(cluster.side, cluster.centroid, desc, match, t)


def run_stages(frame, templates=None, mode="sequential", config=None, body_mask=None):
    """Run every stage on ``frame``; classification is skipped without templates.

    Returns ``(outcomes, timings)`` with one :class:`HandOutcome` per hand,
    left to right.
    """
    cfg = config or RunConfig()
    mode = normalize_mode(mode)
    stages = dict.fromkeys(STAGE_NAMES, 0.0)

    start = perf_counter()
    if body_mask is not None:
        frame = apply_body_mask(frame, body_mask)
    hist = build_histogram(frame)
    d0 = find_nearest_object(hist, cfg.min_object_size, cfg.noise_window)
    mask = segment_hands(frame, d0, cfg.threshold, cfg.min_object_size)
    t_seg = perf_counter()
    clusters = kmeans_two(mask, _cluster_config(cfg, mode)).clusters
    t_km = perf_counter()
    stages[SEGMENTATION] = _ms(start, t_seg)
    stages[KMEANS] = _ms(t_seg, t_km)

    if mode == "parallel" and len(clusters) == 2:
        other = _executor().submit(_hand_chain, clusters[1], templates, cfg)
        try:
            first = _hand_chain(clusters[0], templates, cfg)
        finally:
            second = other.result()
        outcomes = [first, second]
        for name in PER_HAND_STAGES:
            # the slower hand sets the critical path
            stages[name] = max(first.timings[name], second.timings[name])
    else:
        outcomes = [_hand_chain(c, templates, cfg) for c in clusters]
        for name in PER_HAND_STAGES:
            stages[name] = sum(o.timings[name] for o in outcomes)
    total = _ms(start, perf_counter())
    return outcomes, StageTimings(stages, total, mode)


def recognize(frame, templates: TemplateSet, mode="sequential", config=None, body_mask=None):
    """Recognise the number shown in ``frame``.

    Returns ``(RecognitionResult, StageTimings)``. Both modes produce the same
    result; in parallel mode the two per-hand chains run concurrently.
    """
    outcomes, timings = run_stages(frame, templates, mode, config, body_mask)
    return combine(o.match for o in outcomes), timings


def describe_frame(frame, config=None, body_mask=None):
    """Per-hand ``(side, FourierDescriptor)`` pairs, left to right."""
    outcomes, _ = run_stages(frame, None, "sequential", config, body_mask)
    return [(o.side, o.descriptor) for o in outcomes]


def benchmark(frame, templates, runs=50, mode="sequential", config=None, warmup=1) -> StageTimings:
    """Mean per-stage timings over ``runs`` calls of :func:`recognize`."""
    if runs < 1:
        raise ValueError("runs must be >= 1")
    mode = normalize_mode(mode)
    for _ in range(warmup):
        recognize(frame, templates, mode, config)
    samples = [recognize(frame, templates, mode, config)[1] for _ in range(runs)]
    stages = {name: statistics.fmean(s.stages[name] for s in samples) for name in STAGE_NAMES}
    totals = tuple(s.total for s in samples)
    return StageTimings(stages, statistics.fmean(totals), mode, runs, totals)


# --------------------------------------------------------------------------
# evaluation

NUMBERS = tuple(range(1, 11))


@dataclass
class EvalReport:
    """Confusion counts over numbers 1..10 (rows truth, columns predicted).

    Frames that raised a stage error are tallied in ``errors`` by truth row
    and count as misses; ``failures`` keeps their messages.
    """

    confusion: np.ndarray = field(default_factory=lambda: np.zeros((10, 10), dtype=np.int64))
    errors: np.ndarray = field(default_factory=lambda: np.zeros(10, dtype=np.int64))
    failures: list = field(default_factory=list)

    def add(self, truth, predicted=None, error=None):
        if predicted is None:
            self.errors[truth - 1] += 1
            if error is not None:
                self.failures.append((truth, error))
        else:
            self.confusion[truth - 1, predicted - 1] += 1

    @property
    def counts(self) -> np.ndarray:
        return self.confusion.sum(axis=1) + self.errors

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    @property
    def accuracy(self) -> float:
        return float(np.trace(self.confusion)) / self.total if self.total else 0.0

    def rates(self):
        """``(number, true %, false %)`` for every number with test frames."""
        out = []
        for n in NUMBERS:
            count = self.counts[n - 1]
            if count:
                hit = 100.0 * self.confusion[n - 1, n - 1] / count
                out.append((n, hit, 100.0 - hit))
        return out

    def table(self) -> str:
        lines = [f"{'Number Gesture':<16}{'True Recognition':<18}False Recognition"]
        for n, hit, _ in self.rates():
            pct = round_half_up(hit)
            lines.append(f"{n:<16}{str(pct) + '%':<18}{100 - pct}%")
        acc = round_half_up(100.0 * self.accuracy)
        lines.append(f"{'Average':<16}{str(acc) + '%':<18}{100 - acc}%")
        if self.errors.any():
            lines.append(f"stage errors: {int(self.errors.sum())} "
                         f"(per number: {self.errors.tolist()})")
        return "\n".join(lines)

    def confusion_text(self) -> str:
        lines = ["\t" + "\t".join(str(n) for n in NUMBERS)]
        for n in NUMBERS:
            lines.append(f"{n}\t" + "\t".join(str(v) for v in self.confusion[n - 1]))
        return "\n".join(lines)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["truth"] + [str(n) for n in NUMBERS])
        for n in NUMBERS:
            w.writerow([n] + self.confusion[n - 1].tolist())
        return buf.getvalue()


def evaluate(test_frames, templates, config=None, mode="sequential") -> EvalReport:
    """Classify ``(frame, number)`` pairs and accumulate an :class:`EvalReport`."""
    items = list(test_frames)
    if not items:
        raise ValueError("no test frames")
    report = EvalReport()
    for frame, truth in items:
        try:
            result, _ = recognize(frame, templates, mode, config)
        except DepthSignError as exc:
            report.add(truth, error=f"{exc.stage or 'pipeline'}: {exc}")
            continue
        report.add(truth, result.number)
    return report
