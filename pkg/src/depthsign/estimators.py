"""scikit-learn compatible wrappers around the recognition pipeline.

``HandDescriptorExtractor`` turns hand pixel sets into descriptor rows,
``TemplateMatcher`` is the nearest-template classifier over those rows and
``NumberSignRecognizer`` runs the whole pipeline from depth frames to numbers.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .classify import LABELS, GestureTemplate, TemplateSet, classify_hand
from .clustering import pixel_centroid
from .config import RunConfig
from .contour import equal_angle_sample, is_power_of_two, trace_contour
from .descriptors import FourierDescriptor, centroid_distance_signature, descriptor
from .frames import DepthFrame
from .pipeline import describe_frame, recognize


def check_frame(frame) -> DepthFrame:
    """Accept a DepthFrame or a 2-D integer array of depth layers."""
    if isinstance(frame, DepthFrame):
        return frame
    arr = np.asarray(frame)
    if arr.ndim != 2:
        raise ValueError(f"a depth frame must be 2-D, got shape {arr.shape}")
    if not np.issubdtype(arr.dtype, np.integer):
        if not np.all(np.isfinite(arr)) or np.any(arr != np.round(arr)):
            raise ValueError("depth layers must be integers")
        arr = arr.astype(np.int64)
    return DepthFrame(arr)


def check_frames(X):
    if isinstance(X, (DepthFrame, np.ndarray)) and np.ndim(getattr(X, "depths", X)) == 2:
        raise ValueError("expected a sequence of frames, got a single frame")
    frames = [check_frame(f) for f in X]
    if not frames:
        raise ValueError("empty frame sequence")
    return frames


def check_descriptors(X, n_coefficients=None):
    X = check_array(X, dtype=float, ensure_min_samples=1)
    if n_coefficients is not None and X.shape[1] != n_coefficients:
        raise ValueError(f"expected {n_coefficients} coefficients per row, got {X.shape[1]}")
    if np.any(X < 0):
        raise ValueError("descriptor coefficients are magnitudes and cannot be negative")
    return X


def _hand_labels(y_i):
    labels = (y_i,) if np.isscalar(y_i) else tuple(y_i)
    if not 1 <= len(labels) <= 2:
        raise ValueError(f"expected one or two per-hand labels, got {y_i!r}")
    for label in labels:
        if int(label) not in LABELS:
            raise ValueError(f"per-hand labels must be in 1..5, got {label!r}")
    return tuple(int(v) for v in labels)


class HandDescriptorExtractor(TransformerMixin, BaseEstimator):
    """Map hand pixel sets to Fourier descriptor rows.

    Each sample is a ``HandCluster`` or an ``(n, 2)`` array of ``(x, y)``
    pixels; for plain arrays the centroid is the pixel mean
    (see :func:`~depthsign.clustering.pixel_centroid`).
    """

    def __init__(self, sample_count=128, coefficient_count=15):
        self.sample_count = sample_count
        self.coefficient_count = coefficient_count

    def fit(self, X=None, y=None):
        if not is_power_of_two(self.sample_count):
            raise ValueError("sample_count must be a power of two")
        if not 1 <= self.coefficient_count < self.sample_count // 2:
            raise ValueError("coefficient_count must be below sample_count / 2")
        self.n_features_out_ = self.coefficient_count
        return self

    def transform(self, X):
        check_is_fitted(self, "n_features_out_")
        rows = []
        for hand in X:
            pixels = np.asarray(getattr(hand, "pixels", hand))
            centroid = getattr(hand, "centroid", None)
            if centroid is None:
                centroid = pixel_centroid(pixels)
            boundary = equal_angle_sample(trace_contour(pixels), centroid, self.sample_count)
            signature = centroid_distance_signature(boundary)
            rows.append(descriptor(signature, self.coefficient_count).coefficients)
        return np.vstack(rows) if rows else np.empty((0, self.coefficient_count))

    def get_feature_names_out(self, input_features=None):
        return np.array([f"fd{k}" for k in range(1, self.coefficient_count + 1)], dtype=object)


class TemplateMatcher(ClassifierMixin, BaseEstimator):
    """1-nearest-template classifier under Euclidean distance.

    Ties resolve to the lowest label, then to the earliest template.
    ``max_distance`` (off by default) rejects matches farther than it.
    """

    def __init__(self, max_distance=None):
        self.max_distance = max_distance

    def fit(self, X, y, signer_ids=None, hands=None):
        X = check_descriptors(X)
        y = np.asarray(y)
        if y.shape != (X.shape[0],):
            raise ValueError("y must have one label per descriptor row")
        n = len(y)
        signer_ids = [""] * n if signer_ids is None else list(signer_ids)
        hands = ["unknown"] * n if hands is None else list(hands)
        self.templates_ = TemplateSet(
            GestureTemplate(int(label), FourierDescriptor(row), str(s), h)
            for row, label, s, h in zip(X, y, signer_ids, hands)
        )
        self.classes_ = np.unique(self.templates_.labels)
        self.n_features_in_ = X.shape[1]
        return self

    @classmethod
    def from_templates(cls, templates: TemplateSet, **params):
        est = cls(**params)
        est.templates_ = templates
        est.classes_ = np.unique(templates.labels)
        est.n_features_in_ = templates.matrix.shape[1]
        return est

    def match(self, X):
        """Return ``(labels, distances)`` of the nearest template per row."""
        check_is_fitted(self, "templates_")
        X = check_descriptors(X, self.n_features_in_)
        out = [classify_hand(row, self.templates_, self.max_distance) for row in X]
        labels = np.array([o[0] for o in out], dtype=np.int64)
        return labels, np.array([o[1] for o in out])

    def predict(self, X):
        return self.match(X)[0]


class NumberSignRecognizer(ClassifierMixin, BaseEstimator):
    """Depth frames in, numbers 1..10 out.

    ``fit(X, y)`` enrols every hand of every frame: ``y[i]`` is the finger
    count of a one-hand frame, or a ``(left, right)`` pair for a two-hand
    frame. ``predict`` applies the sum rule for two-hand frames.
    """

    def __init__(
        self,
        threshold=150,
        noise_window=16,
        min_object_size=400,
        merge_distance=80.0,
        max_iterations=100,
        kmeans_init="extreme",
        sample_count=128,
        coefficient_count=15,
        mode="sequential",
        random_state=0,
        max_distance=None,
    ):
        self.threshold = threshold
        self.noise_window = noise_window
        self.min_object_size = min_object_size
        self.merge_distance = merge_distance
        self.max_iterations = max_iterations
        self.kmeans_init = kmeans_init
        self.sample_count = sample_count
        self.coefficient_count = coefficient_count
        self.mode = mode
        self.random_state = random_state
        self.max_distance = max_distance

    def run_config(self) -> RunConfig:
        return RunConfig(
            threshold=self.threshold,
            noise_window=self.noise_window,
            min_object_size=self.min_object_size,
            merge_distance=self.merge_distance,
            max_iterations=self.max_iterations,
            kmeans_init=self.kmeans_init,
            sample_count=self.sample_count,
            coefficient_count=self.coefficient_count,
            mode=self.mode,
            seed=self.random_state,
            max_distance=self.max_distance,
        )

    def fit(self, X, y):
        frames = check_frames(X)
        if len(y) != len(frames):
            raise ValueError("y must have one entry per frame")
        cfg = self.run_config()
        templates = []
        for i, (frame, y_i) in enumerate(zip(frames, y)):
            labels = _hand_labels(y_i)
            hands = describe_frame(frame, cfg)
            if len(hands) != len(labels):
                raise ValueError(
                    f"frame {i}: found {len(hands)} hand(s) but {len(labels)} label(s) given"
                )
            for (side, desc), label in zip(hands, labels):
                hand = side if side in ("left", "right") else "unknown"
                templates.append(GestureTemplate(label, desc, f"frame{i}", hand))
        self.templates_ = TemplateSet(templates)
        self.classes_ = np.arange(1, 11)
        return self

    @classmethod
    def from_templates(cls, templates: TemplateSet, **params):
        est = cls(**params)
        est.templates_ = templates
        est.classes_ = np.arange(1, 11)
        return est

    def recognize(self, frame):
        """``(RecognitionResult, StageTimings)`` for one frame."""
        check_is_fitted(self, "templates_")
        cfg = self.run_config()
        return recognize(check_frame(frame), self.templates_, cfg.mode, cfg)

    def predict(self, X):
        return np.array([self.recognize(f)[0].number for f in check_frames(X)], dtype=np.int64)
