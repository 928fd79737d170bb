"""Number-sign recognition from depth frames with Fourier shape descriptors."""

from .classify import (
    GestureTemplate,
    HandMatch,
    RecognitionResult,
    TemplateSet,
    classify_hand,
    combine,
    euclidean,
    load_templates,
    save_templates,
)
from .clustering import ClusterConfig, HandCluster, init_centroids, kmeans_two, pixel_centroid
from .config import RunConfig
from .contour import Contour, SampledBoundary, equal_angle_sample, trace_contour
from .descriptors import FourierDescriptor, centroid_distance_signature, descriptor, fft
from .estimators import HandDescriptorExtractor, NumberSignRecognizer, TemplateMatcher
from .frames import DepthFrame, SynthSpec, read_frame, synth_frame, write_frame
from .pipeline import (
    STAGE_NAMES,
    EvalReport,
    StageTimings,
    benchmark,
    describe_frame,
    evaluate,
    recognize,
)
from .segmentation import (
    DepthHistogram,
    HandMask,
    build_histogram,
    find_nearest_object,
    segment_hands,
)

__version__ = "0.1.0"

__all__ = [
    "GestureTemplate",
    "HandMatch",
    "RecognitionResult",
    "TemplateSet",
    "classify_hand",
    "combine",
    "euclidean",
    "load_templates",
    "save_templates",
    "ClusterConfig",
    "HandCluster",
    "init_centroids",
    "kmeans_two",
    "pixel_centroid",
    "RunConfig",
    "Contour",
    "SampledBoundary",
    "equal_angle_sample",
    "trace_contour",
    "FourierDescriptor",
    "centroid_distance_signature",
    "descriptor",
    "fft",
    "HandDescriptorExtractor",
    "NumberSignRecognizer",
    "TemplateMatcher",
    "DepthFrame",
    "SynthSpec",
    "read_frame",
    "synth_frame",
    "write_frame",
    "STAGE_NAMES",
    "EvalReport",
    "StageTimings",
    "benchmark",
    "describe_frame",
    "evaluate",
    "recognize",
    "DepthHistogram",
    "HandMask",
    "build_histogram",
    "find_nearest_object",
    "segment_hands",
]
