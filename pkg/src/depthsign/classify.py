"""Template dictionary, nearest-template matching and the two-hand sum rule."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .descriptors import N_COEFFICIENTS, FourierDescriptor
from .errors import (
    BadCoefficientCount,
    BadLabel,
    EmptyTemplateSet,
    NoMatch,
    ParseError,
)

log = logging.getLogger(__name__)

LABELS = (1, 2, 3, 4, 5)
_HAND_CODES = {"l": "left", "r": "right"}


@dataclass(frozen=True, eq=False)
class GestureTemplate:
    label: int
    descriptor: FourierDescriptor
    signer_id: str = ""
    hand: str = "unknown"

    def __post_init__(self):
        if self.label not in LABELS:
            raise BadLabel(f"template label must be 1..5, got {self.label}")
        if self.hand not in ("left", "right", "unknown"):
            raise ValueError(f"bad hand {self.hand!r}")
        if not isinstance(self.descriptor, FourierDescriptor):
            object.__setattr__(self, "descriptor", FourierDescriptor(self.descriptor))


class TemplateSet:
    """Immutable collection of gesture templates, stacked for fast matching."""

    def __init__(self, templates=()):
        self.templates = tuple(templates)
        if self.templates:
            lengths = {len(t.descriptor) for t in self.templates}
            if len(lengths) > 1:
                raise BadCoefficientCount(f"mixed descriptor lengths {sorted(lengths)}")
            self.matrix = np.vstack([t.descriptor.coefficients for t in self.templates])
        else:
            self.matrix = np.empty((0, N_COEFFICIENTS))
        self.matrix.flags.writeable = False
        self.labels = np.array([t.label for t in self.templates], dtype=np.int64)
        missing = sorted(set(LABELS) - set(self.labels.tolist()))
        if self.templates and missing:
            log.warning("template set has no examples of labels %s", missing)

    def __len__(self):
        return len(self.templates)

    def __iter__(self):
        return iter(self.templates)

    def __eq__(self, other):
        if not isinstance(other, TemplateSet):
            return NotImplemented
        return len(self) == len(other) and all(
            a.label == b.label
            and a.signer_id == b.signer_id
            and a.hand == b.hand
            and a.descriptor == b.descriptor
            for a, b in zip(self.templates, other.templates)
        )

    __hash__ = None


@dataclass(frozen=True)
class HandMatch:
    label: int
    distance: float
    side: str = "only"


@dataclass(frozen=True)
class RecognitionResult:
    number: int
    hands: tuple = field(default_factory=tuple)
    mode: str = "single"

    @property
    def labels(self):
        return tuple(h.label for h in self.hands)


def euclidean(a, b) -> float:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise ValueError(f"descriptor shapes differ: {a.shape} vs {b.shape}")
    return float(np.sqrt(np.sum((a - b) ** 2)))


def classify_hand(d, templates: TemplateSet, max_distance=None):
    """Label of the nearest template and its distance.

    Ties go to the lowest label, then to the earliest template.
    """
    if len(templates) == 0:
        raise EmptyTemplateSet("cannot classify against an empty template set")
    q = np.asarray(d, dtype=float)
    if q.shape != (templates.matrix.shape[1],):
        raise BadCoefficientCount(
            f"descriptor has {q.size} coefficients, templates have {templates.matrix.shape[1]}"
        )
    dist = np.sqrt(np.sum((templates.matrix - q) ** 2, axis=1))
    best = dist.min()
    tied = np.flatnonzero(dist == best)
    i = tied[np.argmin(templates.labels[tied])]  # argmin keeps the first of equal labels
    if max_distance is not None and best > max_distance:
        raise NoMatch(f"nearest template is {best:.4g} away (limit {max_distance})")
    return int(templates.labels[i]), float(best)


def combine(hands) -> RecognitionResult:
    """Final number from one or two per-hand matches (sum rule for two)."""
    hands = tuple(hands)
    if len(hands) == 1:
        return RecognitionResult(hands[0].label, hands, "single")
    if len(hands) == 2:
        order = {"left": 0, "only": 1, "right": 2}
        hands = tuple(sorted(hands, key=lambda h: order.get(h.side, 1)))
        return RecognitionResult(hands[0].label + hands[1].label, hands, "both")
    raise ValueError(f"expected one or two hands, got {len(hands)}")


# --------------------------------------------------------------------------
# template files


def _format_template(t: GestureTemplate) -> str:
    parts = [str(t.label)] + [repr(float(c)) for c in t.descriptor.coefficients]
    if t.signer_id:
        parts.append(f"signer={t.signer_id}")
    if t.hand != "unknown":
        parts.append(f"hand={t.hand[0]}")
    return " ".join(parts)


def save_templates(templates: TemplateSet, path):
    lines = ["# label c1..cN [signer=<tag>] [hand=<l|r>]"]
    lines += [_format_template(t) for t in templates]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def parse_templates(text: str, n_coefficients=N_COEFFICIENTS) -> TemplateSet:
    templates = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tokens = line.split()
        signer, hand = "", "unknown"
        values = []
        for tok in tokens[1:]:
            if tok.startswith("signer="):
                signer = tok[len("signer="):]
            elif tok.startswith("hand="):
                code = tok[len("hand="):]
                if code not in _HAND_CODES:
                    raise ParseError(f"bad hand tag {tok!r}", lineno)
                hand = _HAND_CODES[code]
            else:
                values.append(tok)
        try:
            label = int(tokens[0])
        except ValueError:
            raise BadLabel(f"label {tokens[0]!r} is not an integer", lineno) from None
        if label not in LABELS:
            raise BadLabel(f"label {label} outside 1..5", lineno)
        if len(values) != n_coefficients:
            raise BadCoefficientCount(
                f"expected {n_coefficients} coefficients, found {len(values)}", lineno
            )
        try:
            coeffs = np.array([float(v) for v in values])
        except ValueError as exc:
            raise ParseError(str(exc), lineno) from None
        if not np.all(np.isfinite(coeffs)) or np.any(coeffs < 0):
            raise ParseError("coefficients must be finite and non-negative", lineno)
        templates.append(GestureTemplate(label, FourierDescriptor(coeffs), signer, hand))
    return TemplateSet(templates)


def load_templates(path, n_coefficients=N_COEFFICIENTS) -> TemplateSet:
    return parse_templates(Path(path).read_text(encoding="utf-8"), n_coefficients)
