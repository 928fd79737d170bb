"""Depth frames: data model, DFR / PGM file I/O and a synthetic hand generator.

The generator stands in for the depth sensor. Each hand is a filled palm disk
with one capsule per extended finger, rendered in front of a torso slab.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import (
    BadMagic,
    DepthOutOfRange,
    InvalidSpec,
    TruncatedFile,
    UnsupportedFormat,
)

MAX_DEPTH = 4095
DEFAULT_WIDTH = 640
DEFAULT_HEIGHT = 480

DFR_MAGIC = b"DFR1"
_DFR_HEADER = struct.Struct("<4sII")


@dataclass(frozen=True, eq=False)
class DepthFrame:
    """A ``height x width`` grid of depth layers (0 = no reading)."""

    depths: np.ndarray

    def __post_init__(self):
        d = np.asarray(self.depths)
        if d.ndim != 2:
            raise ValueError(f"depths must be 2-D, got shape {d.shape}")
        if d.size and not np.issubdtype(d.dtype, np.integer):
            raise ValueError(f"depths must be integers, got {d.dtype}")
        if d.size and (d.min() < 0 or d.max() > MAX_DEPTH):
            raise DepthOutOfRange(f"depth values must lie in [0, {MAX_DEPTH}]")
        d = np.ascontiguousarray(d, dtype=np.uint16)
        d.flags.writeable = False
        object.__setattr__(self, "depths", d)

    @classmethod
    def zeros(cls, width=DEFAULT_WIDTH, height=DEFAULT_HEIGHT):
        return cls(np.zeros((height, width), dtype=np.uint16))

    @property
    def width(self) -> int:
        return self.depths.shape[1]

    @property
    def height(self) -> int:
        return self.depths.shape[0]

    def __eq__(self, other):
        if not isinstance(other, DepthFrame):
            return NotImplemented
        return self.depths.shape == other.depths.shape and bool(
            np.array_equal(self.depths, other.depths)
        )

    __hash__ = None


# --------------------------------------------------------------------------
# file I/O


def read_frame(path) -> DepthFrame:
    """Load a frame stored as DFR or as a 16-bit binary PGM.

    The format is detected from the first bytes of the file, not its suffix.
    """
    data = Path(path).read_bytes()
    if data[:4] == DFR_MAGIC:
        return _decode_dfr(data)
    if data[:2] == b"P5":
        return _decode_pgm(data)
    if data[:1] == b"P" and data[1:2].isdigit():
        raise UnsupportedFormat(f"{path}: only binary P5 PGM is supported")
    raise BadMagic(f"{path}: unrecognised magic {data[:4]!r}")


def write_frame(frame: DepthFrame, path, format="dfr"):
    fmt = format.lower()
    if fmt == "dfr":
        payload = encode_dfr(frame)
    elif fmt == "pgm":
        payload = encode_pgm(frame)
    else:
        raise UnsupportedFormat(f"unknown frame format {format!r}")
    Path(path).write_bytes(payload)


def encode_dfr(frame: DepthFrame) -> bytes:
    header = _DFR_HEADER.pack(DFR_MAGIC, frame.width, frame.height)
    return header + frame.depths.astype("<u2").tobytes()


def _decode_dfr(data: bytes) -> DepthFrame:
    if len(data) < _DFR_HEADER.size:
        raise TruncatedFile("DFR header is incomplete")
    _, width, height = _DFR_HEADER.unpack_from(data)
    expected = width * height * 2
    payload = data[_DFR_HEADER.size:]
    if len(payload) < expected:
        raise TruncatedFile(
            f"DFR payload has {len(payload)} bytes, expected {expected}"
        )
    depths = np.frombuffer(payload, dtype="<u2", count=width * height)
    return _checked_frame(depths.reshape(height, width))


def encode_pgm(frame: DepthFrame, maxval=MAX_DEPTH) -> bytes:
    header = f"P5\n{frame.width} {frame.height}\n{maxval}\n".encode("ascii")
    return header + frame.depths.astype(">u2").tobytes()


def _pgm_tokens(data: bytes, count: int):
    """Read ``count`` whitespace-separated header tokens, skipping comments.

    Returns the tokens and the offset of the first raster byte.
    """
    tokens = []
    pos = 2
    n = len(data)
    while len(tokens) < count:
        while pos < n and data[pos:pos + 1].isspace():
            pos += 1
        if pos < n and data[pos:pos + 1] == b"#":
            while pos < n and data[pos:pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        start = pos
        while pos < n and not data[pos:pos + 1].isspace():
            pos += 1
        if start == pos:
            raise TruncatedFile("PGM header is incomplete")
        tokens.append(data[start:pos])
    # exactly one whitespace byte separates the header from the raster
    return tokens, pos + 1


def _decode_pgm(data: bytes) -> DepthFrame:
    tokens, offset = _pgm_tokens(data, 3)
    try:
        width, height, maxval = (int(t) for t in tokens)
    except ValueError:
        raise BadMagic("PGM header fields must be integers") from None
    if maxval < 256:
        raise UnsupportedFormat("8-bit PGM cannot carry depth layers")
    if maxval > 65535:
        raise UnsupportedFormat(f"invalid PGM maxval {maxval}")
    expected = width * height * 2
    raster = data[offset:]
    if len(raster) < expected:
        raise TruncatedFile(
            f"PGM raster has {len(raster)} bytes, expected {expected}"
        )
    depths = np.frombuffer(raster, dtype=">u2", count=width * height)
    return _checked_frame(depths.reshape(height, width))


def _checked_frame(depths: np.ndarray) -> DepthFrame:
    if depths.size and int(depths.max()) > MAX_DEPTH:
        raise DepthOutOfRange(
            f"depth {int(depths.max())} exceeds {MAX_DEPTH}"
        )
    return DepthFrame(depths.astype(np.uint16))


# --------------------------------------------------------------------------
# synthetic gestures

# Finger slots for a right hand: angle in degrees (counter-clockwise from
# image +x, y pointing up) and length relative to the base finger length.
FINGER_SLOTS = {
    "thumb": (22.0, 0.75),
    "index": (68.0, 1.00),
    "middle": (90.0, 1.10),
    "ring": (111.0, 1.00),
    "pinky": (132.0, 0.80),
}

# Which fingers are extended for each one-hand count.
FINGERS_FOR_COUNT = {
    1: ("index",),
    2: ("index", "middle"),
    3: ("thumb", "index", "middle"),
    4: ("index", "middle", "ring", "pinky"),
    5: ("thumb", "index", "middle", "ring", "pinky"),
}

HAND_THICKNESS = 60     # front-to-back depth extent of a rendered hand
TORSO_OFFSET = 450      # torso depth behind the hand surface
TWO_HAND_OFFSET = 135   # horizontal palm offset from image centre


@dataclass(frozen=True)
class SynthSpec:
    """Parameters of one synthetic gesture frame.

    ``hands`` defaults to ``"two"`` for numbers above five. ``side`` picks the
    hand shown in one-hand frames. ``jitter`` is the standard deviation, in
    pixels, of the finger-tip perturbation.
    """

    number: int
    hands: str | None = None
    seed: int = 0
    jitter: float = 0.0
    hand_depth: int = 800
    palm_radius: float = 60.0
    side: str = "right"
    rotation: float = 0.0
    width: int = DEFAULT_WIDTH
    height: int = DEFAULT_HEIGHT

    def __post_init__(self):
        if self.hands is None:
            object.__setattr__(self, "hands", "two" if self.number > 5 else "one")
        self.validate()

    def validate(self):
        if not isinstance(self.number, (int, np.integer)) or not 1 <= self.number <= 10:
            raise InvalidSpec(f"number must be in 1..10, got {self.number!r}")
        if self.hands not in ("one", "two"):
            raise InvalidSpec(f"hands must be 'one' or 'two', got {self.hands!r}")
        if self.number > 5 and self.hands != "two":
            raise InvalidSpec(f"number {self.number} needs two hands")
        if self.number <= 5 and self.hands != "one":
            raise InvalidSpec("two-hand frames encode numbers 6..10 only")
        if self.side not in ("left", "right"):
            raise InvalidSpec(f"side must be 'left' or 'right', got {self.side!r}")
        if not self.jitter >= 0:
            raise InvalidSpec("jitter must be >= 0")
        if not 20 <= self.palm_radius <= 90:
            raise InvalidSpec("palm_radius must be in [20, 90]")
        if not 1 <= self.hand_depth <= MAX_DEPTH - TORSO_OFFSET - HAND_THICKNESS:
            raise InvalidSpec(f"hand_depth {self.hand_depth} leaves no room for the torso")
        if self.width < 64 or self.height < 64:
            raise InvalidSpec("frame too small")


@dataclass
class SynthTruth:
    """Ground truth for a synthetic frame: per-side labels and pixel masks."""

    number: int
    labels: dict = field(default_factory=dict)
    masks: dict = field(default_factory=dict)

    @property
    def hand_mask(self) -> np.ndarray:
        masks = list(self.masks.values())
        out = masks[0].copy()
        for m in masks[1:]:
            out |= m
        return out


def hand_layout(spec: SynthSpec):
    """Per-hand (side, label, palm centre) placements for ``spec``."""
    cy = int(round(spec.height * 0.625))
    cx = spec.width // 2
    if spec.hands == "one":
        return [(spec.side, spec.number, (cx, cy))]
    rng = np.random.default_rng([spec.seed, spec.number, 1])
    five_left = bool(rng.integers(2))
    other = spec.number - 5
    offset = int(round(TWO_HAND_OFFSET * spec.width / DEFAULT_WIDTH))
    return [
        ("left", 5 if five_left else other, (cx - offset, cy)),
        ("right", other if five_left else 5, (cx + offset, cy)),
    ]


def _render_hand(shape, centre, count, side, spec, rng):
    """Return (mask, depth) arrays for one hand over the full frame."""
    h, w = shape
    R = spec.palm_radius
    half_width = max(7.0, 0.135 * R)
    base_len = 1.05 * R
    cx, cy = centre

    reach = int(math.ceil(R + 1.1 * base_len + half_width + 4 * spec.jitter + 2))
    x0, x1 = max(cx - reach, 0), min(cx + reach + 1, w)
    y0, y1 = max(cy - reach, 0), min(cy + reach + 1, h)
    ys, xs = np.mgrid[y0:y1, x0:x1]
    dx = (xs - cx).astype(float)
    dy = (ys - cy).astype(float)

    r2 = dx * dx + dy * dy
    local = r2 <= R * R
    depth = np.where(local, spec.hand_depth + np.rint(20.0 * r2 / (R * R)), 0.0)

    for name in FINGERS_FOR_COUNT[count]:
        angle_deg, rel_len = FINGER_SLOTS[name]
        length = R + base_len * rel_len
        theta = math.radians(angle_deg + spec.rotation)
        if spec.jitter > 0:
            # perturb the finger tip by ~jitter px along and across the finger
            length += rng.normal(0.0, spec.jitter)
            theta += rng.normal(0.0, spec.jitter) / length
        if side == "left":
            theta = math.pi - theta
        # image y grows downwards
        ux, uy = math.cos(theta), -math.sin(theta)
        start = 0.5 * R
        t = np.clip(dx * ux + dy * uy, start, length - half_width)
        px, py = dx - t * ux, dy - t * uy
        finger = (px * px + py * py) <= half_width * half_width
        finger_depth = spec.hand_depth + 20 + np.rint(20.0 * (t - start) / (length - start))
        depth = np.where(finger & ~local, finger_depth, depth)
        local |= finger

    mask = np.zeros(shape, dtype=bool)
    mask[y0:y1, x0:x1] = local
    full_depth = np.zeros(shape, dtype=np.int64)
    full_depth[y0:y1, x0:x1] = np.where(local, depth, 0).astype(np.int64)
    return mask, full_depth


def synth_frame(spec: SynthSpec):
    """Render ``spec`` into a depth frame.

    Returns ``(frame, truth)`` where ``truth.labels`` maps each visible side
    (``"left"``/``"right"``) to the finger count shown by that hand.
    """
    spec.validate()
    shape = (spec.height, spec.width)
    depths = np.zeros(shape, dtype=np.int64)

    # torso slab behind the hands
    w, h = spec.width, spec.height
    depths[int(h * 0.35):, int(w * 0.16):int(w * 0.84)] = spec.hand_depth + TORSO_OFFSET
    # head
    ys, xs = np.ogrid[:h, :w]
    head = (xs - w / 2) ** 2 + (ys - h * 0.18) ** 2 <= (h * 0.13) ** 2
    depths[head] = spec.hand_depth + TORSO_OFFSET + 20

    truth = SynthTruth(number=spec.number)
    for side, count, centre in hand_layout(spec):
        rng = np.random.default_rng([spec.seed, count, 0 if side == "left" else 1])
        mask, hand_depths = _render_hand(shape, centre, count, side, spec, rng)
        depths[mask] = hand_depths[mask]
        truth.labels[side] = count
        truth.masks[side] = mask
    return DepthFrame(depths.astype(np.uint16)), truth
