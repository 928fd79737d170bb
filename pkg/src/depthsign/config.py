"""Run configuration: every tunable constant of the pipeline in one place.

Config files are plain ``key = value`` lines; ``#`` starts a comment.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from pathlib import Path

from .contour import is_power_of_two

MODES = ("sequential", "parallel")
_MODE_ALIASES = {"seq": "sequential", "par": "parallel"}


def normalize_mode(mode: str) -> str:
    mode = _MODE_ALIASES.get(mode, mode)
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    return mode


@dataclass(frozen=True)
class RunConfig:
    threshold: int = 150
    noise_window: int = 16
    min_object_size: int = 400
    merge_distance: float = 80.0
    max_iterations: int = 100
    kmeans_init: str = "extreme"
    sample_count: int = 128
    coefficient_count: int = 15
    mode: str = "sequential"
    seed: int = 0
    max_distance: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "mode", normalize_mode(self.mode))
        if self.threshold <= 0:
            raise ValueError("threshold must be > 0")
        if self.noise_window < 0:
            raise ValueError("noise_window must be >= 0")
        if self.min_object_size < 1:
            raise ValueError("min_object_size must be >= 1")
        if not self.merge_distance > 0:
            raise ValueError("merge_distance must be > 0")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if self.kmeans_init not in ("extreme", "random"):
            raise ValueError("kmeans_init must be 'extreme' or 'random'")
        if not is_power_of_two(self.sample_count) or self.sample_count < 4:
            raise ValueError("sample_count must be a power of two >= 4")
        if not 1 <= self.coefficient_count < self.sample_count // 2:
            raise ValueError("coefficient_count must be in [1, sample_count / 2)")
        if self.max_distance is not None and self.max_distance < 0:
            raise ValueError("max_distance must be >= 0")

    def replace(self, **changes):
        """Copy with ``changes`` applied; ``None`` values are ignored."""
        changes = {k: v for k, v in changes.items() if v is not None}
        return dataclasses.replace(self, **changes)

    def to_text(self) -> str:
        lines = []
        for f in dataclasses.fields(self):
            value = getattr(self, f.name)
            lines.append(f"{f.name} = {'none' if value is None else value}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "RunConfig":
        types = {f.name: f.type for f in dataclasses.fields(cls)}
        values = {}
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"config line {lineno}: expected 'key = value'")
            key, value = (s.strip() for s in line.split("=", 1))
            if key not in types:
                raise ValueError(f"config line {lineno}: unknown key {key!r}")
            values[key] = _coerce(types[key], value, lineno)
        return cls(**values)

    @classmethod
    def from_file(cls, path) -> "RunConfig":
        return cls.from_text(Path(path).read_text(encoding="utf-8"))


def _coerce(type_name, value, lineno):
    t = str(type_name)
    try:
        if "None" in t and value.lower() in ("none", ""):
            return None
        if t.startswith("int"):
            return int(value)
        if t.startswith("float"):
            return float(value)
    except ValueError:
        raise ValueError(f"config line {lineno}: cannot parse {value!r} as {t}") from None
    return value
