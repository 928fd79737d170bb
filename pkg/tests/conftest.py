import numpy as np
import pytest

from depthsign.classify import GestureTemplate, TemplateSet
from depthsign.frames import SynthSpec, synth_frame
from depthsign.pipeline import describe_frame

PALM_RADIUS = 60.0
JITTER = 0.02 * PALM_RADIUS
TRAIN_SEEDS = range(4)
TEST_SEED_BASE = 1000

_acceptance_lines = []


def pytest_configure(config):
    config._acceptance_lines = _acceptance_lines


def pytest_terminal_summary(terminalreporter):
    if _acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in _acceptance_lines:
            terminalreporter.write_line(line)


@pytest.fixture
def record():
    """Log one PASS/FAIL line per acceptance criterion for the run summary."""

    def _record(name, ok, detail=""):
        line = f"{'PASS' if ok else 'FAIL'}  {name}" + (f"  [{detail}]" if detail else "")
        _acceptance_lines.append(line)
        print(line)
        return ok

    return _record


def training_specs(jitter=JITTER):
    """8 frames per number 1..5: 4 seeds x both hands."""
    return [
        SynthSpec(n, seed=s, jitter=jitter, side=side)
        for n in range(1, 6)
        for s in TRAIN_SEEDS
        for side in ("left", "right")
    ]


def testing_specs(jitter=JITTER, per_number=40):
    return [
        SynthSpec(n, seed=TEST_SEED_BASE + i, jitter=jitter, side=("right", "left")[i % 2])
        for n in range(1, 11)
        for i in range(per_number)
    ]


def enroll(frames_with_specs):
    templates = []
    for frame, spec in frames_with_specs:
        for side, desc in describe_frame(frame):
            templates.append(GestureTemplate(spec.number, desc, f"seed{spec.seed}", spec.side))
    return TemplateSet(templates)


@pytest.fixture(scope="session")
def training_frames():
    return [(synth_frame(spec)[0], spec) for spec in training_specs()]


@pytest.fixture(scope="session")
def templates(training_frames):
    return enroll(training_frames)


@pytest.fixture(scope="session")
def test_frames():
    return [(synth_frame(spec)[0], spec.number) for spec in testing_specs()]


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
