import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from depthsign.errors import BadMagic, DepthOutOfRange, InvalidSpec, TruncatedFile, UnsupportedFormat
from depthsign.frames import (
    HAND_THICKNESS,
    DepthFrame,
    SynthSpec,
    encode_dfr,
    read_frame,
    synth_frame,
    write_frame,
)
from depthsign.segmentation import DEFAULT_MIN_OBJECT_SIZE

small_frames = arrays(
    np.uint16,
    st.tuples(st.integers(1, 12), st.integers(1, 12)),
    elements=st.integers(0, 4095),
).map(DepthFrame)


def test_dfr_all_zero_payload(tmp_path):
    path = tmp_path / "zero.dfr"
    write_frame(DepthFrame.zeros(), path)
    frame = read_frame(path)
    assert (frame.width, frame.height) == (640, 480)
    assert frame.depths.size == 307200
    assert not frame.depths.any()


def test_dfr_byte_layout():
    frame = DepthFrame(np.array([[0, 1], [2, 4095]]))
    data = encode_dfr(frame)
    assert data[:4] == b"DFR1"
    assert data[4:12] == bytes([2, 0, 0, 0, 2, 0, 0, 0])
    assert data[12:] == bytes([0x00, 0x00, 0x01, 0x00, 0x02, 0x00, 0xFF, 0x0F])


def test_pgm_header_and_roundtrip(tmp_path):
    frame, _ = synth_frame(SynthSpec(3, seed=5))
    path = tmp_path / "f.pgm"
    write_frame(frame, path, "pgm")
    raw = path.read_bytes()
    assert raw.startswith(b"P5\n640 480\n4095\n")
    # big-endian samples
    body = raw[len(b"P5\n640 480\n4095\n"):]
    assert int.from_bytes(body[:2], "big") == frame.depths[0, 0]
    assert read_frame(path) == frame


def test_pgm_with_comment(tmp_path):
    path = tmp_path / "c.pgm"
    path.write_bytes(b"P5\n# made by hand\n2 1\n4095\n\x00\x07\x0f\xff")
    assert read_frame(path).depths.tolist() == [[7, 4095]]


@pytest.mark.parametrize("fmt", ["dfr", "pgm"])
@settings(max_examples=40, deadline=None)
@given(frame=small_frames)
def test_roundtrip_is_identity(tmp_path_factory, fmt, frame):
    path = tmp_path_factory.mktemp("rt") / f"f.{fmt}"
    write_frame(frame, path, fmt)
    assert read_frame(path) == frame


def test_truncated_dfr(tmp_path):
    path = tmp_path / "t.dfr"
    path.write_bytes(encode_dfr(DepthFrame.zeros(8, 4))[:-4])
    with pytest.raises(TruncatedFile):
        read_frame(path)


def test_truncated_header(tmp_path):
    path = tmp_path / "t.dfr"
    path.write_bytes(b"DFR1\x02\x00")
    with pytest.raises(TruncatedFile):
        read_frame(path)


def test_bad_magic(tmp_path):
    path = tmp_path / "x.bin"
    path.write_bytes(b"JUNKJUNKJUNK")
    with pytest.raises(BadMagic):
        read_frame(path)


def test_unsupported_formats(tmp_path):
    ascii_pgm = tmp_path / "a.pgm"
    ascii_pgm.write_bytes(b"P2\n1 1\n4095\n7\n")
    with pytest.raises(UnsupportedFormat):
        read_frame(ascii_pgm)
    eight_bit = tmp_path / "b.pgm"
    eight_bit.write_bytes(b"P5\n1 1\n255\n\x07")
    with pytest.raises(UnsupportedFormat):
        read_frame(eight_bit)
    with pytest.raises(UnsupportedFormat):
        write_frame(DepthFrame.zeros(2, 2), tmp_path / "c", "png")


def test_depth_out_of_range(tmp_path):
    path = tmp_path / "big.dfr"
    path.write_bytes(b"DFR1" + (1).to_bytes(4, "little") * 2 + (4096).to_bytes(2, "little"))
    with pytest.raises(DepthOutOfRange):
        read_frame(path)
    with pytest.raises(DepthOutOfRange):
        DepthFrame(np.array([[5000]]))


def test_frame_is_read_only():
    frame = DepthFrame.zeros(4, 4)
    with pytest.raises(ValueError):
        frame.depths[0, 0] = 1


# --- synthetic generator ---------------------------------------------------


def test_two_hand_ground_truth_follows_sum_rule():
    _, truth = synth_frame(SynthSpec(7, hands="two", seed=1))
    assert sorted(truth.labels.values()) == [2, 5]
    assert set(truth.labels) == {"left", "right"}


@pytest.mark.parametrize("number", range(6, 11))
def test_two_hand_labels_sum(number):
    for seed in range(4):
        _, truth = synth_frame(SynthSpec(number, seed=seed))
        assert sum(truth.labels.values()) == number
        assert 5 in truth.labels.values()


def test_determinism_without_jitter():
    a, _ = synth_frame(SynthSpec(3, seed=42, jitter=0))
    b, _ = synth_frame(SynthSpec(3, seed=42, jitter=0))
    assert np.array_equal(a.depths, b.depths)


@settings(max_examples=15, deadline=None)
@given(number=st.integers(1, 10), seed=st.integers(0, 2**31), jitter=st.floats(0, 3))
def test_synth_is_pure(number, seed, jitter):
    spec = SynthSpec(number, seed=seed, jitter=jitter)
    assert synth_frame(spec)[0] == synth_frame(spec)[0]


def test_hand_and_torso_depth_bands():
    frame, truth = synth_frame(SynthSpec(1, hand_depth=800))
    hand = frame.depths[truth.hand_mask]
    assert hand.min() == 800
    assert hand.max() <= 800 + HAND_THICKNESS
    rest = frame.depths[~truth.hand_mask]
    assert rest[rest > 0].min() >= 1200


def test_two_hand_separation():
    for number in range(6, 11):
        _, truth = synth_frame(SynthSpec(number, seed=number))
        cx = []
        for mask in truth.masks.values():
            ys, xs = np.nonzero(mask)
            cx.append((xs.mean(), ys.mean()))
        assert np.hypot(*np.subtract(*cx)) >= 200


@pytest.mark.parametrize("number", range(1, 11))
def test_hand_pixels_exceed_min_object_size(number):
    _, truth = synth_frame(SynthSpec(number, jitter=2.0, seed=3))
    for mask in truth.masks.values():
        assert mask.sum() > DEFAULT_MIN_OBJECT_SIZE


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(number=0),
        dict(number=11),
        dict(number=7, hands="one"),
        dict(number=3, hands="two"),
        dict(number=3, jitter=-1),
        dict(number=3, side="middle"),
        dict(number=3, hand_depth=4000),
    ],
)
def test_invalid_specs(kwargs):
    with pytest.raises(InvalidSpec):
        SynthSpec(**kwargs)


def test_more_fingers_more_pixels():
    counts = [synth_frame(SynthSpec(n))[1].hand_mask.sum() for n in range(1, 6)]
    assert counts == sorted(counts)
