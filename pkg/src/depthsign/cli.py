"""Command-line interface: synth, enroll, recognize, eval, bench.

Exit codes: 0 success, 2 bad arguments, 3 stage error, 4 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import logging
import sys
from pathlib import Path

from .classify import GestureTemplate, TemplateSet, load_templates, save_templates
from .config import RunConfig, normalize_mode
from .errors import DepthSignError, FrameError, InvalidSpec, TemplateError
from .frames import SynthSpec, read_frame, synth_frame, write_frame
from .pipeline import benchmark, describe_frame, evaluate, recognize

EXIT_OK, EXIT_ARGS, EXIT_STAGE, EXIT_IO = 0, 2, 3, 4

MANIFEST = "labels.tsv"
MANIFEST_HEADER = ("filename", "number", "hand_labels", "seed")

class CliError(Exception):
    def __init__(self, message, code):
        super().__init__(message)
        self.code = code


def parse_numbers(text):
    """``"1-5"`` or ``"1,3,7"`` (or a mix) -> sorted list of numbers."""
    out = set()
    for part in text.split(","):
        part = part.strip()
        if "-" in part:
            lo, hi = part.split("-", 1)
            out.update(range(int(lo), int(hi) + 1))
        elif part:
            out.add(int(part))
    if not out or min(out) < 1 or max(out) > 10:
        raise argparse.ArgumentTypeError(f"numbers must lie in 1..10: {text!r}")
    return sorted(out)


# --------------------------------------------------------------------------
# manifest


def format_hand_labels(labels: dict) -> str:
    return ",".join(f"{side}={labels[side]}" for side in ("left", "right") if side in labels)


def parse_hand_labels(text: str) -> dict:
    out = {}
    for part in text.split(","):
        side, _, value = part.partition("=")
        if side not in ("left", "right") or not value:
            raise ValueError(f"bad per-hand label field {text!r}")
        out[side] = int(value)
    return out


def read_manifest(path):
    path = Path(path)
    try:
        with path.open(newline="", encoding="utf-8") as fh:
            rows = list(csv.reader(fh, delimiter="\t"))
    except OSError as exc:
        raise CliError(f"cannot read manifest {path}: {exc}", EXIT_IO) from None
    entries = []
    for lineno, row in enumerate(rows, start=1):
        if not row or row[0].startswith("#") or tuple(row[:4]) == MANIFEST_HEADER:
            continue
        try:
            name, number, hands, seed = row[:4]
            entries.append((name, int(number), parse_hand_labels(hands), int(seed)))
        except ValueError as exc:
            raise CliError(f"{path}:{lineno}: malformed manifest row ({exc})", EXIT_ARGS) from None
    return entries


# --------------------------------------------------------------------------
# config handling


def effective_config(args) -> RunConfig:
    try:
        cfg = RunConfig.from_file(args.config) if args.config else RunConfig()
    except OSError as exc:
        raise CliError(f"cannot read config {args.config}: {exc}", EXIT_IO) from None
    mode = getattr(args, "mode", None)
    return cfg.replace(
        threshold=args.threshold,
        noise_window=args.noise_window,
        min_object_size=args.min_object_size,
        merge_distance=args.merge_distance,
        sample_count=args.sample_count,
        coefficient_count=args.coefficient_count,
        max_distance=args.max_distance,
        seed=getattr(args, "seed", None),
        mode=None if mode == "both" else mode,
    )


def echo_config(cfg: RunConfig, out):
    print("# effective config", file=out)
    for line in cfg.to_text().splitlines():
        print(f"#   {line}", file=out)


def _load_templates(path, cfg):
    try:
        return load_templates(path, cfg.coefficient_count)
    except OSError as exc:
        raise CliError(f"cannot read templates {path}: {exc}", EXIT_IO) from None
    except TemplateError as exc:
        raise CliError(f"{path}: {exc}", EXIT_ARGS) from None


def _load_frame(path):
    try:
        return read_frame(path)
    except OSError as exc:
        raise CliError(f"cannot read frame {path}: {exc}", EXIT_IO) from None
    except FrameError as exc:
        raise CliError(f"{path}: {exc}", EXIT_IO) from None


# --------------------------------------------------------------------------
# commands


def cmd_synth(args, out):
    if args.all == (args.number is not None):
        raise CliError("give exactly one of --number or --all", EXIT_ARGS)
    if args.number is not None:
        numbers, per_number = [args.number], args.count
    else:
        numbers, per_number = args.numbers or list(range(1, 11)), args.per_number
    if per_number < 1:
        raise CliError("frame count must be >= 1", EXIT_ARGS)
    out_dir = Path(args.out)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise CliError(f"cannot create {out_dir}: {exc}", EXIT_IO) from None

    jitter = args.jitter if args.jitter is not None else args.jitter_frac * args.palm_radius
    rows = []
    for number in numbers:
        for i in range(per_number):
            # one-hand frames come in left/right pairs sharing a seed
            if number <= 5:
                seed, side = args.seed + i // 2, ("right", "left")[i % 2]
            else:
                seed, side = args.seed + i, "right"
            try:
                spec = SynthSpec(
                    number, seed=seed, jitter=jitter, side=side,
                    hand_depth=args.hand_depth, palm_radius=args.palm_radius,
                )
            except InvalidSpec as exc:
                raise CliError(str(exc), EXIT_ARGS) from None
            frame, truth = synth_frame(spec)
            name = f"n{number:02d}_{i:04d}.{args.format}"
            try:
                write_frame(frame, out_dir / name, args.format)
            except OSError as exc:
                raise CliError(f"cannot write {name}: {exc}", EXIT_IO) from None
            rows.append((name, number, format_hand_labels(truth.labels), seed))

    manifest = out_dir / MANIFEST
    try:
        with manifest.open("w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, delimiter="\t", lineterminator="\n")
            w.writerow(MANIFEST_HEADER)
            w.writerows(rows)
    except OSError as exc:
        raise CliError(f"cannot write {manifest}: {exc}", EXIT_IO) from None
    print(f"wrote {len(rows)} frames and {manifest}", file=out)
    return EXIT_OK


def cmd_enroll(args, out):
    cfg = effective_config(args)
    frames_dir = Path(args.frames_dir)
    entries = read_manifest(args.manifest or frames_dir / MANIFEST)
    if not entries:
        raise CliError(f"no frames listed for {frames_dir}", EXIT_IO)

    templates, failures = [], []
    for name, number, hand_labels, seed in entries:
        try:
            hands = describe_frame(_load_frame(frames_dir / name), cfg)
        except DepthSignError as exc:
            failures.append(f"{name}: {exc.stage or 'pipeline'}: {exc}")
            continue
        if len(hands) != len(hand_labels):
            failures.append(f"{name}: found {len(hands)} hand(s), manifest lists {len(hand_labels)}")
            continue
        for side, desc in hands:
            if side == "only":
                (hand, label), = hand_labels.items()
            else:
                hand, label = side, hand_labels[side]
            templates.append(GestureTemplate(label, desc, f"seed{seed}", hand))
    if failures:
        for line in failures:
            print(f"failed: {line}", file=sys.stderr)
        raise CliError(f"{len(failures)} frame(s) failed; no template file written", EXIT_STAGE)
    try:
        save_templates(TemplateSet(templates), args.out)
    except OSError as exc:
        raise CliError(f"cannot write {args.out}: {exc}", EXIT_IO) from None
    echo_config(cfg, out)
    print(f"enrolled {len(templates)} templates from {len(entries)} frames -> {args.out}", file=out)
    return EXIT_OK


def cmd_recognize(args, out):
    cfg = effective_config(args)
    templates = _load_templates(args.templates, cfg)
    frame = _load_frame(args.frame)
    # untimed first pass loads the compiled tracer
    recognize(frame, templates, cfg.mode, cfg)
    result, timings = recognize(frame, templates, cfg.mode, cfg)
    echo_config(cfg, out)
    print(f"number: {result.number}", file=out)
    print(f"hands: {result.mode}", file=out)
    for h in result.hands:
        print(f"hand {h.side}: label {h.label} distance {h.distance:.6g}", file=out)
    print(timings.table(), file=out)
    return EXIT_OK


def cmd_eval(args, out):
    cfg = effective_config(args)
    templates = _load_templates(args.templates, cfg)
    test_dir = Path(args.test_dir)
    entries = read_manifest(args.manifest or test_dir / MANIFEST)
    if not entries:
        raise CliError(f"no test frames listed for {test_dir}", EXIT_IO)
    items = ((_load_frame(test_dir / name), number) for name, number, _, _ in entries)
    report = evaluate(items, templates, cfg, cfg.mode)
    echo_config(cfg, out)
    print(report.table(), file=out)
    print(file=out)
    print(report.confusion_text(), file=out)
    if args.csv:
        try:
            Path(args.csv).write_text(report.to_csv(), encoding="utf-8")
        except OSError as exc:
            raise CliError(f"cannot write {args.csv}: {exc}", EXIT_IO) from None
        print(f"confusion matrix CSV -> {args.csv}", file=out)
    else:
        print(file=out)
        print(report.to_csv(), end="", file=out)
    for truth, message in report.failures:
        print(f"error (truth {truth}): {message}", file=sys.stderr)
    return EXIT_OK


def cmd_bench(args, out):
    cfg = effective_config(args)
    templates = _load_templates(args.templates, cfg)
    frame = _load_frame(args.frame)
    modes = ["sequential", "parallel"] if args.mode == "both" else [normalize_mode(args.mode)]
    echo_config(cfg, out)
    for mode in modes:
        timings = benchmark(frame, templates, args.runs, mode, cfg)
        print(f"\n{mode} mode, mean of {timings.runs} run(s) "
              f"(median total {timings.median_total:.4f} ms)", file=out)
        print(timings.table(), file=out)
    return EXIT_OK


# --------------------------------------------------------------------------
# argument parsing


def _config_parent():
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("pipeline configuration (flags override --config)")
    g.add_argument("--config", help="key = value configuration file")
    g.add_argument("--threshold", type=int, help="depth band width in layers")
    g.add_argument("--noise-window", type=int)
    g.add_argument("--min-object-size", type=int)
    g.add_argument("--merge-distance", type=float)
    g.add_argument("--sample-count", type=int)
    g.add_argument("--coefficient-count", type=int)
    g.add_argument("--max-distance", type=float, help="reject matches farther than this")
    return p


def _mode(text):
    if text == "both":
        return text
    try:
        return normalize_mode(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def build_parser():
    parser = argparse.ArgumentParser(
        prog="depthsign", description="Number-sign recognition from depth frames."
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    cfg = _config_parent()

    s = sub.add_parser("synth", help="write synthetic gesture frames and a manifest")
    s.add_argument("--number", type=int, choices=range(1, 11), metavar="N")
    s.add_argument("--count", type=int, default=1, help="frames for --number")
    s.add_argument("--all", action="store_true", help="frames for several numbers")
    s.add_argument("--numbers", type=parse_numbers, help="with --all, e.g. 1-5 (default 1-10)")
    s.add_argument("--per-number", type=int, default=40)
    s.add_argument("--seed", type=int, default=0, help="base seed")
    s.add_argument("--jitter", type=float, help="finger jitter in pixels")
    s.add_argument("--jitter-frac", type=float, default=0.02,
                   help="finger jitter as a fraction of palm radius (default 0.02)")
    s.add_argument("--hand-depth", type=int, default=800)
    s.add_argument("--palm-radius", type=float, default=60.0)
    s.add_argument("--format", choices=("dfr", "pgm"), default="dfr")
    s.add_argument("--out", required=True, help="output directory")
    s.set_defaults(func=cmd_synth)

    e = sub.add_parser("enroll", parents=[cfg], help="build a template file from frames")
    e.add_argument("frames_dir")
    e.add_argument("--manifest", help=f"default: FRAMES_DIR/{MANIFEST}")
    e.add_argument("--out", required=True, help="template file to write")
    e.set_defaults(func=cmd_enroll)

    r = sub.add_parser("recognize", parents=[cfg], help="recognise one frame")
    r.add_argument("frame")
    r.add_argument("--templates", required=True)
    r.add_argument("--mode", type=_mode, default=None)
    r.set_defaults(func=cmd_recognize)

    v = sub.add_parser("eval", parents=[cfg], help="evaluate a labelled frame set")
    v.add_argument("test_dir")
    v.add_argument("--manifest", help=f"default: TEST_DIR/{MANIFEST}")
    v.add_argument("--templates", required=True)
    v.add_argument("--csv", help="write the confusion matrix CSV here")
    v.add_argument("--mode", type=_mode, default=None)
    v.set_defaults(func=cmd_eval)

    b = sub.add_parser("bench", parents=[cfg], help="per-stage latency benchmark")
    b.add_argument("frame")
    b.add_argument("--templates", required=True)
    b.add_argument("--runs", type=int, default=50)
    b.add_argument("--mode", type=_mode, default="sequential",
                   help="seq, par or both (default seq)")
    b.set_defaults(func=cmd_bench)
    return parser


def main(argv=None, out=None):
    out = out or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if getattr(args, "runs", 1) < 1:
        parser.error("--runs must be >= 1")
    try:
        return args.func(args, out)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except DepthSignError as exc:
        print(f"error: {exc.stage or 'pipeline'}: {exc}", file=sys.stderr)
        return EXIT_STAGE
    except ValueError as exc:
        # invalid configuration values
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ARGS
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
