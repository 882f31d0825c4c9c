"""``pftrack`` command line: synth, track, eval, sweep.

Exit codes: 0 success, 1 usage or configuration error, 2 data error.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

from . import __version__
from .config import ConfigError, TrackerConfig, load_config
from .evaluation import DEFAULT_THRESHOLD, accuracy_report, cost_benefit, knee, sweep_particles
from .scene_io import (
    DecodeError,
    NtxyParseError,
    SceneSpecError,
    SequenceError,
    bundled_scene,
    generate_scene,
    load_scene_spec,
    load_sequence,
    read_ntxy,
    write_ntxy,
    write_sequence,
)
from .tracker import run

EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 1, 2
DEFAULT_M_LIST = list(range(50, 131, 10))


class UsageError(Exception):
    pass


class DataError(Exception):
    pass


@dataclass
class RunManifest:
    command: str
    config: dict | None
    inputs: dict[str, str]
    outputs: dict[str, str]
    seed: int | None
    version: str = __version__
    wall_clock_seconds: float = 0.0
    extra: dict = field(default_factory=dict)

    def write(self, path: Path) -> None:
        path.write_text(json.dumps(asdict(self), indent=2, sort_keys=True) + "\n")


def _config(args) -> TrackerConfig:
    try:
        cfg = load_config(args.config) if args.config else TrackerConfig()
        overrides = {}
        if getattr(args, "particles", None) is not None:
            overrides["particles"] = args.particles
        if getattr(args, "seed", None) is not None:
            overrides["seed"] = args.seed
        return cfg.replace(**overrides)
    except OSError as exc:
        raise UsageError(f"cannot read config: {exc}") from None
    except ConfigError as exc:
        raise UsageError(str(exc)) from None


def _frames(directory):
    path = Path(directory)
    if not path.is_dir():
        raise DataError(f"frame directory not found: {directory}")
    try:
        frames = load_sequence(path)
    except (DecodeError, SequenceError) as exc:
        raise DataError(str(exc)) from None
    if not frames:
        raise DataError(f"no frames in {directory}")
    return frames


def _ntxy(path):
    try:
        return read_ntxy(path)
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from None
    except NtxyParseError as exc:
        raise DataError(f"{path}: {exc}") from None


def _scene(source: str):
    try:
        if Path(source).is_file():
            return load_scene_spec(source)
        try:
            return bundled_scene(source)
        except FileNotFoundError:
            raise UsageError(f"no scene file or bundled scene named {source!r}") from None
    except SceneSpecError as exc:
        raise UsageError(str(exc)) from None


def cmd_synth(args) -> int:
    started = time.perf_counter()
    spec = _scene(args.spec)
    out = Path(args.out)
    frames_dir = out / "frames"
    frames_dir.mkdir(parents=True, exist_ok=True)
    frames, gt = generate_scene(spec)
    write_sequence(frames, frames_dir)
    gt_path = out / "gt.ntxy"
    write_ntxy(gt, gt_path)
    RunManifest(
        "synth", None, {"spec": str(args.spec)},
        {"frames": str(frames_dir), "gt": str(gt_path)}, spec.seed,
        wall_clock_seconds=time.perf_counter() - started,
        extra={"frames": len(frames), "objects": len({r.n for r in gt})},
    ).write(out / "manifest.json")
    print(f"wrote {len(frames)} frames and {len(gt)} gt records to {out}")
    return EXIT_OK


def cmd_track(args) -> int:
    started = time.perf_counter()
    cfg = _config(args)
    frames = _frames(args.frames)
    records, timing = run(frames, cfg)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    write_ntxy(records, out)
    timing_path = out.with_suffix(".timing.csv")
    timing_path.write_text(timing.to_csv())
    RunManifest(
        "track", cfg.as_dict(), {"frames": str(args.frames), "config": str(args.config or "")},
        {"ntxy": str(out), "timing": str(timing_path)}, cfg.seed,
        wall_clock_seconds=time.perf_counter() - started,
        extra={"tracking_millis": timing.total_millis, "mean_frame_millis": timing.mean_frame_millis},
    ).write(out.with_suffix(".manifest.json"))
    ids = sorted({r.n for r in records})
    print(f"tracked {len(frames)} frames: {len(ids)} ids, {len(records)} records, "
          f"{timing.mean_frame_millis:.3f} ms/frame")
    return EXIT_OK


def cmd_eval(args) -> int:
    gt, sys_records = _ntxy(args.gt), _ntxy(args.sys)
    if not gt:
        raise DataError(f"ground truth {args.gt} is empty")
    if args.threshold <= 0:
        raise UsageError("--threshold must be > 0")
    report = accuracy_report(gt, sys_records, threshold=args.threshold)
    rows = []
    for g, (correct, total) in report.per_object.items():
        s = report.mapping.get(g)
        acc = correct / total
        rows.append((g, "" if s is None else s, correct, total, acc))
        print(f"gt {g} -> sys {'-' if s is None else s}: {correct}/{total} correct, accuracy {acc:.4f}")
    print(f"accuracy {report.accuracy:.4f} error rate {report.error_rate:.4f} (threshold {args.threshold:g})")
    if args.out:
        with open(args.out, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["gt_id", "sys_id", "correct", "frames", "accuracy"])
            w.writerows(rows)
            w.writerow(["all", "", sum(r[2] for r in rows), sum(r[3] for r in rows), report.accuracy])
    return EXIT_OK


def _m_list(text: str | None) -> list[int]:
    if text is None:
        return DEFAULT_M_LIST
    try:
        values = [int(v) for v in text.replace(" ", "").split(",") if v]
    except ValueError:
        raise UsageError(f"--m-list expects comma-separated integers, got {text!r}") from None
    if not values or min(values) < 1:
        raise UsageError("--m-list needs at least one positive particle count")
    return values


def cmd_sweep(args) -> int:
    started = time.perf_counter()
    cfg = _config(args)
    m_values = _m_list(args.m_list)
    frames = _frames(args.frames)
    gt = _ntxy(args.gt)
    if not gt:
        raise DataError(f"ground truth {args.gt} is empty")
    rows = sweep_particles(frames, gt, cfg, m_values, args.threshold)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    sweep_path = out / "sweep.csv"
    with open(sweep_path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["m", "mean_frame_millis", "accuracy", "error_rate"])
        for r in rows:
            w.writerow([r.m, f"{r.mean_frame_millis:.4f}", f"{r.accuracy:.6f}", f"{r.error_rate:.6f}"])
    outputs = {"sweep": str(sweep_path)}
    status = EXIT_OK
    try:
        ratios = cost_benefit(rows)
    except ValueError as exc:
        print(f"cost-benefit skipped: {exc}", file=sys.stderr)
        ratios = None
        status = EXIT_DATA
    if ratios is not None:
        cb_path = out / "cost_benefit.csv"
        with open(cb_path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["m", "ratio"])
            w.writerows([m, "" if r is None else f"{r:.6f}"] for m, r in ratios)
        outputs["cost_benefit"] = str(cb_path)
        k = knee(ratios)
        print("knee at M=%d" % k if k is not None else "no interior knee")
    for r in rows:
        print(f"M={r.m}: {r.mean_frame_millis:.3f} ms/frame, error rate {r.error_rate:.4f}")
    RunManifest(
        "sweep", cfg.as_dict(), {"frames": str(args.frames), "gt": str(args.gt), "config": str(args.config or "")},
        outputs, cfg.seed, wall_clock_seconds=time.perf_counter() - started, extra={"m_list": m_values},
    ).write(out / "manifest.json")
    return status


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pftrack", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="render a scene spec to frames and ground truth")
    p.add_argument("spec", help="scene file, or a bundled scene name")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_synth)

    def tracker_flags(p):
        p.add_argument("--config", help="key = value config file")
        p.add_argument("--particles", type=int, help="particles per object")
        p.add_argument("--seed", type=int, help="base RNG seed")

    p = sub.add_parser("track", help="track objects through a frame directory")
    p.add_argument("frames", help="directory of frame_NNNNNN.ppm files")
    p.add_argument("--out", required=True, help="output NTXY path")
    tracker_flags(p)
    p.set_defaults(func=cmd_track)

    p = sub.add_parser("eval", help="score tracker output against ground truth")
    p.add_argument("gt")
    p.add_argument("sys")
    p.add_argument("--threshold", type=float, default=DEFAULT_THRESHOLD)
    p.add_argument("--out", help="report CSV path")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("sweep", help="accuracy and cost over a range of particle counts")
    p.add_argument("frames")
    p.add_argument("gt")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--m-list", help="comma-separated particle counts (default 50..130 step 10)")
    p.add_argument("--threshold", type=float, default=DEFAULT_THRESHOLD)
    tracker_flags(p)
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"pftrack: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DataError as exc:
        print(f"pftrack: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
