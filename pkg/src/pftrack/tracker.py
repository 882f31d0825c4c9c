"""Frame-by-frame pipeline: detect blobs, filter every object, associate."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Iterable

from .appearance import BinnedFrame
from .association import AssociationOutcome, OcclusionQueue, Status, TrackedObject, associate_frame
from .background import BackgroundModel, extract_blobs, subtract, update_background
from .config import TrackerConfig
from .particle_filter import pf_step
from .scene_io import Frame, TrajectoryRecord


@dataclass
class FrameTiming:
    frame: int
    millis: float
    object_count: int
    blob_count: int


@dataclass
class FrameSummary:
    frame: int
    blob_count: int
    outcome: AssociationOutcome | None  # None when the frame had nothing to track
    timing: FrameTiming


@dataclass
class TrackerState:
    config: TrackerConfig
    background: BackgroundModel | None = None
    active: dict[int, TrackedObject] = field(default_factory=dict)
    queue: OcclusionQueue = field(default_factory=OcclusionQueue)
    next_id: int = 0
    finished: list[TrackedObject] = field(default_factory=list)  # dropped objects keep their history
    timings: list[FrameTiming] = field(default_factory=list)
    last_index: int = -1

    def trajectories(self) -> list[TrajectoryRecord]:
        records = [r for o in list(self.active.values()) + self.finished for r in o.trajectory]
        return sorted(records, key=lambda r: (r.n, r.t))


@dataclass
class TimingReport:
    total_millis: float
    mean_frame_millis: float
    frames: list[FrameTiming]

    def to_csv(self) -> str:
        lines = ["frame,millis,object_count,blob_count\n"]
        lines += [f"{f.frame},{f.millis:.4f},{f.object_count},{f.blob_count}\n" for f in self.frames]
        return "".join(lines)


def process_frame(state: TrackerState, frame: Frame) -> FrameSummary:
    cfg = state.config
    if frame.index <= state.last_index:
        raise ValueError(f"frame {frame.index} arrived after frame {state.last_index}")
    if state.background is None:
        state.background = BackgroundModel(frame.width, frame.height, cfg.alpha)
    update_background(state.background, frame)
    mask = subtract(state.background, frame, cfg.fg_threshold)
    blobs = extract_blobs(mask, cfg.min_area)
    state.last_index = frame.index

    start = time.perf_counter()
    outcome = None
    if blobs or state.active:
        binned = BinnedFrame(frame, cfg.histogram)
        for obj_id in sorted(state.active):
            obj = state.active[obj_id]
            obj.candidate, obj.score = pf_step(obj, binned, cfg)
        before = dict(state.active)
        outcome, state.next_id = associate_frame(
            state.active, state.queue, blobs, binned, frame.index, cfg, state.next_id
        )
        state.finished.extend(before[i] for i in outcome.dropped)
    millis = (time.perf_counter() - start) * 1000.0

    timing = FrameTiming(frame.index, millis, len(state.active), len(blobs))
    state.timings.append(timing)
    return FrameSummary(frame.index, len(blobs), outcome, timing)


def run(frames: Iterable[Frame], config: TrackerConfig | None = None) -> tuple[list[TrajectoryRecord], TimingReport]:
    """Track over ``frames``; returns NTXY records sorted by (n, t) and timings."""
    state = TrackerState(config or TrackerConfig())
    count = 0
    for frame in frames:
        process_frame(state, frame)
        count += 1
    if count == 0:
        raise ValueError("no frames to track")
    total = sum(t.millis for t in state.timings)
    report = TimingReport(total, total / count, state.timings)
    return state.trajectories(), report


def tracked_ids(state: TrackerState) -> list[int]:
    return [i for i in sorted(state.active) if state.active[i].status is Status.TRACKED]
