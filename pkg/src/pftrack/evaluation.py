"""Ground-truth comparison, particle-count sweeps and cost-benefit analysis."""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass
from typing import Sequence

from .config import TrackerConfig
from .scene_io import Frame, TrajectoryRecord

DEFAULT_THRESHOLD = 25.0


@dataclass(frozen=True)
class EvalConfig:
    distance_threshold: float = DEFAULT_THRESHOLD
    matching: str = "greedy-mean-distance"

    def __post_init__(self):
        if self.distance_threshold <= 0:
            raise ValueError("distance_threshold must be > 0")


@dataclass(frozen=True)
class SweepRow:
    m: int
    mean_frame_millis: float
    accuracy: float

    @property
    def error_rate(self) -> float:
        return 1.0 - self.accuracy


@dataclass
class AccuracyReport:
    accuracy: float
    per_object: dict[int, tuple[int, int]]  # gt id -> (correct frames, gt frames)
    mapping: dict[int, int]

    @property
    def error_rate(self) -> float:
        return 1.0 - self.accuracy


def position_error(gt: tuple[float, float], sys: tuple[float, float]) -> float:
    return math.sqrt((gt[0] - sys[0]) ** 2 + (gt[1] - sys[1]) ** 2)


def frame_correct(e: float, threshold: float = DEFAULT_THRESHOLD) -> bool:
    return e < threshold


def _by_id(records: Sequence[TrajectoryRecord]) -> dict[int, dict[int, tuple[float, float]]]:
    tracks: dict[int, dict[int, tuple[float, float]]] = defaultdict(dict)
    for n, t, x, y in records:
        tracks[n][t] = (x, y)
    return tracks


def mean_distances(gt, sys) -> dict[tuple[int, int], float]:
    """Mean position error of every (gt id, sys id) pair over the frames both cover."""
    gt_tracks, sys_tracks = _by_id(gt), _by_id(sys)
    out = {}
    for g, gtrack in gt_tracks.items():
        for s, strack in sys_tracks.items():
            common = gtrack.keys() & strack.keys()
            if common:
                out[g, s] = sum(position_error(gtrack[t], strack[t]) for t in common) / len(common)
    return out


def match_identities(gt, sys) -> dict[int, int]:
    """Greedy gt-id -> sys-id mapping, closest mean distance first.

    Each sys id is used at most once; gt ids with no overlapping sys track
    stay unmapped.
    """
    pairs = sorted(mean_distances(gt, sys).items(), key=lambda kv: (kv[1], kv[0]))
    mapping: dict[int, int] = {}
    used = set()
    for (g, s), _ in pairs:
        if g in mapping or s in used:
            continue
        mapping[g] = s
        used.add(s)
    return mapping


def accuracy_report(gt, sys, mapping: dict[int, int] | None = None,
                    threshold: float = DEFAULT_THRESHOLD) -> AccuracyReport:
    """Fraction of gt frames whose mapped sys position lies within ``threshold``.

    Gt frames without a sys record, and whole gt objects without a mapped
    sys id, count as incorrect.
    """
    if not gt:
        raise ValueError("ground truth is empty; accuracy is undefined")
    if mapping is None:
        mapping = match_identities(gt, sys)
    gt_tracks, sys_tracks = _by_id(gt), _by_id(sys)
    per_object = {}
    for g, gtrack in sorted(gt_tracks.items()):
        strack = sys_tracks.get(mapping[g], {}) if g in mapping else {}
        correct = sum(
            1 for t, pos in gtrack.items() if t in strack and frame_correct(position_error(pos, strack[t]), threshold)
        )
        per_object[g] = (correct, len(gtrack))
    total = sum(n for _, n in per_object.values())
    return AccuracyReport(sum(c for c, _ in per_object.values()) / total, per_object, mapping)


def accuracy(gt, sys, mapping: dict[int, int] | None = None, threshold: float = DEFAULT_THRESHOLD) -> float:
    return accuracy_report(gt, sys, mapping, threshold).accuracy


def error_rate(acc: float) -> float:
    return 1.0 - acc


def sweep_particles(frames: Sequence[Frame], gt, config: TrackerConfig, m_values: Sequence[int],
                    threshold: float = DEFAULT_THRESHOLD, warmup: bool = True) -> list[SweepRow]:
    """One full tracking run per particle count, all from the same base seed.

    An untimed warm-up pass over the first few frames runs first so the
    first particle count is not charged for cold caches.
    """
    from .tracker import run

    if not m_values:
        raise ValueError("m_values is empty")
    frames = list(frames)
    if warmup and frames:
        run(frames[:10], config.replace(particles=int(m_values[0])))
    rows = []
    for m in m_values:
        records, timing = run(frames, config.replace(particles=int(m)))
        rows.append(SweepRow(int(m), timing.mean_frame_millis, accuracy(gt, records, threshold=threshold)))
    return rows


def cost_benefit(rows: Sequence[SweepRow]) -> list[tuple[int, float | None]]:
    """Normalized cumulative accuracy gain over normalized cumulative time increase.

    For each row after the first, gains are measured from the first row and
    scaled by the largest gain in the sweep (time likewise). The ratio is
    None where the time increase is zero.
    """
    if len(rows) < 2:
        raise ValueError("cost-benefit needs at least two sweep rows")
    rows = sorted(rows, key=lambda r: r.m)
    gains = [r.accuracy - rows[0].accuracy for r in rows[1:]]
    costs = [r.mean_frame_millis - rows[0].mean_frame_millis for r in rows[1:]]
    gain_scale = max((abs(g) for g in gains), default=0.0) or 1.0
    cost_scale = max((abs(c) for c in costs), default=0.0) or 1.0
    out = []
    for row, g, c in zip(rows[1:], gains, costs):
        nc = c / cost_scale
        out.append((row.m, None if nc == 0 else (g / gain_scale) / nc))
    return out


def knee(ratios: Sequence[tuple[int, float | None]]) -> int | None:
    """Particle count where the ratio peaks, if the peak is interior to the sweep."""
    defined = [(m, r) for m, r in ratios if r is not None]
    if len(defined) < 3:
        return None
    k = max(range(len(defined)), key=lambda i: (defined[i][1], -i))
    return defined[k][0] if 0 < k < len(defined) - 1 else None
