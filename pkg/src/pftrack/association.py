"""Blob-to-track data association with an occlusion queue.

Per frame, after every object has run its particle filter:

1. each tracked object (ascending id) takes the best-matching unconsumed
   blob inside its gate, if the match clears the likelihood threshold;
2. objects left without a blob keep the filter estimate when its score
   clears the threshold, otherwise they are queued as occluded and their
   motion noise is widened;
3. remaining blobs are offered to queued objects anywhere in the frame;
4. queued objects not recovered by a blob may recover on their own filter
   score, otherwise their noise keeps growing;
5. objects occluded for too long are dropped;
6. whatever blobs are still unclaimed start new objects.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .appearance import BinnedFrame, compute_histogram, similarity
from .background import Blob
from .particle_filter import Kinematics, NoiseParams, ParticleSet, init_particles
from .scene_io import TrajectoryRecord

MIN_SCALE_UPDATE = 0.5
MAX_SCALE_UPDATE = 2.0


class Status(enum.Enum):
    TRACKED = "tracked"
    OCCLUDED = "occluded"


@dataclass(eq=False)
class TrackedObject:
    id: int
    state: np.ndarray  # x, y, scale
    base_size: tuple[int, int]
    reference_histogram: np.ndarray
    particles: ParticleSet
    kinematics: Kinematics
    noise: NoiseParams
    rng: np.random.Generator
    status: Status = Status.TRACKED
    occluded_frames: int = 0
    trajectory: list[TrajectoryRecord] = field(default_factory=list)
    candidate: np.ndarray | None = None  # latest filter estimate, uncommitted
    score: float = 0.0  # raw similarity of that estimate

    def __repr__(self):
        x, y, s = self.state
        return f"TrackedObject(id={self.id}, state=({x:.1f}, {y:.1f}, {s:.2f}), status={self.status.value})"


class OcclusionQueue:
    """Occluded objects in order of occlusion onset."""

    def __init__(self):
        self._items: list[TrackedObject] = []

    def push(self, obj: TrackedObject) -> None:
        if obj in self._items:
            raise ValueError(f"object {obj.id} is already queued")
        self._items.append(obj)

    def remove(self, obj: TrackedObject) -> None:
        self._items.remove(obj)

    def __contains__(self, obj) -> bool:
        return obj in self._items

    def __iter__(self):
        return iter(list(self._items))

    def __len__(self) -> int:
        return len(self._items)

    def ids(self) -> list[int]:
        return [o.id for o in self._items]


@dataclass
class AssociationOutcome:
    associated: list[tuple[int, Blob]] = field(default_factory=list)
    pf_confirmed: list[int] = field(default_factory=list)
    newly_occluded: list[int] = field(default_factory=list)
    recovered: list[int] = field(default_factory=list)
    recovered_blobs: list[tuple[int, Blob]] = field(default_factory=list)  # blob-driven subset of recovered
    dropped: list[int] = field(default_factory=list)
    new_objects: list[int] = field(default_factory=list)


def is_within_range(blob: Blob, obj: TrackedObject, gate_factor: float = 1.5) -> bool:
    """Blob centroid inside the object's gate rectangle (edges included)."""
    x, y, scale = obj.state
    half_w = obj.base_size[0] * scale * gate_factor / 2.0
    half_h = obj.base_size[1] * scale * gate_factor / 2.0
    cx, cy = blob.centroid
    return abs(cx - x) <= half_w and abs(cy - y) <= half_h


def blob_state(blob: Blob, obj: TrackedObject) -> np.ndarray:
    """State implied by a blob: its centroid and bbox size relative to the object's base size."""
    ratio = np.sqrt((blob.bbox[2] / obj.base_size[0]) * (blob.bbox[3] / obj.base_size[1]))
    scale = float(np.clip(ratio, MIN_SCALE_UPDATE, MAX_SCALE_UPDATE))
    return np.array([blob.centroid[0], blob.centroid[1], scale])


def _mark_tracked(obj: TrackedObject) -> None:
    obj.status = Status.TRACKED
    obj.occluded_frames = 0
    obj.noise.reset()


def inflate_noise(obj: TrackedObject, increment: float = 1.0) -> TrackedObject:
    obj.noise.inflate(increment)
    return obj


def _blob_histograms(blobs, binned, config):
    return [compute_histogram(binned, b.bbox, config.histogram) for b in blobs]


def try_associate_object(obj: TrackedObject, blobs: list[Blob], binned: BinnedFrame, config,
                         consumed: set[int] | None = None, blob_hists=None) -> int | None:
    """Associate ``obj`` with its best in-gate blob; returns the blob index or None.

    On success the object's state moves to the blob and it is (re)marked tracked.
    """
    consumed = consumed if consumed is not None else set()
    blob_hists = blob_hists if blob_hists is not None else _blob_histograms(blobs, binned, config)
    best, best_pi = None, -1.0
    for i, blob in enumerate(blobs):
        if i in consumed or not is_within_range(blob, obj, config.gate_factor):
            continue
        pi = similarity(obj.reference_histogram, blob_hists[i])
        if pi > best_pi:
            best, best_pi = i, pi
    if best is None or best_pi < config.likelihood_threshold:
        return None
    state = blob_state(blobs[best], obj)
    obj.kinematics.shift(state)
    obj.state = state
    _mark_tracked(obj)
    consumed.add(best)
    return best


def _clamp_to_frame(state: np.ndarray, width: int, height: int) -> np.ndarray:
    """Filter estimates are committed on-canvas and within the blob scale limits."""
    out = state.copy()
    out[0] = min(max(out[0], 0.0), width - 1.0)
    out[1] = min(max(out[1], 0.0), height - 1.0)
    out[2] = min(max(out[2], MIN_SCALE_UPDATE), MAX_SCALE_UPDATE)
    return out


def resolve_unassociated(obj: TrackedObject, score: float, config, queue: OcclusionQueue | None = None,
                         frame_size: tuple[int, int] | None = None) -> Status:
    """Keep a blob-less object on its filter estimate, or declare it occluded."""
    if score >= config.likelihood_threshold:
        state = obj.candidate if obj.candidate is not None else obj.state
        if frame_size is not None:
            state = _clamp_to_frame(state, *frame_size)
        obj.kinematics.shift(state)
        obj.state = state
        _mark_tracked(obj)
        return Status.TRACKED
    obj.status = Status.OCCLUDED
    if queue is not None and obj not in queue:
        queue.push(obj)
    inflate_noise(obj, config.noise_increment)
    obj.occluded_frames += 1
    return Status.OCCLUDED


def _recover(obj: TrackedObject, state: np.ndarray, queue: OcclusionQueue, m_count: int) -> None:
    queue.remove(obj)
    obj.kinematics.restart(state)
    obj.state = state
    obj.particles = init_particles(state, m_count)
    _mark_tracked(obj)


def try_recover(queue: OcclusionQueue, blobs: list[Blob], binned: BinnedFrame, config,
                consumed: set[int] | None = None, blob_hists=None) -> list[tuple[int, int]]:
    """Give unclaimed blobs to the best-matching occluded objects, regardless of distance.

    Returns (object id, blob index) pairs.
    """
    consumed = consumed if consumed is not None else set()
    blob_hists = blob_hists if blob_hists is not None else _blob_histograms(blobs, binned, config)
    recoveries = []
    for i, blob in enumerate(blobs):
        if i in consumed:
            continue
        best, best_pi = None, -1.0
        for obj in queue:
            pi = similarity(obj.reference_histogram, blob_hists[i])
            if pi > best_pi:
                best, best_pi = obj, pi
        if best is None or best_pi < config.likelihood_threshold:
            continue
        _recover(best, blob_state(blob, best), queue, config.particles)
        consumed.add(i)
        recoveries.append((best.id, i))
    return recoveries


def drop_stale(queue: OcclusionQueue, max_occluded_frames: int, active: dict | None = None) -> list[int]:
    dropped = []
    for obj in queue:
        if obj.occluded_frames > max_occluded_frames:
            queue.remove(obj)
            if active is not None:
                active.pop(obj.id, None)
            dropped.append(obj.id)
    return dropped


def init_object(blob: Blob, binned: BinnedFrame, config, next_id: int) -> TrackedObject:
    state = np.array([blob.centroid[0], blob.centroid[1], 1.0])
    return TrackedObject(
        id=next_id,
        state=state,
        base_size=(blob.bbox[2], blob.bbox[3]),
        reference_histogram=compute_histogram(binned, blob.bbox, config.histogram),
        particles=init_particles(state, config.particles),
        kinematics=Kinematics.at(state),
        noise=NoiseParams(config.sigma_x, config.sigma_y, config.sigma_scale),
        rng=np.random.default_rng([config.seed, next_id]),
    )


def associate_frame(active: dict[int, TrackedObject], queue: OcclusionQueue, blobs: list[Blob],
                    binned: BinnedFrame, frame_index: int, config, next_id: int) -> tuple[AssociationOutcome, int]:
    """Run one frame of association over ``active`` (id -> object), mutating it in place.

    Every object must carry this frame's filter estimate in ``candidate`` and
    ``score``. Returns the outcome and the next unused object id.
    """
    outcome = AssociationOutcome()
    consumed: set[int] = set()
    hists = _blob_histograms(blobs, binned, config)
    frame_size = (binned.width, binned.height)
    previously_occluded = [o for o in queue]

    tracked = [active[i] for i in sorted(active) if active[i].status is Status.TRACKED]
    unmatched = []
    for obj in tracked:
        k = try_associate_object(obj, blobs, binned, config, consumed, hists)
        if k is None:
            unmatched.append(obj)
        else:
            outcome.associated.append((obj.id, blobs[k]))
    for obj in unmatched:
        if resolve_unassociated(obj, obj.score, config, queue, frame_size) is Status.TRACKED:
            outcome.pf_confirmed.append(obj.id)
        else:
            outcome.newly_occluded.append(obj.id)

    for obj_id, k in try_recover(queue, blobs, binned, config, consumed, hists):
        if obj_id in outcome.newly_occluded:
            outcome.newly_occluded.remove(obj_id)
        outcome.recovered.append(obj_id)
        outcome.recovered_blobs.append((obj_id, blobs[k]))

    for obj in previously_occluded:
        if obj.status is not Status.OCCLUDED:
            continue
        if obj.score >= config.likelihood_threshold:
            _recover(obj, _clamp_to_frame(obj.candidate, *frame_size), queue, config.particles)
            outcome.recovered.append(obj.id)
        else:
            inflate_noise(obj, config.noise_increment)
            obj.occluded_frames += 1

    outcome.dropped = drop_stale(queue, config.max_occluded_frames, active)

    for i, blob in enumerate(blobs):
        if i in consumed:
            continue
        obj = init_object(blob, binned, config, next_id)
        active[obj.id] = obj
        outcome.new_objects.append(obj.id)
        consumed.add(i)
        next_id += 1

    for obj_id in sorted(active):
        obj = active[obj_id]
        if obj.status is Status.TRACKED:
            obj.trajectory.append(TrajectoryRecord(obj.id, frame_index, float(obj.state[0]), float(obj.state[1])))
    return outcome, next_id
