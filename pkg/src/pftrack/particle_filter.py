"""Bootstrap particle filter for one tracked object.

Particles are drawn from the motion prior, so after measurement their
weights are simply the appearance similarity of the region each particle
covers. Motion is a second-order autoregressive model on the displacement
of the object from where it was first seen::

    offset_next = A * offset_now + B * offset_prev + C * noise

The offsets come from the object's committed states and are shared by all
particles; the per-particle spread comes from the Gaussian noise term.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .appearance import BinnedFrame, similarities

MIN_SCALE = 0.1


@dataclass
class ParticleSet:
    """M particles; ``states`` rows are (x, y, scale)."""

    states: np.ndarray
    weights: np.ndarray
    raw_scores: np.ndarray | None = None
    histograms: np.ndarray | None = None
    valid: np.ndarray | None = None

    def __len__(self) -> int:
        return self.states.shape[0]


@dataclass
class Kinematics:
    origin: np.ndarray
    current: np.ndarray
    previous: np.ndarray

    @classmethod
    def at(cls, state) -> "Kinematics":
        s = np.asarray(state, dtype=np.float64)
        return cls(s.copy(), s.copy(), s.copy())

    @property
    def offset(self) -> np.ndarray:
        return self.current - self.origin

    @property
    def previous_offset(self) -> np.ndarray:
        return self.previous - self.origin

    def shift(self, state) -> None:
        """Commit a new state: previous <- current <- state."""
        self.previous = self.current
        self.current = np.asarray(state, dtype=np.float64).copy()

    def restart(self, state) -> None:
        """Commit a state with no velocity history (used after occlusion)."""
        s = np.asarray(state, dtype=np.float64)
        self.previous = s.copy()
        self.current = s.copy()


@dataclass
class NoiseParams:
    sigma_x: float = 1.0
    sigma_y: float = 0.5
    sigma_scale: float = 0.02
    base: tuple[float, float, float] = field(default=None, repr=False)

    def __post_init__(self):
        if self.base is None:
            self.base = (self.sigma_x, self.sigma_y, self.sigma_scale)

    def inflate(self, increment: float) -> None:
        self.sigma_x += increment
        self.sigma_y += increment

    def reset(self) -> None:
        self.sigma_x, self.sigma_y, self.sigma_scale = self.base

    @property
    def at_base(self) -> bool:
        return (self.sigma_x, self.sigma_y, self.sigma_scale) == self.base

    def as_array(self) -> np.ndarray:
        return np.array([self.sigma_x, self.sigma_y, self.sigma_scale])


def init_particles(state, m_count: int) -> ParticleSet:
    if m_count < 1:
        raise ValueError("need at least one particle")
    states = np.tile(np.asarray(state, dtype=np.float64), (m_count, 1))
    return ParticleSet(states, np.full(m_count, 1.0 / m_count))


def transition(kin: Kinematics, noise: NoiseParams, rng: np.random.Generator,
               a: float = 2.0, b: float = -1.0, c: float = 1.0, size: int | None = None) -> np.ndarray:
    """Draw next state(s) from the ARMA motion model.

    Returns shape (3,) or (size, 3). Scale is clamped to at least 0.1.
    """
    shape = (3,) if size is None else (size, 3)
    w = rng.standard_normal(shape) * noise.as_array()
    offset = a * kin.offset + b * kin.previous_offset + c * w
    out = kin.origin + offset
    out[..., 2] = np.maximum(out[..., 2], MIN_SCALE)
    return out


def particle_bounds(states: np.ndarray, base_size) -> np.ndarray:
    """Integer pixel bounds (x_lo, y_lo, x_hi, y_hi) of each particle's region.

    Vectorised ``scene_io.centered_bounds`` with side lengths base_size * scale.
    """
    w = base_size[0] * states[:, 2]
    h = base_size[1] * states[:, 2]
    x_lo = np.ceil(states[:, 0] - w / 2.0)
    y_lo = np.ceil(states[:, 1] - h / 2.0)
    x_hi = np.maximum(np.ceil(states[:, 0] + w / 2.0), x_lo + 1)
    y_hi = np.maximum(np.ceil(states[:, 1] + h / 2.0), y_lo + 1)
    return np.stack([x_lo, y_lo, x_hi, y_hi], axis=1).astype(np.int64)


def predict(kin: Kinematics, noise: NoiseParams, base_size, particles: ParticleSet,
            binned: BinnedFrame, config, rng: np.random.Generator) -> ParticleSet:
    m = len(particles)
    states = transition(kin, noise, rng, config.arma_a, config.arma_b, config.arma_c, size=m)
    bounds = particle_bounds(states, base_size)
    hists = binned.histograms(bounds)
    valid = hists.sum(axis=1) > 0
    return ParticleSet(states, particles.weights.copy(), histograms=hists, valid=valid)


def measure(particles: ParticleSet, q_ref: np.ndarray) -> ParticleSet:
    raw = similarities(q_ref, particles.histograms)
    if particles.valid is not None:
        raw[~particles.valid] = 0.0
    particles.raw_scores = raw
    particles.weights = raw.copy()
    return particles


def normalize_weights(particles: ParticleSet) -> ParticleSet:
    total = particles.weights.sum()
    m = len(particles)
    if total > 0:
        particles.weights = particles.weights / total
    else:
        particles.weights = np.full(m, 1.0 / m)
    return particles


def select_best(particles: ParticleSet) -> tuple[np.ndarray, float]:
    """State and raw score of the best-scoring particle (lowest index on ties)."""
    if len(particles) == 0:
        raise ValueError("empty particle set")
    scores = particles.raw_scores if particles.raw_scores is not None else particles.weights
    k = int(np.argmax(scores))
    return particles.states[k].copy(), float(scores[k])


def resample(particles: ParticleSet, rng: np.random.Generator) -> ParticleSet:
    m = len(particles)
    idx = _kernels.systematic_indices(particles.weights, rng.random())
    return ParticleSet(particles.states[idx].copy(), np.full(m, 1.0 / m))


def pf_step(obj, binned: BinnedFrame, config) -> tuple[np.ndarray, float]:
    """One predict/measure/normalize/select/resample pass for ``obj``.

    ``obj`` needs ``kinematics``, ``noise``, ``base_size``, ``particles``,
    ``reference_histogram`` and ``rng``. The resampled set is stored back on
    the object; the returned candidate state is not committed.
    """
    ps = predict(obj.kinematics, obj.noise, obj.base_size, obj.particles, binned, config, obj.rng)
    ps = measure(ps, obj.reference_histogram)
    ps = normalize_weights(ps)
    state, score = select_best(ps)
    obj.particles = resample(ps, obj.rng)
    return state, score
