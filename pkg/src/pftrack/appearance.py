"""HSV colour histograms and the Bhattacharyya similarity between them.

Pixels that are both saturated and bright enough vote in a joint hue x
saturation grid; the rest vote in a value-only strip appended after it, so a
histogram has ``n_h * n_s + n_v`` bins.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .scene_io import Frame, clip_bounds


class EmptyRegionError(ValueError):
    pass


@dataclass(frozen=True)
class HistogramConfig:
    n_h: int = 10
    n_s: int = 10
    n_v: int = 10
    sat_threshold: float = 0.1
    val_threshold: float = 0.2

    def __post_init__(self):
        if min(self.n_h, self.n_s, self.n_v) < 1:
            raise ValueError("bin counts must be positive")
        if self.nbins < 2:
            raise ValueError("need at least 2 bins in total")
        if not (0.0 <= self.sat_threshold <= 1.0 and 0.0 <= self.val_threshold <= 1.0):
            raise ValueError("saturation/value thresholds must lie in [0, 1]")

    @property
    def nbins(self) -> int:
        return self.n_h * self.n_s + self.n_v


def rgb_to_hsv(r: int, g: int, b: int) -> tuple[float, float, float]:
    """Hexcone conversion of 8-bit RGB; hue in degrees [0, 360), 0 for greys."""
    mx, mn = max(r, g, b), min(r, g, b)
    delta = mx - mn
    v = mx / 255.0
    s = 0.0 if mx == 0 else delta / mx
    if delta == 0:
        h = 0.0
    elif mx == r:
        h = 60.0 * (((g - b) / delta) % 6.0)
    elif mx == g:
        h = 60.0 * ((b - r) / delta + 2.0)
    else:
        h = 60.0 * ((r - g) / delta + 4.0)
    return h, s, v


def hsv_bin(h: float, s: float, v: float, config: HistogramConfig = HistogramConfig()) -> int:
    if s > config.sat_threshold and v > config.val_threshold:
        hb = min(int(math.floor(h / 360.0 * config.n_h)), config.n_h - 1)
        sb = min(int(math.floor(s * config.n_s)), config.n_s - 1)
        return hb * config.n_s + sb
    return config.n_h * config.n_s + min(int(math.floor(v * config.n_v)), config.n_v - 1)


def bin_map(pixels: np.ndarray, config: HistogramConfig = HistogramConfig()) -> np.ndarray:
    """Histogram bin index of every pixel, shape (h, w), int32.

    Agrees exactly with ``hsv_bin(*rgb_to_hsv(...))`` applied per pixel.
    """
    return _kernels.bin_map(pixels, config.n_h, config.n_s, config.n_v,
                            config.sat_threshold, config.val_threshold)


class BinnedFrame:
    """A frame converted once to bin indices, for repeated region histograms."""

    def __init__(self, frame: Frame, config: HistogramConfig = HistogramConfig()):
        self.frame = frame
        self.config = config
        self.binmap = bin_map(frame.pixels, config)

    @property
    def width(self) -> int:
        return self.binmap.shape[1]

    @property
    def height(self) -> int:
        return self.binmap.shape[0]

    def histograms(self, bounds: np.ndarray) -> np.ndarray:
        """Histograms over ``(x_lo, y_lo, x_hi, y_hi)`` rows, clipped to the frame.

        Rows whose clipped region is empty come back all zero.
        """
        bounds = np.asarray(bounds, dtype=np.int64).reshape(-1, 4).copy()
        bounds[:, [0, 2]] = np.clip(bounds[:, [0, 2]], 0, self.width)
        bounds[:, [1, 3]] = np.clip(bounds[:, [1, 3]], 0, self.height)
        return _kernels.region_histograms(self.binmap, bounds, self.config.nbins)


def compute_histogram(frame, region: tuple[int, int, int, int], config: HistogramConfig = HistogramConfig()) -> np.ndarray:
    """Normalized histogram of the bbox ``(x0, y0, w, h)`` clipped to the frame.

    ``frame`` may be a Frame or a BinnedFrame built with the same config.
    """
    binned = frame if isinstance(frame, BinnedFrame) else BinnedFrame(frame, config)
    x0, y0, w, h = region
    bounds = clip_bounds((x0, y0, x0 + w, y0 + h), binned.width, binned.height)
    if bounds[2] <= bounds[0] or bounds[3] <= bounds[1]:
        raise EmptyRegionError(f"region {region} lies outside the {binned.width}x{binned.height} frame")
    return binned.histograms(np.array([bounds]))[0]


def _coefficient(q_ref: np.ndarray, q: np.ndarray) -> float:
    q_ref = np.asarray(q_ref, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    if q_ref.shape != q.shape:
        raise ValueError(f"bin count mismatch: {q_ref.shape[-1]} vs {q.shape[-1]}")
    norm = math.sqrt(float(q_ref.sum()) * float(q.sum()))
    if norm <= 0.0:
        raise ValueError("histogram has no mass")
    # dividing by the actual masses keeps identical inputs at exactly 1
    rho = float(np.sqrt(q_ref * q).sum()) / norm
    return min(max(rho, 0.0), 1.0)


def similarity(q_ref: np.ndarray, q: np.ndarray) -> float:
    """Bhattacharyya coefficient in [0, 1]; 1 for identical histograms."""
    return _coefficient(q_ref, q)


def bhattacharyya_distance(q_ref: np.ndarray, q: np.ndarray) -> float:
    return math.sqrt(1.0 - _coefficient(q_ref, q))


def similarities(q_ref: np.ndarray, candidates: np.ndarray) -> np.ndarray:
    """Row-wise ``similarity(q_ref, row)``; rows with no mass score 0."""
    q_ref = np.asarray(q_ref, dtype=np.float64)
    candidates = np.atleast_2d(np.asarray(candidates, dtype=np.float64))
    if candidates.shape[1] != q_ref.shape[0]:
        raise ValueError(f"bin count mismatch: {q_ref.shape[0]} vs {candidates.shape[1]}")
    masses = candidates.sum(axis=1)
    norm = np.sqrt(float(q_ref.sum()) * masses)
    rho = np.sqrt(candidates * q_ref).sum(axis=1)
    out = np.divide(rho, norm, out=np.zeros_like(rho), where=norm > 0)
    return np.clip(out, 0.0, 1.0)
