"""Running-average background model and blob detection."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .scene_io import Frame


@dataclass
class BackgroundModel:
    """Per-pixel exponential moving average of the frames seen so far.

    The first frame seeds the mean directly; later frames blend in with
    weight ``alpha``.
    """

    width: int
    height: int
    alpha: float = 0.01
    mean: np.ndarray | None = None

    def __post_init__(self):
        if not 0.0 < self.alpha <= 1.0:
            raise ValueError(f"alpha must lie in (0, 1], got {self.alpha}")

    @property
    def initialized(self) -> bool:
        return self.mean is not None


@dataclass(frozen=True)
class Blob:
    centroid: tuple[float, float]
    bbox: tuple[int, int, int, int]  # x0, y0, w, h
    area: int

    @property
    def bounds(self) -> tuple[int, int, int, int]:
        x0, y0, w, h = self.bbox
        return x0, y0, x0 + w, y0 + h


def _check_dims(model: BackgroundModel, frame: Frame):
    if (frame.width, frame.height) != (model.width, model.height):
        raise ValueError(
            f"frame is {frame.width}x{frame.height}, background model is {model.width}x{model.height}"
        )


def update_background(model: BackgroundModel, frame: Frame) -> BackgroundModel:
    _check_dims(model, frame)
    pixels = frame.pixels.astype(np.float64)
    if model.mean is None:
        model.mean = pixels
    else:
        model.mean = (1.0 - model.alpha) * model.mean + model.alpha * pixels
    return model


def subtract(model: BackgroundModel, frame: Frame, fg_threshold: float = 30.0) -> np.ndarray:
    """Boolean (h, w) mask: max channel |frame - mean| strictly above the threshold."""
    if model.mean is None:
        raise ValueError("background model is not initialized")
    _check_dims(model, frame)
    diff = np.abs(frame.pixels.astype(np.float64) - model.mean).max(axis=2)
    return diff > fg_threshold


def extract_blobs(mask: np.ndarray, min_area: int = 50) -> list[Blob]:
    """8-connected components of ``mask`` with at least ``min_area`` pixels, sorted by (y0, x0)."""
    mask = np.asarray(mask, dtype=bool)
    labels, count = _kernels.label_components(mask)
    if count == 0:
        return []
    ys, xs = np.nonzero(labels)
    lab = labels[ys, xs]
    area = np.bincount(lab, minlength=count + 1)
    sum_x = np.bincount(lab, weights=xs, minlength=count + 1)
    sum_y = np.bincount(lab, weights=ys, minlength=count + 1)
    big = np.iinfo(np.int64).max
    x_min = np.full(count + 1, big)
    y_min = np.full(count + 1, big)
    x_max = np.full(count + 1, -1)
    y_max = np.full(count + 1, -1)
    np.minimum.at(x_min, lab, xs)
    np.minimum.at(y_min, lab, ys)
    np.maximum.at(x_max, lab, xs)
    np.maximum.at(y_max, lab, ys)
    blobs = []
    for k in range(1, count + 1):
        if area[k] < min_area:
            continue
        blobs.append(
            Blob(
                centroid=(sum_x[k] / area[k], sum_y[k] / area[k]),
                bbox=(int(x_min[k]), int(y_min[k]), int(x_max[k] - x_min[k] + 1), int(y_max[k] - y_min[k] + 1)),
                area=int(area[k]),
            )
        )
    blobs.sort(key=lambda b: (b.bbox[1], b.bbox[0]))
    return blobs
