"""Tracker configuration and its ``key = value`` file format."""

from __future__ import annotations

import dataclasses
import os
from dataclasses import dataclass, fields
from pathlib import Path

from .appearance import HistogramConfig


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class TrackerConfig:
    # background
    alpha: float = 0.01
    fg_threshold: float = 30.0
    min_area: int = 50
    # particle filter
    particles: int = 100
    arma_a: float = 2.0
    arma_b: float = -1.0
    arma_c: float = 1.0
    sigma_x: float = 1.0
    sigma_y: float = 0.5
    sigma_scale: float = 0.02
    # data association
    noise_increment: float = 1.0
    likelihood_threshold: float = 0.6
    gate_factor: float = 1.5
    max_occluded_frames: int = 30
    # appearance
    n_h: int = 10
    n_s: int = 10
    n_v: int = 10
    sat_threshold: float = 0.1
    val_threshold: float = 0.2
    seed: int = 0

    def __post_init__(self):
        checks = [
            (0.0 < self.alpha <= 1.0, "alpha must lie in (0, 1]"),
            (0.0 <= self.fg_threshold <= 255.0, "fg_threshold must lie in [0, 255]"),
            (self.min_area >= 1, "min_area must be >= 1"),
            (self.particles >= 1, "particles must be >= 1"),
            (self.sigma_x > 0 and self.sigma_y > 0, "sigma_x and sigma_y must be > 0"),
            (self.sigma_scale >= 0, "sigma_scale must be >= 0"),
            (self.noise_increment >= 0, "noise_increment must be >= 0"),
            (0.0 <= self.likelihood_threshold <= 1.0, "likelihood_threshold must lie in [0, 1]"),
            (self.gate_factor > 0, "gate_factor must be > 0"),
            (self.max_occluded_frames >= 0, "max_occluded_frames must be >= 0"),
            (self.seed >= 0, "seed must be non-negative"),
        ]
        for ok, message in checks:
            if not ok:
                raise ConfigError(message)
        try:
            self.histogram
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    @property
    def histogram(self) -> HistogramConfig:
        return HistogramConfig(self.n_h, self.n_s, self.n_v, self.sat_threshold, self.val_threshold)

    def replace(self, **changes) -> "TrackerConfig":
        return dataclasses.replace(self, **changes)

    def as_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def keys(cls) -> list[str]:
        return [f.name for f in fields(cls)]


def parse_config_text(text: str, base: TrackerConfig | None = None) -> TrackerConfig:
    """Apply ``key = value`` lines on top of ``base`` (defaults if omitted)."""
    base = base or TrackerConfig()
    types = {f.name: type(getattr(base, f.name)) for f in fields(TrackerConfig)}
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in types:
            raise ConfigError(f"line {lineno}: unknown key {key!r}; valid keys: {', '.join(types)}")
        try:
            values[key] = types[key](value)
        except ValueError:
            raise ConfigError(f"line {lineno}: {key} expects {types[key].__name__}, got {value!r}") from None
    return base.replace(**values)


def load_config(path: str | os.PathLike, base: TrackerConfig | None = None) -> TrackerConfig:
    return parse_config_text(Path(path).read_text(), base)


def format_config(config: TrackerConfig) -> str:
    return "".join(f"{k} = {v}\n" for k, v in config.as_dict().items())
