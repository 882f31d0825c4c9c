"""Frames, trajectories and synthetic scenes.

Frames travel as binary P6 rasters (max value 255 only). Trajectories are
NTXY text: one ``N,T,X,Y`` line per record, coordinates with two decimals.
Synthetic scenes are described by a small ``key = value`` file with one
``[actor]`` block per moving rectangle; see ``parse_scene_spec``.
"""

from __future__ import annotations

import math
import os
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Iterable, NamedTuple, Sequence

import numpy as np

DEFAULT_PATTERN = "frame_%06d.ppm"


class DecodeError(ValueError):
    """Malformed P6 content. ``offset`` is the byte position of the problem."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at byte {offset})")
        self.offset = offset


class SequenceError(ValueError):
    pass


class NtxyParseError(ValueError):
    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


class SceneSpecError(ValueError):
    def __init__(self, message: str, key: str | None = None):
        super().__init__(f"{key}: {message}" if key else message)
        self.key = key


@dataclass(eq=False)
class Frame:
    """An RGB raster. ``pixels`` has shape (height, width, 3), dtype uint8."""

    pixels: np.ndarray
    index: int = 0

    def __post_init__(self):
        px = np.asarray(self.pixels)
        if px.ndim != 3 or px.shape[2] != 3:
            raise ValueError(f"pixels must have shape (h, w, 3), got {px.shape}")
        if px.shape[0] < 1 or px.shape[1] < 1:
            raise ValueError("frame must be at least 1x1")
        if px.dtype != np.uint8:
            if px.size and (px.min() < 0 or px.max() > 255):
                raise ValueError("pixel values must lie in 0..255")
            px = px.astype(np.uint8)
        self.pixels = np.ascontiguousarray(px)
        if self.index < 0:
            raise ValueError("frame index must be non-negative")

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    def pixel(self, x: int, y: int) -> tuple[int, int, int]:
        r, g, b = self.pixels[y, x]
        return int(r), int(g), int(b)

    def __eq__(self, other):
        if not isinstance(other, Frame):
            return NotImplemented
        return self.index == other.index and np.array_equal(self.pixels, other.pixels)

    def __repr__(self):
        return f"Frame(index={self.index}, width={self.width}, height={self.height})"


class TrajectoryRecord(NamedTuple):
    n: int
    t: int
    x: float
    y: float


# -- P6 codec ---------------------------------------------------------------

_WS = b" \t\n\r\v\f"


def _read_token(data: bytes, pos: int) -> tuple[bytes, int]:
    while pos < len(data):
        c = data[pos : pos + 1]
        if c == b"#":
            while pos < len(data) and data[pos : pos + 1] not in (b"\n", b"\r"):
                pos += 1
        elif c in _WS:
            pos += 1
        else:
            break
    start = pos
    while pos < len(data) and data[pos : pos + 1] not in _WS and data[pos : pos + 1] != b"#":
        pos += 1
    if start == pos:
        raise DecodeError("unexpected end of header", start)
    return data[start:pos], pos


def decode_frame(data: bytes, index: int = 0) -> Frame:
    """Decode binary P6 content into a Frame."""
    data = bytes(data)
    if data[:2] != b"P6":
        raise DecodeError(f"bad magic {data[:2]!r}, expected b'P6'", 0)
    if len(data) < 3 or data[2:3] not in _WS:
        raise DecodeError("missing whitespace after magic", 2)
    pos = 2
    values = []
    for name in ("width", "height", "max value"):
        start = pos
        token, pos = _read_token(data, pos)
        if not token.isdigit():
            raise DecodeError(f"{name} is not a decimal integer: {token!r}", start)
        values.append(int(token))
    width, height, maxval = values
    if width < 1 or height < 1:
        raise DecodeError(f"invalid dimensions {width}x{height}", pos)
    if maxval != 255:
        raise DecodeError(f"max value {maxval} unsupported, only 255", pos)
    if pos >= len(data) or data[pos : pos + 1] not in _WS:
        raise DecodeError("missing whitespace byte before pixel data", pos)
    pos += 1
    need = width * height * 3
    have = len(data) - pos
    if have < need:
        raise DecodeError(f"truncated pixel data: need {need} bytes, have {have}", len(data))
    if have > need:
        raise DecodeError(f"{have - need} trailing bytes after pixel data", pos + need)
    pixels = np.frombuffer(data, dtype=np.uint8, count=need, offset=pos)
    return Frame(pixels.reshape(height, width, 3).copy(), index)


def encode_frame(frame: Frame) -> bytes:
    header = f"P6\n{frame.width} {frame.height}\n255\n".encode("ascii")
    return header + frame.pixels.tobytes()


def read_frame(path: str | os.PathLike, index: int = 0) -> Frame:
    return decode_frame(Path(path).read_bytes(), index)


def write_frame(frame: Frame, path: str | os.PathLike) -> None:
    Path(path).write_bytes(encode_frame(frame))


def _pattern_regex(pattern: str) -> re.Pattern:
    m = re.search(r"%(0?)(\d*)d", pattern)
    if m is None:
        raise ValueError(f"pattern {pattern!r} has no integer field")
    digits = m.group(2)
    field_re = rf"(\d{{{digits}}})" if m.group(1) and digits else r"(\d+)"
    return re.compile(re.escape(pattern[: m.start()]) + field_re + re.escape(pattern[m.end() :]) + r"\Z")


def load_sequence(directory: str | os.PathLike, pattern: str = DEFAULT_PATTERN) -> list[Frame]:
    """Load ``pattern``-named frames from ``directory`` in index order.

    Indices must start at 0 and be contiguous; an empty directory yields [].
    """
    regex = _pattern_regex(pattern)
    found = {}
    for entry in os.listdir(directory):
        m = regex.match(entry)
        if m:
            found[int(m.group(1))] = entry
    frames: list[Frame] = []
    for expected, idx in enumerate(sorted(found)):
        if idx != expected:
            raise SequenceError(f"missing frame index {expected} ({pattern % expected})")
        frame = read_frame(Path(directory) / found[idx], idx)
        if frames and (frame.width, frame.height) != (frames[0].width, frames[0].height):
            raise SequenceError(
                f"frame {idx} is {frame.width}x{frame.height}, "
                f"expected {frames[0].width}x{frames[0].height}"
            )
        frames.append(frame)
    return frames


def write_sequence(frames: Iterable[Frame], directory: str | os.PathLike, pattern: str = DEFAULT_PATTERN) -> int:
    os.makedirs(directory, exist_ok=True)
    count = 0
    for frame in frames:
        write_frame(frame, Path(directory) / (pattern % frame.index))
        count += 1
    return count


# -- NTXY -------------------------------------------------------------------


def format_ntxy(records: Sequence[TrajectoryRecord]) -> str:
    keys = [(r[0], r[1]) for r in records]
    if keys != sorted(keys):
        raise ValueError("records must be sorted by (n, t)")
    return "".join(f"{int(n)},{int(t)},{x:.2f},{y:.2f}\n" for n, t, x, y in records)


def write_ntxy(records: Sequence[TrajectoryRecord], destination: str | os.PathLike | IO) -> int:
    """Write NTXY lines to a path or binary/text stream; returns bytes written."""
    data = format_ntxy(records).encode("ascii")
    if hasattr(destination, "write"):
        try:
            destination.write(data)
        except TypeError:
            destination.write(data.decode("ascii"))
    else:
        with open(destination, "wb") as fh:
            fh.write(data)
    return len(data)


def parse_ntxy(data: bytes | str) -> list[TrajectoryRecord]:
    text = data.decode("ascii") if isinstance(data, (bytes, bytearray)) else data
    records = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        parts = line.strip().split(",")
        if len(parts) != 4:
            raise NtxyParseError(f"expected 4 fields, got {len(parts)}", lineno)
        try:
            n, t = int(parts[0]), int(parts[1])
            x, y = float(parts[2]), float(parts[3])
        except ValueError as exc:
            raise NtxyParseError(f"non-numeric field ({exc})", lineno) from None
        if not (math.isfinite(x) and math.isfinite(y)):
            raise NtxyParseError("non-finite coordinate", lineno)
        records.append(TrajectoryRecord(n, t, x, y))
    return records


def read_ntxy(path: str | os.PathLike) -> list[TrajectoryRecord]:
    return parse_ntxy(Path(path).read_bytes())


# -- synthetic scenes -------------------------------------------------------


def centered_bounds(cx: float, cy: float, w: float, h: float) -> tuple[int, int, int, int]:
    """Pixel bounds ``(x_lo, y_lo, x_hi, y_hi)`` (upper exclusive) of a centered box.

    A pixel is covered when its center i satisfies ``cx - w/2 <= i < cx + w/2``;
    at least one pixel per axis is always covered.
    """
    x_lo = math.ceil(cx - w / 2.0)
    x_hi = max(math.ceil(cx + w / 2.0), x_lo + 1)
    y_lo = math.ceil(cy - h / 2.0)
    y_hi = max(math.ceil(cy + h / 2.0), y_lo + 1)
    return x_lo, y_lo, x_hi, y_hi


def clip_bounds(bounds, width: int, height: int) -> tuple[int, int, int, int]:
    x_lo, y_lo, x_hi, y_hi = bounds
    return max(x_lo, 0), max(y_lo, 0), min(x_hi, width), min(y_hi, height)


@dataclass
class Actor:
    color: tuple[int, int, int]
    start: tuple[float, float]
    velocity: tuple[float, float] = (0.0, 0.0)
    size: tuple[int, int] = (10, 10)
    enter_frame: int = 0
    exit_frame: int | None = None  # exclusive; None means the scene duration

    def center(self, t: int) -> tuple[float, float]:
        k = t - self.enter_frame
        return self.start[0] + k * self.velocity[0], self.start[1] + k * self.velocity[1]


@dataclass
class SceneSpec:
    width: int
    height: int
    duration: int
    background_color: tuple[int, int, int] = (0, 0, 0)
    actors: list[Actor] = field(default_factory=list)
    seed: int = 0
    noise: int = 0  # per-channel uniform integer noise amplitude

    def exit_of(self, actor: Actor) -> int:
        return self.duration if actor.exit_frame is None else actor.exit_frame

    def validate(self) -> None:
        if self.width < 1:
            raise SceneSpecError("must be >= 1", "width")
        if self.height < 1:
            raise SceneSpecError("must be >= 1", "height")
        if self.duration < 1:
            raise SceneSpecError("must be >= 1", "duration")
        if self.seed < 0:
            raise SceneSpecError("must be an unsigned integer", "seed")
        if not 0 <= self.noise <= 255:
            raise SceneSpecError("must lie in 0..255", "noise")
        _check_color(self.background_color, "background")
        for i, actor in enumerate(self.actors):
            where = f"actor {i}"
            _check_color(actor.color, f"{where} color")
            if actor.size[0] < 1 or actor.size[1] < 1:
                raise SceneSpecError("width and height must be >= 1", f"{where} size")
            exit_frame = self.exit_of(actor)
            if not 0 <= actor.enter_frame <= exit_frame <= self.duration:
                raise SceneSpecError(
                    f"need 0 <= enter ({actor.enter_frame}) <= exit ({exit_frame}) <= duration",
                    f"{where} enter/exit",
                )
            active = range(actor.enter_frame, exit_frame)
            if len(active) and not any(self._visible(actor, t) for t in active):
                raise SceneSpecError("rectangle is off-canvas for its whole active range", f"{where} start")

    def _visible(self, actor: Actor, t: int) -> bool:
        b = clip_bounds(centered_bounds(*actor.center(t), *actor.size), self.width, self.height)
        return b[2] > b[0] and b[3] > b[1]


def _check_color(color, key):
    if len(color) != 3 or any(not 0 <= int(c) <= 255 for c in color):
        raise SceneSpecError(f"expected three values in 0..255, got {color!r}", key)


def generate_scene(spec: SceneSpec) -> tuple[list[Frame], list[TrajectoryRecord]]:
    """Render ``spec`` to frames plus ground truth sorted by (actor, frame).

    Actors are filled rectangles drawn in list order (later on top); the
    ground-truth position is the rectangle's nominal center.
    """
    spec.validate()
    rng = np.random.default_rng(spec.seed)
    base = np.empty((spec.height, spec.width, 3), dtype=np.uint8)
    base[:] = np.asarray(spec.background_color, dtype=np.uint8)
    frames = []
    for t in range(spec.duration):
        canvas = base.copy()
        for actor in spec.actors:
            if actor.enter_frame <= t < spec.exit_of(actor):
                x_lo, y_lo, x_hi, y_hi = clip_bounds(
                    centered_bounds(*actor.center(t), *actor.size), spec.width, spec.height
                )
                if x_hi > x_lo and y_hi > y_lo:
                    canvas[y_lo:y_hi, x_lo:x_hi] = actor.color
        if spec.noise:
            jitter = rng.integers(-spec.noise, spec.noise + 1, size=canvas.shape)
            canvas = np.clip(canvas.astype(np.int16) + jitter, 0, 255).astype(np.uint8)
        frames.append(Frame(canvas, t))
    truth = [
        TrajectoryRecord(i, t, *actor.center(t))
        for i, actor in enumerate(spec.actors)
        for t in range(actor.enter_frame, spec.exit_of(actor))
    ]
    return frames, truth


_SCENE_KEYS = {"width", "height", "duration", "background", "seed", "noise"}
_ACTOR_KEYS = {"color", "start", "velocity", "size", "enter", "exit"}


def _numbers(value: str, count: int, key: str, cast=float):
    parts = [p.strip() for p in value.split(",")]
    if len(parts) != count:
        raise SceneSpecError(f"expected {count} comma-separated values, got {value!r}", key)
    try:
        return tuple(cast(p) for p in parts)
    except ValueError:
        raise SceneSpecError(f"not numeric: {value!r}", key) from None


def parse_scene_spec(text: str) -> SceneSpec:
    """Parse the scene file format.

    Grammar, one statement per line (``#`` starts a comment)::

        width = <int>            height = <int>        duration = <int>
        background = <r>,<g>,<b> seed = <int>          noise = <int>   (optional)
        [actor]                  # starts a new actor block
        color = <r>,<g>,<b>      start = <x>,<y>       size = <w>,<h>
        velocity = <dx>,<dy>     enter = <int>         exit = <int>

    ``velocity`` defaults to 0,0, ``enter`` to 0 and ``exit`` (exclusive) to
    the duration. ``width``, ``height``, ``duration``, and per actor
    ``color``, ``start`` and ``size`` are required.
    """
    top: dict[str, str] = {}
    blocks: list[dict[str, str]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line == "[actor]":
            blocks.append({})
            continue
        if "=" not in line:
            raise SceneSpecError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        target, allowed = (blocks[-1], _ACTOR_KEYS) if blocks else (top, _SCENE_KEYS)
        if key not in allowed:
            raise SceneSpecError(f"line {lineno}: unknown key (valid: {', '.join(sorted(allowed))})", key)
        if key in target:
            raise SceneSpecError(f"line {lineno}: duplicate key", key)
        target[key] = value

    def integer(src, key, default=None):
        if key not in src:
            if default is None:
                raise SceneSpecError("missing required key", key)
            return default
        try:
            return int(src[key])
        except ValueError:
            raise SceneSpecError(f"not an integer: {src[key]!r}", key) from None

    actors = []
    for block in blocks:
        for key in ("color", "start", "size"):
            if key not in block:
                raise SceneSpecError("missing required key in [actor] block", key)
        actors.append(
            Actor(
                color=_numbers(block["color"], 3, "color", int),
                start=_numbers(block["start"], 2, "start"),
                velocity=_numbers(block.get("velocity", "0,0"), 2, "velocity"),
                size=_numbers(block["size"], 2, "size", int),
                enter_frame=integer(block, "enter", 0),
                exit_frame=integer(block, "exit") if "exit" in block else None,
            )
        )
    spec = SceneSpec(
        width=integer(top, "width"),
        height=integer(top, "height"),
        duration=integer(top, "duration"),
        background_color=_numbers(top.get("background", "0,0,0"), 3, "background", int),
        actors=actors,
        seed=integer(top, "seed", 0),
        noise=integer(top, "noise", 0),
    )
    spec.validate()
    return spec


def load_scene_spec(path: str | os.PathLike) -> SceneSpec:
    return parse_scene_spec(Path(path).read_text())


def bundled_scene(name: str) -> SceneSpec:
    """One of the scenes shipped with the package: linear_single, three_walkers, merge_split."""
    path = Path(__file__).parent / "scenes" / f"{name}.scene"
    if not path.exists():
        raise FileNotFoundError(f"no bundled scene named {name!r}")
    return load_scene_spec(path)
