"""Multi-target particle-filter tracking with blob data association."""

from ._kernels import BACKEND
from .config import TrackerConfig
from .scene_io import Frame, TrajectoryRecord

__version__ = "0.1.0"

__all__ = ["BACKEND", "Frame", "TrackerConfig", "TrajectoryRecord", "__version__"]
