"""Small synthetic-frame builders shared by the tests."""

import numpy as np

from pftrack.background import Blob
from pftrack.scene_io import Frame

GREY = (80, 80, 80)
ORANGE = (200, 95, 50)
BLUE = (50, 65, 200)
GREEN = (50, 200, 65)


def canvas(squares=(), shape=(64, 64), index=0):
    """Frame with ``(color, (cx, cy), (w, h))`` rectangles painted on grey."""
    px = np.empty(shape + (3,), np.uint8)
    px[:] = GREY
    for color, (cx, cy), (w, h) in squares:
        x0, y0 = int(cx - w // 2), int(cy - h // 2)
        px[max(y0, 0):y0 + h, max(x0, 0):x0 + w] = color
    return Frame(px, index)


def blob_at(cx, cy, w=10, h=10):
    x0, y0 = int(cx - w // 2), int(cy - h // 2)
    return Blob((x0 + (w - 1) / 2, y0 + (h - 1) / 2), (x0, y0, w, h), w * h)
