"""Pure-Python/numpy versions of the compiled kernels.

Each function returns bit-identical results to its counterpart in
``_ckernels.pyx``; the test suite checks this on random inputs.
"""

from collections import deque

import numpy as np


def region_histograms(binmap, rects, nbins):
    rects = np.asarray(rects, dtype=np.int64).reshape(-1, 4)
    out = np.zeros((rects.shape[0], nbins), dtype=np.float64)
    for k, (x_lo, y_lo, x_hi, y_hi) in enumerate(rects):
        if x_hi <= x_lo or y_hi <= y_lo:
            continue
        patch = binmap[y_lo:y_hi, x_lo:x_hi]
        out[k] = np.bincount(patch.ravel(), minlength=nbins)[:nbins]
        out[k] /= float((x_hi - x_lo) * (y_hi - y_lo))
    return out


def label_components(mask):
    mask = np.asarray(mask, dtype=bool)
    h, w = mask.shape
    labels = np.zeros((h, w), dtype=np.int32)
    current = 0
    # only foreground pixels are visited; argwhere yields raster order
    for y, x in np.argwhere(mask):
        if labels[y, x]:
            continue
        current += 1
        labels[y, x] = current
        queue = deque([(y, x)])
        while queue:
            cy, cx = queue.pop()
            for ny in (cy - 1, cy, cy + 1):
                if ny < 0 or ny >= h:
                    continue
                for nx in (cx - 1, cx, cx + 1):
                    if 0 <= nx < w and mask[ny, nx] and not labels[ny, nx]:
                        labels[ny, nx] = current
                        queue.append((ny, nx))
    return labels, current


def systematic_indices(weights, u0):
    weights = np.asarray(weights, dtype=np.float64)
    n = weights.shape[0]
    cum = np.cumsum(weights)
    positions = (u0 + np.arange(n)) / n
    idx = np.searchsorted(cum, positions, side="right")
    return np.minimum(idx, n - 1).astype(np.int64)


def bin_map(pixels, n_h, n_s, n_v, sat_threshold, val_threshold):
    # same float operations, in the same order, as the compiled loop
    rgb = np.asarray(pixels, dtype=np.int64)
    r, g, b = rgb[..., 0], rgb[..., 1], rgb[..., 2]
    mx = rgb.max(axis=-1)
    mn = rgb.min(axis=-1)
    delta = mx - mn
    safe_delta = np.where(delta == 0, 1, delta)
    v = mx / 255.0
    s = np.where(mx == 0, 0.0, delta / np.where(mx == 0, 1, mx))
    h_r = 60.0 * np.mod((g - b) / safe_delta, 6.0)
    h_g = 60.0 * ((b - r) / safe_delta + 2.0)
    h_b = 60.0 * ((r - g) / safe_delta + 4.0)
    h = np.where(delta == 0, 0.0, np.where(mx == r, h_r, np.where(mx == g, h_g, h_b)))
    hb = np.minimum(np.floor(h / 360.0 * n_h).astype(np.int64), n_h - 1)
    sb = np.minimum(np.floor(s * n_s).astype(np.int64), n_s - 1)
    vb = np.minimum(np.floor(v * n_v).astype(np.int64), n_v - 1)
    joint = (s > sat_threshold) & (v > val_threshold)
    out = np.where(joint, hb * n_s + sb, n_h * n_s + vb)
    return out.astype(np.int32)
