# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loops: pixel binning, region histograms, 8-connected labelling, systematic resampling."""

import numpy as np
cimport numpy as cnp
from libc.math cimport floor, fmod

cnp.import_array()


def region_histograms(const cnp.int32_t[:, ::1] binmap, const cnp.int64_t[:, ::1] rects, Py_ssize_t nbins):
    """Normalized histograms of ``binmap`` over each clipped rectangle.

    ``rects`` rows are ``(x_lo, y_lo, x_hi, y_hi)`` with exclusive upper
    bounds, already clipped to the map. Empty rectangles yield an all-zero row.
    """
    cdef Py_ssize_t k, x, y, b, n = rects.shape[0]
    cdef Py_ssize_t x_lo, y_lo, x_hi, y_hi
    cdef double count
    out = np.zeros((n, nbins), dtype=np.float64)
    cdef double[:, ::1] hist = out
    for k in range(n):
        x_lo = rects[k, 0]
        y_lo = rects[k, 1]
        x_hi = rects[k, 2]
        y_hi = rects[k, 3]
        if x_hi <= x_lo or y_hi <= y_lo:
            continue
        for y in range(y_lo, y_hi):
            for x in range(x_lo, x_hi):
                hist[k, binmap[y, x]] += 1.0
        count = <double>((x_hi - x_lo) * (y_hi - y_lo))
        for b in range(nbins):
            hist[k, b] /= count
    return out


def label_components(const cnp.uint8_t[:, ::1] mask):
    """Label 8-connected foreground components in raster order of first pixel.

    Returns ``(labels, count)``; background is 0, components are 1..count.
    """
    cdef Py_ssize_t h = mask.shape[0], w = mask.shape[1]
    labels_arr = np.zeros((h, w), dtype=np.int32)
    cdef cnp.int32_t[:, ::1] labels = labels_arr
    stack_arr = np.empty(max(h * w, 1), dtype=np.int64)
    cdef cnp.int64_t[::1] stack = stack_arr
    cdef Py_ssize_t top, y, x, cy, cx, ny, nx, dy, dx, pos
    cdef cnp.int32_t current = 0
    for y in range(h):
        for x in range(w):
            if mask[y, x] == 0 or labels[y, x] != 0:
                continue
            current += 1
            labels[y, x] = current
            top = 0
            stack[top] = y * w + x
            top += 1
            while top > 0:
                top -= 1
                pos = stack[top]
                cy = pos // w
                cx = pos - cy * w
                for dy in range(-1, 2):
                    ny = cy + dy
                    if ny < 0 or ny >= h:
                        continue
                    for dx in range(-1, 2):
                        nx = cx + dx
                        if nx < 0 or nx >= w:
                            continue
                        if mask[ny, nx] != 0 and labels[ny, nx] == 0:
                            labels[ny, nx] = current
                            stack[top] = ny * w + nx
                            top += 1
    return labels_arr, int(current)


def systematic_indices(const double[::1] weights, double u0):
    """Ancestor indices for systematic resampling with offset ``u0`` in [0, 1).

    ``weights`` must already sum to one.
    """
    cdef Py_ssize_t n = weights.shape[0], i = 0, j = 0
    out = np.empty(n, dtype=np.int64)
    cdef cnp.int64_t[::1] idx = out
    cdef double cum, pos
    cum = weights[0]
    for i in range(n):
        pos = (u0 + i) / n
        while pos >= cum and j < n - 1:
            j += 1
            cum += weights[j]
        idx[i] = j
    return out


def bin_map(const cnp.uint8_t[:, :, ::1] pixels, Py_ssize_t n_h, Py_ssize_t n_s, Py_ssize_t n_v,
            double sat_threshold, double val_threshold):
    """HSV histogram bin of every pixel (joint hue x sat, else value-only)."""
    cdef Py_ssize_t hh = pixels.shape[0], ww = pixels.shape[1], y, x
    cdef long r, g, b, mx, mn, delta, hb, sb, vb
    cdef double h, s, v, m
    out = np.empty((hh, ww), dtype=np.int32)
    cdef cnp.int32_t[:, ::1] bins = out
    for y in range(hh):
        for x in range(ww):
            r = pixels[y, x, 0]
            g = pixels[y, x, 1]
            b = pixels[y, x, 2]
            mx = r if r > g else g
            mx = mx if mx > b else b
            mn = r if r < g else g
            mn = mn if mn < b else b
            delta = mx - mn
            v = mx / 255.0
            s = 0.0 if mx == 0 else (<double>delta) / (<double>mx)
            if delta == 0:
                h = 0.0
            elif mx == r:
                m = fmod((<double>(g - b)) / (<double>delta), 6.0)
                if m < 0.0:
                    m += 6.0
                elif m == 0.0:
                    m = 0.0
                h = 60.0 * m
            elif mx == g:
                h = 60.0 * ((<double>(b - r)) / (<double>delta) + 2.0)
            else:
                h = 60.0 * ((<double>(r - g)) / (<double>delta) + 4.0)
            if s > sat_threshold and v > val_threshold:
                hb = <long>floor(h / 360.0 * n_h)
                if hb > n_h - 1:
                    hb = n_h - 1
                sb = <long>floor(s * n_s)
                if sb > n_s - 1:
                    sb = n_s - 1
                bins[y, x] = <cnp.int32_t>(hb * n_s + sb)
            else:
                vb = <long>floor(v * n_v)
                if vb > n_v - 1:
                    vb = n_v - 1
                bins[y, x] = <cnp.int32_t>(n_h * n_s + vb)
    return out
