"""Kernel backend selection.

The compiled Cython module is used when it was built; otherwise the numpy
fallback is imported. Setting ``PFTRACK_PURE_PYTHON=1`` forces the fallback.
``BACKEND`` names the active implementation.
"""

import os

import numpy as np

from . import _pykernels

if os.environ.get("PFTRACK_PURE_PYTHON", "") not in ("", "0"):
    _impl = _pykernels
    BACKEND = "python"
else:
    try:
        from . import _ckernels as _impl
        BACKEND = "cython"
    except ImportError:
        _impl = _pykernels
        BACKEND = "python"


def bin_map(pixels, n_h, n_s, n_v, sat_threshold, val_threshold, impl=None):
    """(h, w) int32 histogram bin of every RGB pixel."""
    impl = impl or _impl
    pixels = np.ascontiguousarray(pixels, dtype=np.uint8)
    return impl.bin_map(pixels, int(n_h), int(n_s), int(n_v), float(sat_threshold), float(val_threshold))


def region_histograms(binmap, rects, nbins, impl=None):
    """(K, nbins) normalized histograms of ``binmap`` over clipped rects."""
    impl = impl or _impl
    binmap = np.ascontiguousarray(binmap, dtype=np.int32)
    rects = np.ascontiguousarray(np.asarray(rects, dtype=np.int64).reshape(-1, 4))
    return impl.region_histograms(binmap, rects, int(nbins))


def label_components(mask, impl=None):
    """8-connected labels of a boolean mask, numbered in raster order."""
    impl = impl or _impl
    return impl.label_components(np.ascontiguousarray(mask, dtype=np.uint8))


def systematic_indices(weights, u0, impl=None):
    """Systematic-resampling ancestor indices for non-negative ``weights`` (any positive total)."""
    impl = impl or _impl
    weights = np.asarray(weights, dtype=np.float64)
    # normalise here so both backends accumulate identical values
    return impl.systematic_indices(np.ascontiguousarray(weights / weights.sum()), float(u0))


__all__ = ["BACKEND", "bin_map", "region_histograms", "label_components", "systematic_indices"]
