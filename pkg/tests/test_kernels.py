"""The compiled and numpy kernels must agree bit for bit."""

import os
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from pftrack import _kernels
from pftrack._kernels import _pykernels

try:
    from pftrack._kernels import _ckernels
except ImportError:  # extension not built
    _ckernels = None

needs_c = pytest.mark.skipif(_ckernels is None, reason="compiled kernels not built")
IMPLS = [pytest.param(_pykernels, id="python"), pytest.param(_ckernels, id="cython", marks=needs_c)]


@pytest.mark.parametrize("impl", IMPLS)
def test_region_histogram_basics(impl):
    binmap = np.array([[0, 1], [1, 2]], np.int32)
    out = _kernels.region_histograms(binmap, [[0, 0, 2, 2], [1, 1, 2, 2], [1, 1, 1, 2]], 4, impl=impl)
    assert out.tolist() == [[0.25, 0.5, 0.25, 0.0], [0, 0, 1, 0], [0, 0, 0, 0]]


@pytest.mark.parametrize("impl", IMPLS)
def test_label_components_raster_order(impl):
    mask = np.array([[0, 1, 0, 0], [0, 0, 0, 1], [1, 0, 0, 1]], bool)
    labels, count = _kernels.label_components(mask, impl=impl)
    assert count == 3
    assert labels[0, 1] == 1 and labels[1, 3] == 2 and labels[2, 0] == 3 and labels[2, 3] == 2


@pytest.mark.parametrize("impl", IMPLS)
def test_systematic_degenerate(impl):
    w = np.zeros(7)
    w[4] = 1.0
    assert _kernels.systematic_indices(w, 0.999, impl=impl).tolist() == [4] * 7


@needs_c
@settings(max_examples=200)
@given(arrays(np.uint8, st.tuples(st.integers(1, 12), st.integers(1, 12), st.just(3))),
       st.integers(1, 12), st.integers(1, 12), st.integers(1, 12))
def test_bin_map_agrees(pixels, n_h, n_s, n_v):
    a = _kernels.bin_map(pixels, n_h, n_s, n_v, 0.1, 0.2, impl=_pykernels)
    b = _kernels.bin_map(pixels, n_h, n_s, n_v, 0.1, 0.2, impl=_ckernels)
    assert np.array_equal(a, b)


@needs_c
def test_bin_map_agrees_on_colour_cube():
    grid = np.stack(np.meshgrid(np.arange(256), np.arange(0, 256, 3), np.arange(0, 256, 5), indexing="ij"), -1)
    pixels = grid.reshape(256, -1, 3).astype(np.uint8)
    a = _kernels.bin_map(pixels, 10, 10, 10, 0.1, 0.2, impl=_pykernels)
    b = _kernels.bin_map(pixels, 10, 10, 10, 0.1, 0.2, impl=_ckernels)
    assert np.array_equal(a, b)


@needs_c
@settings(max_examples=200)
@given(st.data())
def test_region_histograms_agree(data):
    h, w, nbins = data.draw(st.integers(1, 15)), data.draw(st.integers(1, 15)), data.draw(st.integers(1, 12))
    binmap = data.draw(arrays(np.int32, (h, w), elements=st.integers(0, nbins - 1)))
    rects = []
    for _ in range(data.draw(st.integers(0, 6))):
        x0, x1 = sorted(data.draw(st.lists(st.integers(0, w), min_size=2, max_size=2)))
        y0, y1 = sorted(data.draw(st.lists(st.integers(0, h), min_size=2, max_size=2)))
        rects.append([x0, y0, x1, y1])
    a = _kernels.region_histograms(binmap, np.array(rects, np.int64).reshape(-1, 4), nbins, impl=_pykernels)
    b = _kernels.region_histograms(binmap, np.array(rects, np.int64).reshape(-1, 4), nbins, impl=_ckernels)
    assert np.array_equal(a, b)


@needs_c
@settings(max_examples=300)
@given(arrays(bool, st.tuples(st.integers(1, 20), st.integers(1, 20))))
def test_labels_agree(mask):
    la, ca = _kernels.label_components(mask, impl=_pykernels)
    lb, cb = _kernels.label_components(mask, impl=_ckernels)
    assert ca == cb and np.array_equal(la, lb)


@needs_c
@settings(max_examples=300)
@given(arrays(np.float64, st.integers(1, 60), elements=st.floats(0, 1)), st.floats(0, 1, exclude_max=True))
def test_systematic_agree(weights, u0):
    if weights.sum() == 0:
        weights = np.ones_like(weights)
    a = _kernels.systematic_indices(weights, u0, impl=_pykernels)
    b = _kernels.systematic_indices(weights, u0, impl=_ckernels)
    assert np.array_equal(a, b)


@settings(max_examples=200)
@given(arrays(np.float64, st.integers(1, 40), elements=st.floats(0, 1)), st.floats(0, 1, exclude_max=True))
def test_systematic_indices_properties(weights, u0):
    if weights.sum() == 0:
        weights = np.ones_like(weights)
    idx = _kernels.systematic_indices(weights, u0)
    assert len(idx) == len(weights)
    assert np.all(np.diff(idx) >= 0)
    assert np.all(weights[idx] > 0)
    # every ancestor count is within one of its expectation
    counts = np.bincount(idx, minlength=len(weights))
    assert np.all(np.abs(counts - len(weights) * weights / weights.sum()) < 1 + 1e-9)


def test_env_var_forces_fallback():
    env = dict(os.environ, PFTRACK_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "import pftrack; print(pftrack.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"


@needs_c
def test_tracker_identical_across_backends():
    code = (
        "from pftrack.scene_io import bundled_scene, generate_scene, format_ntxy\n"
        "from pftrack.tracker import run\n"
        "from pftrack.config import TrackerConfig\n"
        "frames, _ = generate_scene(bundled_scene('merge_split'))\n"
        "print(format_ntxy(run(frames, TrackerConfig(particles=30))[0]))\n"
    )
    outs = []
    for flag in ("0", "1"):
        env = dict(os.environ, PFTRACK_PURE_PYTHON=flag)
        outs.append(subprocess.run([sys.executable, "-c", code], env=env, capture_output=True,
                                   text=True, check=True).stdout)
    assert outs[0] == outs[1] and outs[0].count("\n") > 100


@needs_c
def test_benchmark_script_runs():
    script = Path(__file__).resolve().parents[1] / "benchmarks" / "bench_kernels.py"
    out = subprocess.run([sys.executable, str(script), "--repeat", "1"], capture_output=True,
                         text=True, check=True).stdout
    assert "full run" in out and out.count("x\n") == 5
