"""Compare the compiled kernels with the numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat N]

Prints the best-of-N time per call for each kernel and for a full tracking
run over the bundled merge_split scene, plus the speedup.
"""

import argparse
import timeit

import numpy as np

import pftrack._kernels as kernels
from pftrack._kernels import _pykernels
from pftrack.config import TrackerConfig
from pftrack.scene_io import bundled_scene, generate_scene
from pftrack.tracker import run

try:
    from pftrack._kernels import _ckernels
except ImportError:
    _ckernels = None


def _cases(rng):
    pixels = rng.integers(0, 256, (120, 160, 3), dtype=np.uint8)
    binmap = kernels.bin_map(pixels, 10, 10, 10, 0.1, 0.2, impl=_pykernels)
    rects = np.column_stack([rng.integers(0, 150, 100), rng.integers(0, 110, 100),
                             np.full(100, 12), np.full(100, 16)])
    mask = rng.random((120, 160)) < 0.3
    weights = rng.random(100)
    return {
        "bin_map 160x120": lambda impl: kernels.bin_map(pixels, 10, 10, 10, 0.1, 0.2, impl=impl),
        "region_histograms x100": lambda impl: kernels.region_histograms(binmap, rects, 110, impl=impl),
        "label_components 160x120": lambda impl: kernels.label_components(mask, impl=impl),
        "systematic_indices M=100": lambda impl: kernels.systematic_indices(weights, 0.37, impl=impl),
    }


def _full_run(impl):
    frames, _ = generate_scene(bundled_scene("merge_split"))
    config = TrackerConfig(particles=100)

    def go(_impl):
        saved = kernels._impl
        kernels._impl = impl
        try:
            run(frames, config)
        finally:
            kernels._impl = saved

    return go


def best(fn, impl, repeat, number):
    return min(timeit.repeat(lambda: fn(impl), repeat=repeat, number=number)) / number


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args(argv)

    if _ckernels is None:
        print("compiled kernels not built; nothing to compare")
        return 1
    cases = _cases(np.random.default_rng(0))
    print(f"{'kernel':28s} {'cython':>12s} {'python':>12s} {'speedup':>8s}")
    for name, fn in cases.items():
        c = best(fn, _ckernels, args.repeat, 50)
        p = best(fn, _pykernels, args.repeat, 50)
        print(f"{name:28s} {c * 1e6:10.1f}us {p * 1e6:10.1f}us {p / c:7.1f}x")
    c = best(_full_run(_ckernels), None, args.repeat, 1)
    p = best(_full_run(_pykernels), None, args.repeat, 1)
    print(f"{'full run merge_split M=100':28s} {c * 1e3:10.1f}ms {p * 1e3:10.1f}ms {p / c:7.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
