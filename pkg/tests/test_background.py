import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from oracles import oracle_components, oracle_formula
from pftrack.background import BackgroundModel, extract_blobs, subtract, update_background
from pftrack.scene_io import Frame


def flat(value, w=4, h=3):
    return Frame(np.full((h, w, 3), value, np.uint8))


def test_first_frame_seeds_mean():
    model = update_background(BackgroundModel(4, 3), flat(77))
    assert model.initialized
    assert np.all(model.mean == 77.0)


@pytest.mark.parametrize("mu, p, alpha, expected", [(100, 100, 0.01, 100.0), (100, 200, 0.01, 101.0)])
def test_update_examples(mu, p, alpha, expected):
    model = BackgroundModel(4, 3, alpha, mean=np.full((3, 4, 3), float(mu)))
    update_background(model, flat(p))
    assert np.allclose(model.mean, expected, rtol=0, atol=1e-12)
    assert np.allclose(model.mean, oracle_formula("running_average", {"mu": mu, "p": p, "alpha": alpha}), atol=1e-12)


@given(st.floats(0, 255), st.integers(0, 255))
def test_alpha_one_copies_frame(mu, p):
    model = BackgroundModel(4, 3, 1.0, mean=np.full((3, 4, 3), mu))
    update_background(model, flat(p))
    assert np.all(model.mean == p)


@given(st.floats(0, 255), st.integers(0, 255), st.floats(0.001, 1.0))
def test_mean_stays_in_range(mu, p, alpha):
    model = BackgroundModel(4, 3, alpha, mean=np.full((3, 4, 3), mu))
    for _ in range(3):
        update_background(model, flat(p))
    assert model.mean.min() >= 0.0 and model.mean.max() <= 255.0


def test_dimension_mismatch():
    model = update_background(BackgroundModel(4, 3), flat(0))
    with pytest.raises(ValueError):
        update_background(model, flat(0, w=5))
    with pytest.raises(ValueError):
        subtract(model, flat(0, w=5))


def test_uninitialized_subtract():
    with pytest.raises(ValueError):
        subtract(BackgroundModel(4, 3), flat(0))


def test_geometric_convergence():
    rng = np.random.default_rng(3)
    mu0 = rng.uniform(0, 255, (5, 6, 3))
    frame = Frame(rng.integers(0, 256, (5, 6, 3), dtype=np.uint8))
    p = frame.pixels.astype(float)
    model = BackgroundModel(6, 5, 0.01, mean=mu0.copy())
    for t in range(1, 101):
        update_background(model, frame)
        expected = (1 - 0.01) ** t * np.abs(mu0 - p)
        assert np.allclose(np.abs(model.mean - p), expected, rtol=1e-6, atol=1e-9)


def test_subtract_examples():
    model = update_background(BackgroundModel(4, 3), flat(100))
    assert not subtract(model, flat(100)).any()
    px = np.full((3, 4, 3), 100, np.uint8)
    px[1, 2, 1] = 200
    px[0, 0, 2] = 130  # exactly at the threshold: background
    mask = subtract(model, Frame(px), 30)
    assert mask.sum() == 1 and mask[1, 2]


@given(arrays(np.float64, (4, 5, 3), elements=st.floats(0, 255)))
def test_rounded_background_is_clean(mean):
    model = BackgroundModel(5, 4, mean=mean)
    frame = Frame(np.rint(mean).astype(np.uint8))
    assert not subtract(model, frame, 1.0).any()


def test_square_blob():
    mask = np.zeros((20, 20), bool)
    mask[10:13, 10:13] = True
    (blob,) = extract_blobs(mask, 1)
    assert blob.area == 9 and blob.centroid == (11.0, 11.0) and blob.bbox == (10, 10, 3, 3)


def test_separated_squares():
    mask = np.zeros((20, 20), bool)
    mask[2:5, 2:5] = True
    mask[2:5, 7:10] = True
    assert len(extract_blobs(mask, 1)) == 2


def test_min_area_filter():
    mask = np.zeros((8, 8), bool)
    mask[1:3, 1:3] = True
    assert extract_blobs(mask, 5) == []


def test_empty_mask():
    assert extract_blobs(np.zeros((5, 5), bool), 1) == []


def test_sorted_by_top_left():
    mask = np.zeros((10, 10), bool)
    mask[6, 1] = mask[1, 8] = mask[1, 2] = True
    assert [b.bbox[:2] for b in extract_blobs(mask, 1)] == [(2, 1), (8, 1), (1, 6)]


def _as_tuples(blobs):
    return sorted((b.area, b.bbox, tuple(float(c) for c in b.centroid)) for b in blobs)


def test_matches_oracle_on_random_masks():
    rng = np.random.default_rng(0)
    for seed in range(1000):
        density = rng.uniform(0.1, 0.7)
        mask = rng.random((16, 16)) < density
        expected = sorted(oracle_components(mask.tolist()))
        assert _as_tuples(extract_blobs(mask, 1)) == expected, seed


@settings(max_examples=100)
@given(arrays(bool, (12, 12)), st.integers(1, 20))
def test_area_conservation(mask, min_area):
    kept = sum(b.area for b in extract_blobs(mask, min_area))
    filtered = sum(a for a, _, _ in oracle_components(mask.tolist()) if a < min_area)
    assert kept + filtered == mask.sum()


@settings(max_examples=100)
@given(arrays(bool, (10, 10)))
def test_blob_invariants(mask):
    for b in extract_blobs(mask, 1):
        x0, y0, w, h = b.bbox
        assert 1 <= b.area <= w * h
        assert x0 <= b.centroid[0] <= x0 + w - 1 and y0 <= b.centroid[1] <= y0 + h - 1
