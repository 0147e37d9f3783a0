import numpy as np
import pytest

from hierpin import rng


def test_offset_addressing_matches_contiguous_stream():
    full = rng.raw_words(9, rng.PARENTS, 3, 0, 64)
    for start in range(0, 40, 3):
        part = rng.raw_words(9, rng.PARENTS, 3, start, 11)
        assert np.array_equal(part, full[start : start + 11])


def test_coordinates_select_independent_streams():
    a = rng.raw_words(1, rng.PARENTS, 1, 0, 8)
    assert not np.array_equal(a, rng.raw_words(2, rng.PARENTS, 1, 0, 8))
    assert not np.array_equal(a, rng.raw_words(1, rng.PARENTS, 2, 0, 8))
    assert not np.array_equal(a, rng.raw_words(1, rng.LEAVES, 1, 0, 8))


def test_unit_and_index_maps():
    w = rng.raw_words(0, rng.INITIAL, 0, 0, 200000)
    u = rng.to_open_unit(w)
    assert u.min() > 0.0 and u.max() < 1.0
    assert abs(u.mean() - 0.5) < 5 * np.sqrt(1 / 12 / u.size)
    idx = rng.to_index(w, 7)
    assert idx.min() == 0 and idx.max() == 6
    counts = np.bincount(idx, minlength=7)
    assert np.all(np.abs(counts - u.size / 7) < 5 * np.sqrt(u.size / 7))


def test_extreme_words_stay_in_range():
    w = np.array([0, 2**64 - 1], dtype=np.uint64)
    assert np.all(rng.to_index(w, 100000) < 100000)
    u = rng.to_open_unit(w)
    assert 0 < u[0] < u[1] < 1


def test_bad_seed():
    with pytest.raises(ValueError):
        rng.raw_words(-1, rng.INITIAL, 0, 0, 1)
