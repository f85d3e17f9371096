"""Tests for Bars-and-Stripes generation, rasterization and splitting."""

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from tnprob.data.bars_and_stripes import (
    BinaryImage,
    SequenceDataset,
    bars_and_stripes,
    build_dataset,
    raster_flatten,
    segment,
    split,
    split_indices,
)
from tnprob.errors import EmptyDatasetError, ShapeMismatchError


class TestImages:
    def test_two_by_two(self):
        images = bars_and_stripes(2, 2)
        assert len(images) == 6
        assert len(set(images)) == 6
        assert all(img.is_bar or img.is_stripe for img in images)

    def test_without_dedup_keeps_constant_images_twice(self):
        images = bars_and_stripes(2, 2, dedup=False)
        assert len(images) == 8
        assert len(set(images)) == 6

    def test_bar_bits_set_rows(self):
        img = bars_and_stripes(3, 2)[1]
        np.testing.assert_array_equal(img.pixels, [[1, 1], [0, 0], [0, 0]])
        assert img.is_bar

    @given(rows=st.integers(min_value=1, max_value=5), cols=st.integers(min_value=1, max_value=5))
    def test_count(self, rows, cols):
        assert len(bars_and_stripes(rows, cols)) == 2**rows + 2**cols - 2

    def test_invalid_pixels(self):
        with pytest.raises(ValueError):
            BinaryImage(np.array([[0, 2]]))
        with pytest.raises(ShapeMismatchError):
            bars_and_stripes(0, 3)


class TestSequences:
    def test_raster_is_row_major_and_one_based(self):
        img = BinaryImage(np.array([[0, 1], [1, 1]]))
        assert raster_flatten(img) == (1, 2, 2, 2)

    def test_segment(self):
        assert segment((1, 2, 1, 2), 2) == [(1, 2), (1, 2)]
        assert segment((1, 2, 1), None) == [(1, 2, 1)]
        assert segment((1, 2), 8) == [(1, 2)]

    def test_segment_must_divide(self):
        with pytest.raises(ShapeMismatchError):
            segment((1, 2, 1), 2)

    def test_default_dataset(self):
        ds = build_dataset(8, 8)
        assert ds.size == 4 * 510
        assert ds.t_len == 16
        assert ds.d_obs == 2
        assert ds.sequences.min() == 1
        assert ds.sequences.max() == 2

    def test_single_pixel(self):
        ds = build_dataset(1, 1, segment_len=None)
        assert ds.size == 2
        assert ds.t_len == 1
        np.testing.assert_array_equal(ds.sequences, [[1], [2]])
        assert build_dataset(1, 1, segment_len=None, dedup=False).size == 4

    def test_indices_are_zero_based(self):
        ds = build_dataset(2, 2, segment_len=None)
        np.testing.assert_array_equal(ds.as_indices(), ds.sequences - 1)

    def test_symbols_checked(self):
        with pytest.raises(ValueError):
            SequenceDataset(np.array([[0, 1]]))
        with pytest.raises(ShapeMismatchError):
            SequenceDataset(np.array([1, 2]))


class TestSplit:
    def test_sizes(self):
        train_idx, test_idx = split_indices(10, 0.7, seed=3)
        assert len(train_idx) == 7
        assert len(test_idx) == 3
        assert sorted([*train_idx, *test_idx]) == list(range(10))

    def test_rounds_train_share_up(self):
        train_idx, _ = split_indices(6, 0.7, seed=0)
        assert len(train_idx) == 5

    def test_deterministic(self):
        ds = build_dataset(3, 3, segment_len=None)
        a_train, a_test = split(ds, 0.7, seed=12)
        b_train, b_test = split(ds, 0.7, seed=12)
        np.testing.assert_array_equal(a_train.sequences, b_train.sequences)
        np.testing.assert_array_equal(a_test.sequences, b_test.sequences)
        assert a_train.size + a_test.size == ds.size

    def test_errors(self):
        with pytest.raises(EmptyDatasetError):
            split_indices(0)
        with pytest.raises(ValueError):
            split_indices(5, 1.0)
