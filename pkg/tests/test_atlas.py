"""
Tests for the filter atlas.
"""

import numpy as np
import pytest
from matplotlib import image as mpimage

from entities.filter_bank import FilterBank
from services.atlas import atlas_order, export_filter_atlas, render_filter_atlas, stretch_filter
from tests.helpers import make_bank
from validations.errors import ConfigurationError, FormatError


def _bank(weights, window, wins=None):
    weights = np.asarray(weights, dtype=np.float32)
    if wins is None:
        wins = np.zeros(weights.shape[0])
    return FilterBank(weights=weights, window=window,
                      win_counts=np.asarray(wins, dtype=np.uint64))


class TestStretchFilter:
    """One joint linear map over the three channels."""

    def test_constant_filter_is_gray(self):
        np.testing.assert_array_equal(stretch_filter(np.full(12, 0.3), 2), 128)

    def test_blue_filter(self):
        weights = np.zeros((3, 2, 2))
        weights[2] = 1.0
        tile = stretch_filter(weights.ravel(), 2)
        assert tile.shape == (2, 2, 3)
        np.testing.assert_array_equal(tile[..., 0], 0)
        np.testing.assert_array_equal(tile[..., 1], 0)
        np.testing.assert_array_equal(tile[..., 2], 255)

    def test_linear_map(self):
        weights = np.zeros(12)
        weights[:3] = [-0.5, 1.5, 0.5]
        tile = stretch_filter(weights, 2)
        assert tile[0, 0, 0] == 0
        assert tile[0, 1, 0] == 255
        assert tile[1, 0, 0] == 128
        assert tile[1, 1, 0] == 64

    def test_planar_to_interleaved(self):
        weights = np.arange(12, dtype=np.float64)
        tile = stretch_filter(weights, 2)
        # The red value at (0, 1) is weight 1, the green value at (0, 0) is weight 4.
        assert tile[0, 1, 0] == np.floor(1 / 11 * 255 + 0.5)
        assert tile[0, 0, 1] == np.floor(4 / 11 * 255 + 0.5)


class TestRenderAtlas:
    """Grid layout and ordering."""

    def test_grid_shape_and_separators(self):
        atlas = render_filter_atlas(make_bank(5, 3), columns=2, order='index')
        assert atlas.shape == (11, 7, 3)
        np.testing.assert_array_equal(atlas[3], 0)
        np.testing.assert_array_equal(atlas[:, 3], 0)
        np.testing.assert_array_equal(atlas[8:, 4:], 0)

    def test_order_by_wins(self):
        bank = _bank(np.eye(3, 12), 2, wins=[1, 5, 5])
        assert atlas_order(bank, 'wins').tolist() == [1, 2, 0]
        assert atlas_order(bank, 'index').tolist() == [0, 1, 2]

    def test_tiles_follow_order(self):
        bank = make_bank(3, 2)
        bank.win_counts = np.array([0, 9, 4], dtype=np.uint64)
        atlas = render_filter_atlas(bank, columns=3)
        np.testing.assert_array_equal(atlas[:2, :2], stretch_filter(bank.weights[1], 2))
        np.testing.assert_array_equal(atlas[:2, 3:5], stretch_filter(bank.weights[2], 2))

    def test_unknown_order(self):
        with pytest.raises(ConfigurationError):
            atlas_order(make_bank(2, 2), 'norm')


class TestExportAtlas:
    """PNG output."""

    def test_written_pixels(self, tmp_path):
        bank = make_bank(6, 4)
        path = export_filter_atlas(bank, 3, tmp_path / 'atlas.png')
        pixels = mpimage.imread(path)
        expected = render_filter_atlas(bank, 3)
        assert pixels.shape[:2] == expected.shape[:2]
        np.testing.assert_array_equal(np.rint(pixels[..., :3] * 255).astype(np.uint8), expected)

    def test_deterministic_bytes(self, tmp_path):
        bank = make_bank(10, 4, seed=3)
        first = export_filter_atlas(bank, 4, tmp_path / 'first.png')
        second = export_filter_atlas(bank, 4, tmp_path / 'second.png')
        assert first.read_bytes() == second.read_bytes()

    def test_unwritable_path(self, tmp_path):
        with pytest.raises(FormatError):
            export_filter_atlas(make_bank(2, 2), 2, tmp_path / 'missing' / 'atlas.png')
