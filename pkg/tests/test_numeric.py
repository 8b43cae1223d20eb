"""
Tests for the dense kernels and the deterministic thread helpers.
"""

import math

import numpy as np
import pytest

from core.numeric import (
    GEMM_BLOCK_ROWS,
    cross_entropy,
    cross_entropy_grad,
    gemm,
    l2_normalize,
    rectified_power,
    softmax,
)
from core.parallel import chunk_bounds, ordered_map
from validations.errors import ConfigurationError


class TestGemm:
    """Matrix products against hand values and a triple-loop oracle."""

    def test_identity(self):
        result = gemm(np.eye(2), np.array([[3.0], [4.0]]))
        np.testing.assert_array_equal(result, [[3.0], [4.0]])

    def test_row_times_column(self):
        result = gemm(np.array([[1.0, 2.0]]), np.array([[3.0], [4.0]]))
        np.testing.assert_array_equal(result, [[11.0]])

    def test_matches_loop_oracle(self, rng):
        a = rng.standard_normal((7, 5))
        b = rng.standard_normal((5, 3))
        expected = np.zeros((7, 3))
        for i in range(7):
            for j in range(3):
                for k in range(5):
                    expected[i, j] += a[i, k] * b[k, j]
        np.testing.assert_allclose(gemm(a, b), expected, rtol=1e-6)

    def test_transposed_operands(self, rng):
        a = rng.standard_normal((5, 7))
        b = rng.standard_normal((3, 5))
        np.testing.assert_allclose(gemm(a, b, trans_a=True, trans_b=True), a.T @ b.T)

    def test_dimension_mismatch(self):
        with pytest.raises(ConfigurationError):
            gemm(np.ones((2, 3)), np.ones((2, 3)))

    def test_blocked_product_independent_of_threads(self, rng):
        """Row blocks are fixed, so the thread count cannot change a single bit."""
        a = rng.standard_normal((2 * GEMM_BLOCK_ROWS + 17, 9)).astype(np.float32)
        b = rng.standard_normal((9, 4)).astype(np.float32)
        single = gemm(a, b, n_jobs=1)
        threaded = gemm(a, b, n_jobs=3)
        assert single.shape == (2 * GEMM_BLOCK_ROWS + 17, 4)
        np.testing.assert_array_equal(single, threaded)
        np.testing.assert_allclose(single, a @ b, rtol=1e-5, atol=1e-5)


class TestRectifiedPower:
    """ReLU(x) ** n."""

    def test_negative_clamped(self):
        assert rectified_power(-0.3, 40) == 0.0

    def test_one_stays_one(self):
        assert rectified_power(1.0, 40) == 1.0

    def test_square(self):
        assert rectified_power(0.9, 2) == pytest.approx(0.81)

    def test_array(self):
        np.testing.assert_allclose(rectified_power(np.array([-1.0, 0.5, 2.0]), 3),
                                   [0.0, 0.125, 8.0])

    def test_power_must_be_positive(self):
        with pytest.raises(ConfigurationError):
            rectified_power(0.5, 0)


class TestL2Normalize:
    """Unit-norm scaling with the zero-vector rule."""

    def test_three_four_five(self):
        np.testing.assert_allclose(l2_normalize(np.array([3.0, 4.0])), [0.6, 0.8])

    def test_zero_vector(self):
        np.testing.assert_array_equal(l2_normalize(np.zeros(3)), np.zeros(3))

    @pytest.mark.parametrize('scale', [1e-3, 0.3, 7.0, 1e4])
    def test_scale_invariance(self, scale):
        np.testing.assert_allclose(l2_normalize(np.array([3.0, 4.0]) * scale), [0.6, 0.8])

    def test_rows(self):
        rows = np.array([[3.0, 4.0, 0.0], [0.0, 0.0, 0.0]], dtype=np.float32)
        result = l2_normalize(rows, axis=1)
        assert result.dtype == np.float32
        np.testing.assert_allclose(result, [[0.6, 0.8, 0.0], [0.0, 0.0, 0.0]])


class TestSoftmax:
    """Stable softmax."""

    def test_uniform(self):
        np.testing.assert_allclose(softmax(np.zeros(4)), [0.25] * 4)

    def test_monotone(self, rng):
        logits = rng.standard_normal((10, 6))
        assert np.array_equal(np.argmax(softmax(logits, axis=1), axis=1),
                              np.argmax(logits, axis=1))

    def test_large_logits_do_not_overflow(self):
        probs = softmax(np.array([1000.0, 0.0]))
        assert np.all(np.isfinite(probs))
        assert probs[0] == pytest.approx(1.0)
        assert probs[1] == pytest.approx(0.0, abs=1e-300)


class TestCrossEntropy:
    """Loss values and the logit gradient."""

    def test_perfect_prediction(self):
        assert cross_entropy(np.array([0.0, 1.0, 0.0]), 1) == pytest.approx(0.0)

    def test_uniform_over_ten(self):
        assert cross_entropy(np.full(10, 0.1), 7) == pytest.approx(math.log(10), rel=1e-6)

    def test_zero_probability_is_floored(self):
        assert cross_entropy(np.array([1.0, 0.0]), 1) == pytest.approx(-math.log(1e-12))

    def test_label_out_of_range(self):
        with pytest.raises(ConfigurationError):
            cross_entropy(np.full(3, 1 / 3), 3)

    def test_batch(self):
        probs = np.array([[0.5, 0.5], [0.25, 0.75]])
        np.testing.assert_allclose(cross_entropy(probs, np.array([0, 1])),
                                   [math.log(2), -math.log(0.75)])

    def test_gradient_matches_finite_differences(self, rng):
        logits = rng.standard_normal(5)
        label = 2
        analytic = cross_entropy_grad(softmax(logits), label)

        h = 1e-6
        numeric = np.zeros(5)
        for index in range(5):
            step = np.zeros(5)
            step[index] = h
            numeric[index] = (cross_entropy(softmax(logits + step), label)
                              - cross_entropy(softmax(logits - step), label)) / (2 * h)
        np.testing.assert_allclose(analytic, numeric, atol=1e-7)


class TestParallel:
    """Chunking and ordered mapping."""

    def test_chunk_bounds_cover_range(self):
        bounds = chunk_bounds(10, 4)
        assert bounds == [slice(0, 4), slice(4, 8), slice(8, 10)]

    def test_empty(self):
        assert chunk_bounds(0, 4) == []

    def test_ordered_map_keeps_order(self):
        assert ordered_map(lambda x: x * x, list(range(20)), n_jobs=4) == \
            [x * x for x in range(20)]
