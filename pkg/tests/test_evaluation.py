"""
Tests for metrics, illumination changes and transfer learning.
"""

import numpy as np
import pytest

from business.dataset_business import apply_shadow, scale_images, to_float
from business.evaluation_business import (
    compare_shadow,
    evaluate,
    top_k_error,
    top_k_hits,
    transfer,
)
from business.hebbian_business import train_block_filters
from business.model_business import (
    build_conv_architecture,
    build_nnl_architecture,
    nnl_conv_forward,
    predict_logits,
)
from business.supervised_business import train_top_layer
from entities.dataset import ImageDataset, ShadowSpec
from entities.layers import NnlConvLayer
from entities.report import EvalReport, TransferReport
from entities.run_config import FiltersSection
from entities.training import LrSchedule, ScheduleKind, SupervisedConfig
from tests.helpers import make_bank, make_block, make_dataset
from validations.errors import ConfigurationError

HAND_LOGITS = np.array([[0.1, 0.5, 0.4],
                        [0.3, 0.3, 0.1],
                        [0.2, 0.1, 0.7],
                        [0.0, 0.6, 0.4]])
HAND_LABELS = np.array([2, 1, 2, 0])

TOP_LAYER = SupervisedConfig(epochs=20, minibatch_size=10,
                             schedule=LrSchedule(ScheduleKind.CONSTANT, 0.05))


def _edges(count, seed, side=12):
    """
    Class 0 holds a vertical edge, class 1 a horizontal one, at random brightness.
    """
    rng = np.random.default_rng(seed)
    labels = np.arange(count, dtype=np.int64) % 2
    images = np.zeros((count, 3, side, side))
    for index, label in enumerate(labels):
        bright = rng.uniform(100, 240, size=3)[:, None, None]
        if label == 0:
            images[index, :, :, side // 2:] = bright
        else:
            images[index, :, side // 2:, :] = bright
    images += rng.uniform(0, 10, size=images.shape)
    return ImageDataset(images=np.clip(images, 0, 255).astype(np.uint8), labels=labels,
                        class_count=2, name=f'edges-{seed}')


def _nnl_model(classes=10):
    return build_nnl_architecture([make_bank(4, 4, seed=7)], [make_block()], classes, seed=0)


class TestTopK:
    """Top-k errors with ties to the lowest class."""

    def test_perfect_logits(self):
        labels = np.array([0, 2, 1])
        assert top_k_error(np.eye(3)[labels], labels, 1) == 0.0

    def test_k_equals_classes(self):
        assert top_k_error(HAND_LOGITS, HAND_LABELS, 3) == 0.0

    def test_hand_built(self):
        assert top_k_error(HAND_LOGITS, HAND_LABELS, 1) == 75.0
        assert top_k_error(HAND_LOGITS, HAND_LABELS, 2) == 25.0
        assert top_k_hits(HAND_LOGITS, HAND_LABELS, 1).tolist() == [False, False, True, False]

    def test_non_increasing_in_k(self, rng):
        logits = rng.standard_normal((50, 10))
        labels = rng.integers(0, 10, 50)
        errors = [top_k_error(logits, labels, k) for k in range(1, 11)]
        assert all(later <= earlier for earlier, later in zip(errors, errors[1:]))

    @pytest.mark.parametrize('k', [0, 4])
    def test_k_out_of_range(self, k):
        with pytest.raises(ConfigurationError):
            top_k_error(HAND_LOGITS, HAND_LABELS, k)


class TestEvaluate:
    """Reports under raw, shadowed and uniformly scaled illumination."""

    def test_report_fields(self):
        dataset = make_dataset(12)
        report = evaluate(_nnl_model(), dataset)
        assert report.n_samples == 12
        assert report.dataset_name == 'synthetic'
        assert report.per_class_errors.shape == (10,)
        assert 0.0 <= report.top5_error <= report.top1_error <= 100.0
        assert report.shadow_spec is None and report.scale == 1.0

    def test_empty_shadow_changes_nothing(self):
        model = _nnl_model()
        dataset = make_dataset(12)
        plain = evaluate(model, dataset)
        shadowed = evaluate(model, dataset, ShadowSpec(columns=0, intensity=1.0))
        assert shadowed.top1_error == plain.top1_error
        assert shadowed.top5_error == plain.top5_error
        np.testing.assert_array_equal(shadowed.per_class_errors, plain.per_class_errors)

    def test_uniform_scale_keeps_predictions(self):
        model = _nnl_model()
        images = to_float(make_dataset(12))
        plain = np.argmax(predict_logits(model, images), axis=1)
        for factor in (0.3, 0.05):
            scaled = np.argmax(predict_logits(model, scale_images(images, factor)), axis=1)
            np.testing.assert_array_equal(scaled, plain)

    def test_uniform_scale_changes_conv_predictions(self):
        model = build_conv_architecture([make_block('conv')], 10, seed=0)
        images = to_float(make_dataset(12))
        # Zero biases leave the conv features homogeneous in the pixel scale.
        raw = predict_logits(model, images)
        index = next(i for i, row in enumerate(raw) if np.argmax(row) != 0)
        margin = float(raw[index].max() - raw[index, 0])
        model.classifier.biases[0] = 0.65 * margin

        plain = np.argmax(predict_logits(model, images), axis=1)
        dimmed = np.argmax(predict_logits(model, scale_images(images, 0.3)), axis=1)
        assert plain[index] != 0
        assert dimmed[index] == 0
        assert np.any(dimmed != plain)

    def test_scaled_report(self):
        model = _nnl_model()
        dataset = make_dataset(12)
        scaled = evaluate(model, dataset, scale=0.3)
        assert scaled.scale == 0.3
        assert scaled.top1_error == evaluate(model, dataset).top1_error

    def test_class_mismatch(self):
        with pytest.raises(ConfigurationError):
            evaluate(_nnl_model(classes=5), make_dataset(4))

    def test_scale_must_be_positive(self):
        with pytest.raises(ConfigurationError):
            evaluate(_nnl_model(), make_dataset(4), scale=0.0)

    def test_compare_shadow(self):
        spec = ShadowSpec(columns=25, intensity=0.3)
        results = compare_shadow({'nnl': _nnl_model()}, make_dataset(6), spec)
        raw, shadowed = results['nnl']
        assert raw.shadow_spec is None
        assert shadowed.shadow_spec == spec


class TestShadowedPatches:
    """Patches inside the shadow keep their normalized values."""

    def test_nnl_outputs_inside_shadow(self, rng):
        pixels = rng.integers(1, 26, size=(1, 3, 32, 32)).astype(np.uint8) * 10
        dataset = ImageDataset(images=pixels, labels=np.zeros(1, dtype=np.int64),
                               class_count=10, name='tens')
        shadowed = apply_shadow(dataset, ShadowSpec(columns=25, intensity=0.3))

        layer = NnlConvLayer(make_bank(6, 4), power=2)
        plain = nnl_conv_forward(layer, to_float(dataset)[0])
        dimmed = nnl_conv_forward(layer, to_float(shadowed)[0])

        # Patches starting at column c <= 21 lie inside the first 25 columns.
        np.testing.assert_allclose(dimmed[:, :, :22], plain[:, :, :22], atol=1e-5)
        assert not np.allclose(dimmed[:, :, 22:26], plain[:, :, 22:26], atol=1e-5)


class TestTransfer:
    """Top-layer retraining over imported filters."""

    def test_identity_transfer(self):
        banks = [make_bank(4, 4, seed=2)]
        blocks = [make_block()]
        train, test = make_dataset(20, seed=1), make_dataset(10, seed=2)

        result = transfer(banks, train, test, blocks, TOP_LAYER, seed=3, runs=1)

        arch = build_nnl_architecture(banks, blocks, 10, seed=3)
        train_top_layer(arch, train, TOP_LAYER, seed=3)
        expected = evaluate(arch, test)
        assert result.seeds == [3]
        assert result.reports[0].top1_error == expected.top1_error
        assert result.std_top1_error == 0.0

    def test_seeded_runs(self):
        result = transfer([make_bank(4, 4)], make_dataset(10, seed=1), make_dataset(10, seed=2),
                          [make_block()], TOP_LAYER, seed=5, runs=3)
        errors = [report.top1_error for report in result.reports]
        assert result.seeds == [5, 6, 7]
        assert result.mean_top1_error == pytest.approx(np.mean(errors))
        assert result.std_top1_error == pytest.approx(np.std(errors, ddof=1))

    def test_window_mismatch(self):
        with pytest.raises(ConfigurationError):
            transfer([make_bank(4, 3)], make_dataset(4), make_dataset(4), [make_block(window=4)],
                     TOP_LAYER, seed=0, runs=1)

    def test_edge_filters_transfer(self):
        block = make_block(channels=8, window=3, pool_window=4, pool_stride=3)
        filters = FiltersSection(learning_rate=1e-2, epochs=3, minibatch_size=100)
        banks = train_block_filters(_edges(20, seed=0), [block], filters, seed=0)

        result = transfer(banks, _edges(20, seed=1), _edges(20, seed=2), [block], TOP_LAYER,
                          seed=0, runs=2)
        assert result.mean_top1_error < 35.0


class TestTransferReport:
    """Mean and sample standard deviation over runs."""

    @staticmethod
    def _report(error):
        return EvalReport(dataset_name='d', top1_error=error, top5_error=0.0,
                          per_class_errors=np.zeros(2), n_samples=10)

    def test_statistics(self):
        report = TransferReport(reports=[self._report(e) for e in (20.0, 22.0, 24.0)],
                                seeds=[0, 1, 2])
        assert report.mean_top1_error == pytest.approx(22.0)
        assert report.std_top1_error == pytest.approx(2.0)

    def test_single_run(self):
        assert TransferReport(reports=[self._report(30.0)], seeds=[0]).std_top1_error == 0.0
