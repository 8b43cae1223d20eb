"""
Tests for filter bank and model files, training logs and reports.
"""

import csv
import struct

import numpy as np
import pytest

from business.model_business import build_conv_architecture, build_nnl_architecture
from entities.dataset import ShadowSpec
from entities.report import EvalReport, TransferReport
from entities.training import EpochLog
from repositories.filter_bank_repository import (
    BANK_HEADER,
    load_filter_bank,
    save_filter_bank,
)
from repositories.model_repository import load_model, model_to_bytes, save_model
from repositories.report_repository import (
    format_eval_report,
    format_transfer_report,
    read_training_log,
    write_eval_reports,
    write_training_log,
    write_transfer_report,
)
from tests.helpers import make_bank, make_block
from validations.errors import ConfigurationError, FormatError


def _read_csv(path):
    with open(path, newline='', encoding='utf-8') as handle:
        return list(csv.DictReader(handle))


def _report(top1=25.0, shadow=None):
    return EvalReport(dataset_name='test', top1_error=top1, top5_error=5.0,
                      per_class_errors=np.array([10.0, np.nan, 40.0]), n_samples=30,
                      shadow_spec=shadow)


class TestFilterBankFile:
    """The .nnlf layout."""

    def test_round_trip(self, tmp_path):
        bank = make_bank(7, 3, seed=4)
        path = tmp_path / 'bank.nnlf'
        save_filter_bank(bank, path)

        loaded = load_filter_bank(path)
        np.testing.assert_array_equal(loaded.weights, bank.weights)
        np.testing.assert_array_equal(loaded.win_counts, bank.win_counts)
        assert loaded.window == 3
        assert path.stat().st_size == BANK_HEADER.size + 7 * 27 * 4 + 7 * 8

    def test_header(self, tmp_path):
        path = tmp_path / 'bank.nnlf'
        save_filter_bank(make_bank(2, 4), path)
        magic, version, channels, window, colors, dtype = \
            BANK_HEADER.unpack(path.read_bytes()[:BANK_HEADER.size])
        assert (magic, version, channels, window, colors, dtype) == (b'NNLF', 1, 2, 4, 3, 0)

    def test_bad_magic(self, tmp_path):
        path = tmp_path / 'bank.nnlf'
        save_filter_bank(make_bank(2, 2), path)
        path.write_bytes(b'XXXX' + path.read_bytes()[4:])
        with pytest.raises(FormatError, match='magic'):
            load_filter_bank(path)

    def test_truncated(self, tmp_path):
        path = tmp_path / 'bank.nnlf'
        save_filter_bank(make_bank(2, 2), path)
        path.write_bytes(path.read_bytes()[:-3])
        with pytest.raises(FormatError):
            load_filter_bank(path)

    def test_trailing_bytes(self, tmp_path):
        path = tmp_path / 'bank.nnlf'
        save_filter_bank(make_bank(2, 2), path)
        path.write_bytes(path.read_bytes() + b'\0')
        with pytest.raises(FormatError, match='trailing'):
            load_filter_bank(path)

    def test_inconsistent_bank(self, tmp_path):
        bank = make_bank(3, 2)
        bank.win_counts = np.zeros(2, dtype=np.uint64)
        with pytest.raises(ConfigurationError):
            save_filter_bank(bank, tmp_path / 'bad.nnlf')


class TestModelFile:
    """The .nnlm layout for both block types."""

    def test_nnl_round_trip(self, tmp_path):
        blocks = [make_block(channels=4, window=4, power=40),
                  make_block(channels=3, window=3, power=5, stride=2, pool_window=3,
                             pool_stride=1)]
        arch = build_nnl_architecture([make_bank(4, 4), make_bank(3, 3)], blocks, 10, seed=0)
        path = tmp_path / 'model.nnlm'
        save_model(arch, path)

        loaded = load_model(path)
        assert loaded.is_nnl_only
        first, second = loaded.blocks
        assert (first.conv.power, first.conv.stride) == (40, 1)
        assert (second.conv.power, second.conv.stride) == (5, 2)
        assert (second.pool.window, second.pool.stride) == (3, 1)
        np.testing.assert_array_equal(second.conv.bank.weights, arch.blocks[1].conv.bank.weights)
        np.testing.assert_array_equal(loaded.classifier.weights, arch.classifier.weights)
        np.testing.assert_array_equal(loaded.classifier.biases, arch.classifier.biases)
        assert model_to_bytes(loaded) == path.read_bytes()

    def test_conv_round_trip(self, tmp_path):
        arch = build_conv_architecture([make_block('conv', channels=3, window=2)], 10, seed=2)
        arch.blocks[0].conv.biases[:] = [0.5, -1.0, 2.0]
        path = tmp_path / 'conv.nnlm'
        save_model(arch, path)

        loaded = load_model(path)
        layer = loaded.blocks[0].conv
        assert not loaded.is_nnl_only
        assert (layer.window, layer.channels) == (2, 3)
        np.testing.assert_array_equal(layer.weights, arch.blocks[0].conv.weights)
        np.testing.assert_array_equal(layer.biases, [0.5, -1.0, 2.0])

    def test_bad_magic(self, tmp_path):
        path = tmp_path / 'model.nnlm'
        path.write_bytes(b'NNLF' + bytes(8))
        with pytest.raises(FormatError, match='magic'):
            load_model(path)

    def test_unknown_block_tag(self, tmp_path):
        path = tmp_path / 'model.nnlm'
        path.write_bytes(struct.pack('<4sIII', b'NNLM', 1, 1, 7))
        with pytest.raises(FormatError, match='tag'):
            load_model(path)

    def test_trailing_bytes(self, tmp_path):
        arch = build_conv_architecture([make_block('conv')], 10, seed=0)
        path = tmp_path / 'model.nnlm'
        path.write_bytes(model_to_bytes(arch) + b'\1\2')
        with pytest.raises(FormatError, match='trailing'):
            load_model(path)


class TestTrainingLog:
    """CSV rows per epoch."""

    def test_round_trip(self, tmp_path):
        history = [EpochLog(epoch=1, lr=1e-4, train_error=60.0, test_error=None, loss=1.7),
                   EpochLog(epoch=2, lr=8e-5, train_error=40.5, test_error=45.25, loss=1.2)]
        path = tmp_path / 'log.csv'
        write_training_log(history, path)

        rows = _read_csv(path)
        assert list(rows[0]) == ['epoch', 'lr', 'train_error', 'test_error', 'loss']
        assert rows[0]['test_error'] == ''
        assert read_training_log(path) == history


class TestReports:
    """Evaluation and transfer summaries."""

    def test_eval_csv(self, tmp_path):
        path = tmp_path / 'eval.csv'
        write_eval_reports([_report(), _report(40.0, ShadowSpec(25, 0.3))], path)
        rows = _read_csv(path)
        assert len(rows) == 2
        assert rows[0]['shadow'] == ''
        assert rows[1]['shadow'] == 'cols=25,factor=0.3'
        assert float(rows[1]['top1_error']) == 40.0
        assert rows[0]['class_1'] == ''
        assert float(rows[0]['class_2']) == 40.0

    def test_eval_text(self):
        text = format_eval_report(_report(shadow=ShadowSpec(25, 0.3)))
        assert 'top-1 error 25.00%' in text
        assert 'top-5 error 5.00%' in text
        assert 'shadow      cols=25,factor=0.3' in text
        assert 'per class   10.0 - 40.0' in text

    def test_transfer(self, tmp_path):
        report = TransferReport(reports=[_report(20.0), _report(22.0), _report(24.0)],
                                seeds=[4, 5, 6])
        assert format_transfer_report(report).splitlines()[-1] == \
            'top-1 error 22.00% ± 2.00% over 3 run(s)'

        path = tmp_path / 'transfer.csv'
        write_transfer_report(report, path)
        rows = _read_csv(path)
        assert [row['seed'] for row in rows] == ['4', '5', '6']
        assert [float(row['top1_error']) for row in rows] == [20.0, 22.0, 24.0]
