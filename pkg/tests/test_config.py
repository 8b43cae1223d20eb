"""
Tests for run configuration parsing, overrides and serialization.
"""

from pathlib import Path

import pytest
from structlog.testing import capture_logs

from repositories.config_repository import (
    apply_overrides,
    parse_config,
    parse_config_text,
    read_sections,
    save_config,
    serialize_config,
)
from tests.helpers import make_block
from validations.config_validation import ConfigValidation
from validations.errors import ConfigurationError

CONFIG_DIR = Path(__file__).resolve().parent.parent / 'configs'

SINGLE_BLOCK = """
# one block
[run]
seed = 0

[data]
train = data_batch_1.bin,data_batch_2.bin
test = test_batch.bin

[filters]
learning_rate = 1e-4
epochs = 500
minibatch_size = 1000

[architecture]
channels = 400
window = 4
power = 40
stride = 1
pool_window = 11
pool_stride = 2
delta = 0.2
rank_m = 2
"""

MULTI_BLOCK = """
[data]
train = train.bin

[architecture]
channels = 400
window = 3,4,5,6,8
power = 40
pool_window = 11
pool_stride = 2
delta = 0.1,0.1,0.2,0.15,0.2
"""


class TestParseConfig:
    """Sections, per-block lists and defaults."""

    def test_single_block_values(self):
        config = parse_config_text(SINGLE_BLOCK)
        block, = config.blocks
        assert (block.type, block.channels, block.window, block.power) == ('nnl', 400, 4, 40)
        assert (block.stride, block.pool_window, block.pool_stride) == (1, 11, 2)
        assert (block.delta, block.rank_m) == (0.2, 2)
        assert config.filters.learning_rate == 1e-4
        assert (config.filters.epochs, config.filters.minibatch_size) == (500, 1000)
        assert config.data.train == ['data_batch_1.bin', 'data_batch_2.bin']
        assert config.data.test == ['test_batch.bin']

    def test_delta_list(self):
        config = parse_config_text(MULTI_BLOCK)
        assert len(config.blocks) == 5
        assert [block.delta for block in config.blocks] == [0.1, 0.1, 0.2, 0.15, 0.2]
        assert [block.window for block in config.blocks] == [3, 4, 5, 6, 8]
        assert {block.channels for block in config.blocks} == {400}

    def test_defaults(self):
        config = parse_config_text(MULTI_BLOCK)
        assert config.run.seed == 0 and config.run.threads == 1
        assert config.classifier.schedule == 'cifar_70'
        assert config.transfer.runs == 5
        assert config.blocks[0].stride == 1 and config.blocks[0].rank_m == 2

    @pytest.mark.parametrize('text, field', [
        (SINGLE_BLOCK.replace('epochs = 500', 'epocs = 500'), 'filters.epocs'),
        (SINGLE_BLOCK.replace('window = 4\n', ''), 'architecture.window'),
        (SINGLE_BLOCK.replace('channels = 400', 'channels = many'), 'architecture.channels'),
        (SINGLE_BLOCK.replace('rank_m = 2', 'rank_m = 1'), 'architecture.rank_m'),
        (MULTI_BLOCK.replace('delta = 0.1,0.1,0.2,0.15,0.2', 'delta = 0.1,0.2'),
         'architecture.delta'),
        (SINGLE_BLOCK.replace('[run]', '[runs]'), 'runs'),
        (SINGLE_BLOCK.replace('train = data_batch_1.bin,data_batch_2.bin\n', ''), 'data.train'),
        (MULTI_BLOCK.replace('window = 3,4,5,6,8', 'window = 3,,5'), 'architecture.window'),
    ])
    def test_invalid(self, text, field):
        with pytest.raises(ConfigurationError) as info:
            parse_config_text(text)
        assert info.value.field == field

    def test_line_outside_section(self):
        with pytest.raises(ConfigurationError):
            parse_config_text('seed = 1\n' + SINGLE_BLOCK)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigurationError):
            parse_config(tmp_path / 'absent.cfg')

    def test_inline_comment(self):
        config = parse_config_text(SINGLE_BLOCK.replace('seed = 0', 'seed = 9  # lucky'))
        assert config.run.seed == 9

    @pytest.mark.parametrize('name', sorted(path.name for path in CONFIG_DIR.glob('*.cfg')))
    def test_shipped_configs(self, name):
        config = parse_config(CONFIG_DIR / name)
        assert config.blocks


class TestOverrides:
    """section.key=value pairs applied after the file."""

    def test_override_wins(self):
        config = parse_config_text(SINGLE_BLOCK, ['architecture.channels=500', 'run.seed = 4'])
        assert config.blocks[0].channels == 500
        assert config.run.seed == 4

    def test_override_adds_section(self):
        config = parse_config_text(SINGLE_BLOCK, ['classifier.epochs=3'])
        assert config.classifier.epochs == 3

    def test_original_untouched(self):
        raw = read_sections(SINGLE_BLOCK)
        apply_overrides(raw, ['run.seed=3'])
        assert raw['run']['seed'] == '0'

    @pytest.mark.parametrize('override', ['run.seed', 'seed=3', '.seed=3'])
    def test_malformed(self, override):
        with pytest.raises(ConfigurationError) as info:
            parse_config_text(SINGLE_BLOCK, [override])
        assert info.value.field == 'set'


class TestSerializeConfig:
    """Serialized configs parse back to equal configs."""

    def test_round_trip_single(self):
        config = parse_config_text(SINGLE_BLOCK)
        assert parse_config_text(serialize_config(config)) == config

    def test_round_trip_lists(self):
        config = parse_config_text(MULTI_BLOCK, ['data.use_validation=true',
                                                 'data.train_limit=100'])
        text = serialize_config(config)
        assert 'delta = 0.1,0.1,0.2,0.15,0.2' in text
        assert 'channels = 400\n' in text
        assert parse_config_text(text) == config

    def test_save(self, tmp_path):
        config = parse_config_text(MULTI_BLOCK)
        path = tmp_path / 'saved.cfg'
        save_config(config, path)
        assert parse_config(path) == config


class TestSweepWarnings:
    """Values outside the explored ranges warn without failing."""

    def test_inside_ranges(self):
        with capture_logs() as logs:
            parse_config_text(SINGLE_BLOCK)
        assert not [entry for entry in logs if entry['log_level'] == 'warning']

    def test_outside_ranges(self):
        with capture_logs() as logs:
            config = parse_config_text(SINGLE_BLOCK, ['architecture.channels=64',
                                                      'architecture.window=20'])
        names = {entry['name'] for entry in logs if entry['log_level'] == 'warning'}
        assert names == {'architecture.channels[0]', 'architecture.window[0]'}
        assert config.blocks[0].channels == 64

    def test_power_ignored_for_conv(self):
        blocks = [make_block('conv', channels=400, power=500),
                  make_block(channels=400, power=500)]
        with capture_logs():
            assert ConfigValidation.warn_sweep_ranges(blocks) == 1
