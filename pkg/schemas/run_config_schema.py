"""
Schema module for run configuration files.
"""

from typing import List

from marshmallow import RAISE, Schema, ValidationError, fields, post_load, validate

from entities.run_config import (
    BlockConfig,
    ClassifierSection,
    DataSection,
    FiltersSection,
    RunConfig,
    RunSection,
    TransferSection,
)
from entities.training import ScheduleKind

BLOCK_TYPES = ('nnl', 'conv')
DATA_FORMATS = ('cifar10', 'raw')
POSITIVE = validate.Range(min=1)
NON_NEGATIVE = validate.Range(min=0)

BLOCK_DEFAULTS = {
    'type': ['nnl'],
    'power': [1],
    'stride': [1],
    'pool_stride': [1],
    'delta': [0.2],
    'rank_m': [2],
}


class CommaList(fields.Field):
    """
    Comma separated values, each deserialized by an inner field.
    """

    def __init__(self, inner: fields.Field, **kwargs):
        super().__init__(**kwargs)
        self.inner = inner

    def _deserialize(self, value, attr, data, **kwargs):
        items = value if isinstance(value, (list, tuple)) \
            else [item.strip() for item in str(value).split(',')]
        if not items or any(item == '' for item in items):
            raise ValidationError('Empty list item.')
        return [self.inner.deserialize(item) for item in items]


class RunSchema(Schema):
    """
    Schema for the [run] section.

    Attributes:
        seed (int): Root seed.
        threads (int): Worker threads (at least 1).
        output_dir (str): Directory for produced files.
    """

    class Meta:
        unknown = RAISE

    seed = fields.Int(validate=NON_NEGATIVE)
    threads = fields.Int(validate=POSITIVE)
    output_dir = fields.Str()

    @post_load
    def make_section(self, data, **kwargs):
        return RunSection(**data)


class DataSchema(Schema):
    """
    Schema for the [data] section.
    """

    class Meta:
        unknown = RAISE

    train = CommaList(fields.Str(), required=True)
    test = CommaList(fields.Str())
    format = fields.Str(validate=validate.OneOf(DATA_FORMATS))
    val_fraction = fields.Float(
        validate=validate.Range(min=0, max=1, min_inclusive=False, max_inclusive=False))
    use_validation = fields.Bool()
    train_limit = fields.Int(validate=POSITIVE)
    test_limit = fields.Int(validate=POSITIVE)

    @post_load
    def make_section(self, data, **kwargs):
        return DataSection(**data)


class FiltersSchema(Schema):
    """
    Schema for the [filters] section.
    """

    class Meta:
        unknown = RAISE

    learning_rate = fields.Float(validate=validate.Range(min=0, min_inclusive=False))
    epochs = fields.Int(validate=NON_NEGATIVE)
    minibatch_size = fields.Int(validate=POSITIVE)
    scale_update_by_max = fields.Bool()
    normalize_patches = fields.Bool()
    dead_unit_threshold = fields.Float(validate=validate.Range(min=0))
    prune_dead = fields.Bool()

    @post_load
    def make_section(self, data, **kwargs):
        return FiltersSection(**data)


class ArchitectureSchema(Schema):
    """
    Schema for the [architecture] section.

    Every per-block key holds either one value, used by all blocks, or one
    value per block.

    Attributes:
        blocks (int): Number of blocks; defaults to the longest list.
        type (List[str]): 'nnl' or 'conv'.
        channels (List[int]): K.
        window (List[int]): W.
        power (List[int]): n.
        stride (List[int]): ST.
        pool_window (List[int]): W_p.
        pool_stride (List[int]): ST_p.
        delta (List[float]): Anti-Hebbian strength.
        rank_m (List[int]): Rank of the anti-Hebbian update.
    """

    class Meta:
        unknown = RAISE

    blocks = fields.Int(validate=POSITIVE)
    type = CommaList(fields.Str(validate=validate.OneOf(BLOCK_TYPES)))
    channels = CommaList(fields.Int(validate=POSITIVE), required=True)
    window = CommaList(fields.Int(validate=POSITIVE), required=True)
    power = CommaList(fields.Int(validate=POSITIVE))
    stride = CommaList(fields.Int(validate=POSITIVE))
    pool_window = CommaList(fields.Int(validate=POSITIVE), required=True)
    pool_stride = CommaList(fields.Int(validate=POSITIVE))
    delta = CommaList(fields.Float(validate=validate.Range(min=0)))
    rank_m = CommaList(fields.Int(validate=validate.Range(min=2)))

    @post_load
    def make_blocks(self, data, **kwargs) -> List[BlockConfig]:
        values = {**BLOCK_DEFAULTS, **{key: value for key, value in data.items()
                                       if key != 'blocks'}}
        count = data.get('blocks', max(len(items) for items in values.values()))

        for key, items in values.items():
            if len(items) not in (1, count):
                raise ValidationError(
                    f'{len(items)} values for {count} block(s).', field_name=key)

        return [BlockConfig(**{key: items[index] if len(items) > 1 else items[0]
                               for key, items in values.items()})
                for index in range(count)]


class ClassifierSchema(Schema):
    """
    Schema for the [classifier] section.
    """

    class Meta:
        unknown = RAISE

    epochs = fields.Int(validate=POSITIVE)
    minibatch_size = fields.Int(validate=POSITIVE)
    schedule = fields.Str(validate=validate.OneOf([kind.value for kind in ScheduleKind]))
    base_lr = fields.Float(validate=validate.Range(min=0, min_inclusive=False))
    weight_scale = fields.Float(validate=validate.Range(min=0, min_inclusive=False))

    @post_load
    def make_section(self, data, **kwargs):
        return ClassifierSection(**data)


class TransferSchema(Schema):
    """
    Schema for the [transfer] section.
    """

    class Meta:
        unknown = RAISE

    runs = fields.Int(validate=POSITIVE)

    @post_load
    def make_section(self, data, **kwargs):
        return TransferSection(**data)


class RunConfigSchema(Schema):
    """
    Schema for a whole run configuration, one nested schema per section.
    """

    class Meta:
        unknown = RAISE

    run = fields.Nested(RunSchema)
    data = fields.Nested(DataSchema, required=True)
    filters = fields.Nested(FiltersSchema)
    architecture = fields.Nested(ArchitectureSchema, required=True)
    classifier = fields.Nested(ClassifierSchema)
    transfer = fields.Nested(TransferSchema)

    @post_load
    def make_config(self, data, **kwargs) -> RunConfig:
        sections = {key: value for key, value in data.items() if key != 'architecture'}
        return RunConfig(blocks=data['architecture'], **sections)
