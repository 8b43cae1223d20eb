"""
Schema module for training logs and evaluation reports.
"""

from marshmallow import Schema, fields, post_load, validate

from entities.dataset import ShadowSpec
from entities.training import EpochLog


class EpochLogSchema(Schema):
    """
    Schema for one row of a training log.

    Attributes:
        epoch (int): 1-based epoch.
        lr (float): Learning rate used.
        train_error (float): Training top-1 error in percent.
        test_error (float): Test top-1 error in percent, empty if not evaluated.
        loss (float): Mean training cross-entropy.
    """

    epoch = fields.Int(required=True)
    lr = fields.Float(required=True)
    train_error = fields.Float(required=True)
    test_error = fields.Float(allow_none=True, load_default=None)
    loss = fields.Float(required=True)

    @post_load
    def make_row(self, data, **kwargs):
        return EpochLog(**data)


class EvalReportSchema(Schema):
    """
    Schema for the summary line of an evaluation report.
    """

    dataset = fields.Str(attribute='dataset_name')
    n_samples = fields.Int()
    shadow = fields.Function(lambda report: str(report.shadow_spec)
                             if report.shadow_spec is not None else '')
    scale = fields.Float()
    top1_error = fields.Float()
    top5_error = fields.Float()


class TransferRunSchema(Schema):
    """
    Schema for one seeded run of a transfer experiment.
    """

    run = fields.Int()
    seed = fields.Int()
    top1_error = fields.Float()
    top5_error = fields.Float()


class ShadowSchema(Schema):
    """
    Schema for a shadow given as `cols=<n>,factor=<I>`.

    Attributes:
        cols (int): Leading columns dimmed (0 to 32).
        factor (float): Intensity multiplier in (0, 1].
    """

    cols = fields.Int(required=True, attribute='columns', validate=validate.Range(min=0))
    factor = fields.Float(required=True, attribute='intensity',
                          validate=validate.Range(min=0, max=1, min_inclusive=False))

    @post_load
    def make_spec(self, data, **kwargs):
        return ShadowSpec(**data)
