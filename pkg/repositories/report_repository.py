"""
Repository module for training logs and evaluation reports (CSV and text).
"""

import csv
from pathlib import Path
from typing import List, Sequence, Union

import numpy as np

from entities.report import EvalReport, TransferReport
from entities.training import EpochLog
from schemas.report_schema import EpochLogSchema, EvalReportSchema, TransferRunSchema

PathLike = Union[str, Path]

LOG_COLUMNS = ('epoch', 'lr', 'train_error', 'test_error', 'loss')
REPORT_COLUMNS = ('dataset', 'n_samples', 'shadow', 'scale', 'top1_error', 'top5_error')
TRANSFER_COLUMNS = ('run', 'seed', 'top1_error', 'top5_error')


def _write_rows(path: PathLike, columns: Sequence[str], rows: List[dict]) -> None:
    with open(path, 'w', newline='', encoding='utf-8') as handle:
        writer = csv.DictWriter(handle, fieldnames=list(columns))
        writer.writeheader()
        writer.writerows(rows)


def write_training_log(history: Sequence[EpochLog], path: PathLike) -> None:
    """
    Write one CSV row per epoch: epoch, lr, train_error, test_error, loss.
    """

    rows = EpochLogSchema(many=True).dump(history)
    for row in rows:
        if row['test_error'] is None:
            row['test_error'] = ''
    _write_rows(path, LOG_COLUMNS, rows)


def read_training_log(path: PathLike) -> List[EpochLog]:
    """
    Read a CSV training log back.
    """

    with open(path, newline='', encoding='utf-8') as handle:
        rows = [{key: (value if value != '' else None) for key, value in row.items()}
                for row in csv.DictReader(handle)]
    return EpochLogSchema(many=True).load(rows)


def _class_columns(report: EvalReport) -> dict:
    return {f'class_{index}': ('' if np.isnan(error) else float(error))
            for index, error in enumerate(report.per_class_errors)}


def write_eval_reports(reports: Sequence[EvalReport], path: PathLike) -> None:
    """
    Write evaluation reports as CSV, one row per report with per-class errors.
    """

    classes = max((len(report.per_class_errors) for report in reports), default=0)
    columns = list(REPORT_COLUMNS) + [f'class_{index}' for index in range(classes)]
    rows = [{**EvalReportSchema().dump(report), **_class_columns(report)}
            for report in reports]
    _write_rows(path, columns, rows)


def format_eval_report(report: EvalReport) -> str:
    """
    Human-readable summary of one evaluation.
    """

    lines = [f'dataset     {report.dataset_name} ({report.n_samples} images)']
    if report.shadow_spec is not None:
        lines.append(f'shadow      {report.shadow_spec}')
    if report.scale != 1.0:
        lines.append(f'scale       {report.scale:g}')
    lines.append(f'top-1 error {report.top1_error:.2f}%')
    lines.append(f'top-5 error {report.top5_error:.2f}%')

    if len(report.per_class_errors) <= 20:
        per_class = ' '.join('-' if np.isnan(error) else f'{error:.1f}'
                             for error in report.per_class_errors)
        lines.append(f'per class   {per_class}')
    return '\n'.join(lines)


def write_transfer_report(report: TransferReport, path: PathLike) -> None:
    """
    Write one CSV row per transfer run.
    """

    rows = TransferRunSchema(many=True).dump([
        {'run': run, 'seed': seed, 'top1_error': item.top1_error,
         'top5_error': item.top5_error}
        for run, (seed, item) in enumerate(zip(report.seeds, report.reports))])
    _write_rows(path, TRANSFER_COLUMNS, rows)


def format_transfer_report(report: TransferReport) -> str:
    """
    Human-readable summary of a transfer experiment: every run, then mean ± std.
    """

    lines = [f'run {run} (seed {seed}): top-1 error {item.top1_error:.2f}%'
             for run, (seed, item) in enumerate(zip(report.seeds, report.reports))]
    lines.append(f'top-1 error {report.mean_top1_error:.2f}% ± {report.std_top1_error:.2f}% '
                 f'over {len(report.reports)} run(s)')
    return '\n'.join(lines)
