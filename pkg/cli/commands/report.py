# cli/commands/report.py
"""
The ``report`` subcommand: merge fit summaries from several artifacts into one
table keyed by scenario and flag every verdict other than consistent.
"""

import logging

from cli.commands.utils import emit
from storage.artifact_store import ArtifactStore
from storage.models import require
from utils.exceptions import SchemaError, UsageError

logger = logging.getLogger(__name__)

REPORT_COLUMNS = ('scenario', 'seed', 'slope', 'intercept', 'residual_rms', 'n_used', 'verdict', 'flag')
ROW_FIELDS = ('scenario', 'seed', 'slope', 'intercept', 'residual_rms', 'n_used')


def register(subparsers, common):
    report = subparsers.add_parser('report', parents=[common], help='Consolidate estimate artifacts')
    report.add_argument('paths', nargs='*', help='JSON-lines artifacts')
    report.set_defaults(handler=cmd_report)


def _rows_from_record(record, path):
    payload = record.payload
    verdict = payload.get('verdict')
    fits = require(payload, 'fits', path)
    summary = require(payload, 'summary', path)
    if not isinstance(fits, list) or not isinstance(summary, dict):
        raise SchemaError(f"{path}: 'fits' must be a list and 'summary' an object", field='fits', path=path)
    scenario = require(require(payload, 'experiment', path), 'name', path)

    rows = []
    for fit in fits + [{'scenario': scenario, 'seed': 'median', **summary, 'verdict': verdict}]:
        if not isinstance(fit, dict):
            raise SchemaError(f"{path}: fit entries must be objects", field='fits', path=path)
        row = {name: require(fit, name, path) for name in ROW_FIELDS}
        row['verdict'] = fit.get('verdict')
        rows.append(row)
    return rows


def merge_reports(paths):
    """Rows from every fit_summary record, identical rows kept once, ordered by scenario then seed."""
    if not paths:
        raise UsageError("report needs at least one artifact path", 'paths')
    seen = set()
    rows = []
    for path in paths:
        for record in ArtifactStore.read_records(path):
            if record.record_type != 'fit_summary':
                continue
            for row in _rows_from_record(record, path):
                key = tuple(row[name] for name in ROW_FIELDS) + (row['verdict'],)
                if key in seen:
                    continue
                seen.add(key)
                rows.append(row)

    for row in rows:
        verdict = row['verdict']
        row['flag'] = '!' if verdict is not None and verdict != 'consistent' else ''
    rows.sort(key=lambda r: (str(r['scenario']), r['seed'] == 'median', r['seed'] if isinstance(r['seed'], int) else 0))
    return rows


def cmd_report(args, config, out) -> int:
    rows = merge_reports(args.paths)
    flagged = [row for row in rows if row['flag']]
    for row in flagged:
        logger.warning(f"Scenario {row['scenario']} has verdict {row['verdict']}")
    emit(args.format, rows, REPORT_COLUMNS, out, {'rows': rows, 'flagged': len(flagged)})
    return 0
