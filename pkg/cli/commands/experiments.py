# cli/commands/experiments.py
"""
The ``estimate``, ``verify`` and ``presets`` subcommands.
"""

import logging

from cli.commands.utils import emit, invocation_for, make_record, parse_int_list
from core.norm_estimator import NormMethod
from processing.experiment_runner import (
    PRESETS,
    ExperimentConfig,
    ExperimentRunner,
    load_experiment,
    scenario_presets,
)
from processing.fitting import ExponentFit, verify_against_bounds
from storage.artifact_store import ArtifactStore
from storage.models import require
from utils.exceptions import SchemaError, UsageError

logger = logging.getLogger(__name__)

SUMMARY_COLUMNS = ('scenario', 'seed', 'slope', 'intercept', 'residual_rms', 'n_used', 'verdict')


def register(subparsers, common):
    estimate = subparsers.add_parser('estimate', parents=[common], help='Run a dimension sweep and fit its exponent')
    estimate.add_argument('--preset', choices=sorted(PRESETS), required=True)
    estimate.add_argument('--m', type=int)
    estimate.add_argument('--p', type=float)
    estimate.add_argument('--q', type=float)
    estimate.add_argument('--n-grid', type=parse_int_list, help='Comma-separated increasing dimensions')
    estimate.add_argument('--seeds', type=int, help='Number of seeds, counted up from --seed')
    estimate.add_argument('--norm-method', choices=[m.value for m in NormMethod])
    estimate.add_argument('--workers', type=int)
    estimate.add_argument('--tolerance', type=float, help='Verification tolerance on the slope')
    estimate.add_argument('--output-dir', help='Artifact directory (default: [output] directory)')
    estimate.add_argument('--name', help='Artifact base name (default: the preset name)')
    estimate.add_argument('--verify', action='store_true', help='Check the fitted slope against the bounds')
    estimate.set_defaults(handler=cmd_estimate)

    verify = subparsers.add_parser('verify', parents=[common], help='Re-verify stored fits against the bounds')
    verify.add_argument('--artifact', required=True, help='JSON-lines artifact written by estimate')
    verify.set_defaults(handler=cmd_verify)

    presets = subparsers.add_parser('presets', parents=[common], help='List the canned experiments')
    presets.set_defaults(handler=cmd_presets)


def resolve_experiment(args, config) -> ExperimentConfig:
    """Preset defaults, then config file sections, then flags."""
    overrides = {
        'm': args.m,
        'p': args.p,
        'q': args.q,
        'n_grid': args.n_grid,
        'norm_method': args.norm_method,
        'tolerance': args.tolerance,
    }
    if args.seeds is not None or args.seed != 0:
        count = args.seeds if args.seeds is not None else len(load_experiment(args.preset, config).seeds)
        if count < 1:
            raise UsageError("--seeds must be at least 1", 'seeds')
        overrides['seeds'] = [args.seed + k for k in range(count)]
    return load_experiment(args.preset, config, overrides)


def cmd_estimate(args, config, out) -> int:
    experiment = resolve_experiment(args, config)
    runner = ExperimentRunner(config, workers=args.workers)
    outcome = runner.run_and_fit(experiment, verify=args.verify)

    invocation = invocation_for(args)
    inputs = {'experiment': experiment.to_dict(), 'verify': args.verify}
    verdict = outcome.report.verdict.value if outcome.report else None

    fit_rows = [{'scenario': experiment.name, 'seed': s.seed, **f.to_dict()}
                for s, f in zip(outcome.series, outcome.fits)]
    summary_row = {'scenario': experiment.name, 'seed': 'median', **outcome.summary.to_dict(), 'verdict': verdict}

    records = [make_record('series', invocation, {**s.to_dict(), 'fit': f.to_dict()}, inputs)
               for s, f in zip(outcome.series, outcome.fits)]
    records.append(make_record('fit_summary', invocation, {
        'experiment': experiment.to_dict(),
        'tolerance': experiment.verification_tolerance(config),
        'fits': fit_rows,
        'summary': outcome.summary.to_dict(),
        'report': outcome.report.to_dict() if outcome.report else None,
        'verdict': verdict,
    }, inputs))

    store = ArtifactStore(config, args.output_dir)
    name = args.name or experiment.name
    store.write_records(name, records)
    store.write_series_csv(name, outcome.series)
    store.write_fits_csv(name, fit_rows + [summary_row])

    emit(args.format, fit_rows + [summary_row], SUMMARY_COLUMNS, out,
         {'summary': summary_row, 'fits': fit_rows,
          'report': outcome.report.to_dict() if outcome.report else None})
    return 0


def experiment_from_payload(payload, path=None) -> ExperimentConfig:
    data = require(payload, 'experiment', path)
    try:
        return ExperimentConfig(
            scenario=require(data, 'scenario', path),
            m=int(require(data, 'm', path)),
            p=float(require(data, 'p', path)),
            q=float(require(data, 'q', path)),
            n_grid=tuple(require(data, 'n_grid', path)),
            seeds=tuple(require(data, 'seeds', path)),
            norm_method=require(data, 'norm_method', path),
            name=data.get('name'),
            field=data.get('field', 'real'),
        )
    except (TypeError, ValueError) as e:
        raise SchemaError(f"Malformed experiment in {path}: {e}", field='experiment', path=path)


def cmd_verify(args, config, out) -> int:
    rows = []
    for record in ArtifactStore.read_records(args.artifact):
        if record.record_type != 'fit_summary':
            continue
        experiment = experiment_from_payload(record.payload, args.artifact)
        try:
            fit = ExponentFit.from_dict(require(record.payload, 'summary', args.artifact))
        except (KeyError, TypeError, ValueError) as e:
            raise SchemaError(f"Malformed summary in {args.artifact}: {e}", field='summary', path=args.artifact)
        tolerance = float(record.payload.get('tolerance', experiment.verification_tolerance(config)))
        report = verify_against_bounds(fit, experiment.index_query(config), tolerance, experiment.extremal)
        rows.append({'scenario': experiment.name, 'seed': 'median', **fit.to_dict(),
                     'verdict': report.verdict.value})
    if not rows:
        raise SchemaError(f"No fit_summary records in {args.artifact}", field='record_type', path=args.artifact)
    emit(args.format, rows, SUMMARY_COLUMNS, out)
    return 0


def cmd_presets(args, config, out) -> int:
    rows = []
    for experiment in scenario_presets():
        rows.append({
            **experiment.to_dict(),
            'n_grid': ','.join(str(n) for n in experiment.n_grid),
            'seeds': ','.join(str(s) for s in experiment.seeds),
            'region_ok': experiment.check_region() is None,
        })
    emit(args.format, rows, ('name', 'scenario', 'm', 'p', 'q', 'n_grid', 'seeds', 'norm_method', 'region_ok'), out)
    return 0
