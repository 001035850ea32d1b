# cli/app.py
"""
Command-line entry point: ``python -m cli.app <subcommand> [flags]``.

Exit codes: 0 success, 1 usage or input errors, 2 region/inapplicability
errors, 3 size budget exceeded, 4 internal inconsistency.
"""

import argparse
import logging
import sys

from cli.commands import bounds, experiments, forms, report
from config.settings import DEFAULT_CONFIG_FILE, Config
from core import __version__
from utils.exceptions import (
    InapplicableError,
    InternalInconsistencyError,
    RegionError,
    SizeError,
    SummabilityError,
    UsageError,
)
from utils.logger import setup_logging

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_REGION = 2
EXIT_SIZE = 3
EXIT_INCONSISTENT = 4


class CliArgumentParser(argparse.ArgumentParser):
    """Raises UsageError instead of exiting, so main() owns the exit code."""

    def error(self, message):
        raise UsageError(message)


def exit_code_for(error: SummabilityError) -> int:
    if isinstance(error, SizeError):
        return EXIT_SIZE
    if isinstance(error, InternalInconsistencyError):
        return EXIT_INCONSISTENT
    if isinstance(error, (RegionError, InapplicableError)):
        return EXIT_REGION
    return EXIT_USAGE


def build_parser() -> argparse.ArgumentParser:
    common = CliArgumentParser(add_help=False)
    common.add_argument('--config', default=DEFAULT_CONFIG_FILE, help='INI configuration file')
    common.add_argument('--seed', type=int, default=0, help='Master random seed (default: 0)')
    common.add_argument('--format', choices=('json', 'csv', 'table'), help='Output format (default: [output] format)')
    common.add_argument('--log-level', help='Overrides [logging] level')

    parser = CliArgumentParser(
        prog='summability',
        description='Index of summability calculator and numerical verification toolkit',
    )
    parser.add_argument('--version', action='version', version=f'%(prog)s {__version__}')
    subparsers = parser.add_subparsers(dest='command', metavar='<subcommand>')
    subparsers.required = True

    bounds.register(subparsers, common)
    forms.register(subparsers, common)
    experiments.register(subparsers, common)
    report.register(subparsers, common)
    return parser


def _describe(error: SummabilityError) -> str:
    details = ', '.join(f"{key}={value}" for key, value in sorted(error.details.items()))
    return f"{error.error_code}: {error.message}" + (f" ({details})" if details else '')


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        config = Config(args.config)
        if args.log_level:
            config.set('logging', 'level', args.log_level)
        setup_logging(config)
        if args.format is None:
            args.format = config.get('output', 'format', 'table')
        if args.format not in ('json', 'csv', 'table'):
            raise UsageError(f"Unknown output format '{args.format}'", 'format')
        return args.handler(args, config, out)
    except SummabilityError as e:
        print(f"error: {_describe(e)}", file=sys.stderr)
        return exit_code_for(e)
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == '__main__':
    sys.exit(main())
