# cli/commands/forms.py
"""
The ``construct`` and ``norm`` subcommands: build a witness form and store it,
then estimate the norm of a stored form.
"""

import logging
import os

from cli.commands.utils import emit, get_file_hash, invocation_for, parse_exponent
from core.constructions import (
    MultilinearForm,
    build_coordinate_operator,
    build_diagonal_form,
    build_ksz_form,
)
from core.norm_estimator import NormEstimator, NormMethod
from utils.exceptions import SchemaError

logger = logging.getLogger(__name__)

BUILDERS = ('ksz', 'diagonal', 'coordinate')
NORM_COLUMNS = ('value', 'kind', 'exact', 'restarts_used', 'converged', 'iterations', 'resolution')


def register(subparsers, common):
    construct = subparsers.add_parser('construct', parents=[common], help='Build a witness form and save it')
    construct.add_argument('--kind', choices=BUILDERS, required=True)
    construct.add_argument('--m', type=int, required=True)
    construct.add_argument('--n', type=int, required=True)
    construct.add_argument('--domain-exponent', type=parse_exponent, default=2.0)
    construct.add_argument('--output', required=True, help='Path of the serialized form')
    construct.set_defaults(handler=cmd_construct)

    norm = subparsers.add_parser('norm', parents=[common], help='Norm of a serialized form')
    norm.add_argument('--input', required=True, help='Path of a serialized form')
    norm.add_argument('--method', choices=[m.value for m in NormMethod], default='ascent')
    norm.add_argument('--restarts', type=int)
    norm.add_argument('--tol', type=float)
    norm.add_argument('--max-iters', type=int)
    norm.add_argument('--resolution', type=int)
    norm.set_defaults(handler=cmd_norm)


def cmd_construct(args, config, out) -> int:
    if args.kind == 'ksz':
        form = build_ksz_form(args.m, args.n, args.seed, args.domain_exponent, config.get_max_coefficients())
    elif args.kind == 'diagonal':
        form = build_diagonal_form(args.m, args.n, args.domain_exponent)
    else:
        form = build_coordinate_operator(args.m, args.n, args.domain_exponent)

    directory = os.path.dirname(args.output)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(args.output, 'wb') as f:
        f.write(form.to_bytes())
    logger.info(f"Saved {args.kind} form (m={args.m}, n={args.n}) to {args.output}")

    header = form.header()
    header['sha256'] = get_file_hash(args.output)
    emit(args.format, [header], ('kind', 'order', 'dim', 'codomain', 'seed', 'sha256'), out,
         {'invocation': invocation_for(args), 'form': header})
    return 0


def load_form(path: str) -> MultilinearForm:
    if not os.path.exists(path):
        raise SchemaError(f"Form file not found: {path}", field='input', path=path)
    with open(path, 'rb') as f:
        return MultilinearForm.from_bytes(f.read())


def cmd_norm(args, config, out) -> int:
    form = load_form(args.input)
    estimator = NormEstimator(config, seed=args.seed)
    for name in ('restarts', 'tol', 'max_iters', 'resolution'):
        value = getattr(args, name)
        if value is not None:
            setattr(estimator, name, value)

    estimate = estimator.estimate(form, NormMethod(args.method))
    row = estimate.to_dict()
    emit(args.format, [row], NORM_COLUMNS, out,
         {'invocation': invocation_for(args, input_sha256=get_file_hash(args.input)), 'norm': row})
    return 0
