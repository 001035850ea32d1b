# cli/commands/bounds.py
"""
The ``bounds`` subcommand: best known bounds for an index query, or a single
calculator formula evaluated directly with --formula.
"""

import logging
import math

from cli.commands.utils import emit, parse_exponent, parse_float_list, parse_space
from core import bound_calculator as calc
from core.bound_calculator import BoundResult, CoincidencePair, IndexQuery, ScalarField, Variant
from utils.exceptions import UsageError

logger = logging.getLogger(__name__)

VARIANTS = {
    'mult': Variant.MULTILINEAR,
    'multilinear': Variant.MULTILINEAR,
    'pol': Variant.POLYNOMIAL,
    'polynomial': Variant.POLYNOMIAL,
}

FORMULAS = (
    'mult_upper_from_coincidence', 'pol_upper_from_coincidence', 'cotype_coincidence_t',
    'scalar_coincidence_s', 'cornbd_upper', 'exact_index_scalar', 'exact_index_c0', 'mps_lower',
    'cotipon_lower', 'even_real_lower', 'pol_exact_q1', 'classify_polynomial_region', 'region_map',
)

BOUND_COLUMNS = ('role', 'value', 'direction', 'region', 'citation')


def register(subparsers, common):
    parser = subparsers.add_parser('bounds', parents=[common], help='Bounds for the index of summability')
    parser.add_argument('--variant', choices=sorted(VARIANTS), default='mult')
    parser.add_argument('--m', type=int, help='Degree m >= 1')
    parser.add_argument('--p', type=parse_exponent)
    parser.add_argument('--q', type=parse_exponent)
    parser.add_argument('--field', choices=[f.value for f in ScalarField], default='real')
    parser.add_argument('--domain', default='lq-star', help='lq-star, lp:<s>, c0 or abstract')
    parser.add_argument('--codomain', help='scalar, c0, abstract or lp:<s> (default: abstract with --cotype, else scalar)')
    parser.add_argument('--cotype', type=parse_exponent, help='Cotype r of the codomain')
    parser.add_argument('--s', type=parse_exponent, help='Coincidence exponent s')
    parser.add_argument('--t', type=parse_exponent, help='Coincidence exponent t')
    parser.add_argument('--scalar-real-even', action='store_true', help='pol_exact_q1 for real scalar polynomials')
    parser.add_argument('--p-grid', type=parse_float_list, help='Comma-separated p values for region_map')
    parser.add_argument('--q-grid', type=parse_float_list, help='Comma-separated q values for region_map')
    parser.add_argument('--formula', choices=FORMULAS, help='Evaluate one formula instead of aggregating')
    parser.set_defaults(handler=cmd_bounds)


def _require(args, *names):
    for name in names:
        if getattr(args, name) is None:
            raise UsageError(f"--{name.replace('_', '-')} is required here", name)


def build_query(args, config) -> IndexQuery:
    _require(args, 'm', 'p', 'q')
    if args.codomain is None:
        codomain_text = 'abstract' if args.cotype is not None else 'scalar'
    else:
        codomain_text = args.codomain
    codomain = parse_space(codomain_text, config, cotype=args.cotype, q=args.q)
    # Domain cotypes never enter a formula; an abstract domain is recorded with infinite cotype
    domain_cotype = math.inf if args.domain == 'abstract' else None
    domain = parse_space(args.domain, config, cotype=domain_cotype, q=args.q)
    return IndexQuery(args.m, args.p, args.q, VARIANTS[args.variant], args.field, (domain,), codomain)


def _row(role: str, result: BoundResult) -> dict:
    return {'role': role, **result.to_dict()}


def evaluate_formula(args, config):
    """Dispatch --formula; returns (rows, columns, document)."""
    name = args.formula
    if name == 'scalar_coincidence_s':
        _require(args, 'm', 't')
        value = calc.scalar_coincidence_s(args.m, args.t)
        return [{'formula': name, 'value': value}], ('formula', 'value'), {'formula': name, 'value': value}
    if name == 'cotype_coincidence_t':
        _require(args, 'm', 'cotype')
        s = args.s if args.s is not None else config.getfloat('bounds', 'default_coincidence_s', 1.0)
        value = calc.cotype_coincidence_t(args.m, args.cotype, s)
        return [{'formula': name, 'value': value}], ('formula', 'value'), {'formula': name, 'value': value}
    if name == 'region_map':
        _require(args, 'm', 'cotype', 'p_grid', 'q_grid')
        grid = calc.region_map(args.m, args.cotype, args.p_grid, args.q_grid)
        rows = [{'q': q, 'p': p, 'region': label}
                for q, labels in zip(args.q_grid, grid) for p, label in zip(args.p_grid, labels)]
        return rows, ('q', 'p', 'region'), {'p_grid': args.p_grid, 'q_grid': args.q_grid, 'regions': grid}
    if name == 'classify_polynomial_region':
        _require(args, 'm', 'p', 'q', 'cotype')
        label = calc.classify_polynomial_region(args.m, args.p, args.q, args.cotype)
        return [{'formula': name, 'region': label}], ('formula', 'region'), {'formula': name, 'region': label}

    if name in ('mult_upper_from_coincidence', 'pol_upper_from_coincidence'):
        _require(args, 'm', 'p', 'q', 't', 's')
        result = getattr(calc, name)(args.m, args.p, args.q, CoincidencePair(args.t, args.s))
    elif name == 'cornbd_upper':
        _require(args, 'm', 'cotype', 'p', 'q')
        s = args.s if args.s is not None else config.getfloat('bounds', 'default_coincidence_s', 1.0)
        result = calc.cornbd_upper(args.m, args.cotype, args.p, args.q, s)
    elif name in ('exact_index_scalar', 'exact_index_c0'):
        _require(args, 'm', 'p', 'q')
        result = getattr(calc, name)(args.m, args.p, args.q)
    elif name in ('mps_lower', 'cotipon_lower'):
        _require(args, 'm', 'p', 'q', 'cotype')
        result = getattr(calc, name)(args.m, args.p, args.q, args.cotype)
    elif name == 'even_real_lower':
        _require(args, 'm', 'p', 'q')
        result = calc.even_real_lower(args.m, args.p, args.q, args.field)
    else:
        _require(args, 'm', 'p')
        if not args.scalar_real_even:
            _require(args, 'cotype')
        result = calc.pol_exact_q1(args.m, args.p, args.cotype, scalar_real_even=args.scalar_real_even)
    row = _row(name, result)
    return [row], BOUND_COLUMNS, result.to_dict()


def cmd_bounds(args, config, out) -> int:
    if args.formula:
        rows, columns, document = evaluate_formula(args, config)
        emit(args.format, rows, columns, out, document)
        return 0

    query = build_query(args, config)
    s = args.s if args.s is not None else config.getfloat('bounds', 'default_coincidence_s', 1.0)
    bounds = calc.aggregate_bounds(query, s)
    if bounds.is_empty:
        logger.info("No known bound covers this query")
    rows = []
    for role in ('lower', 'upper', 'exact'):
        result = getattr(bounds, role)
        if result is not None:
            rows.append(_row(role, result))
    emit(args.format, rows, BOUND_COLUMNS, out, bounds.to_dict())
    if not rows and args.format == 'table':
        out.write("no known bounds for this query\n")
    return 0
