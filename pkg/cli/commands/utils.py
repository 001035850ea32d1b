import csv
import hashlib
import logging
import math
from typing import Any, Dict, List, Optional, Sequence

from core.bound_calculator import SpaceDescriptor, SpaceKind
from storage.models import RunRecord, canonical_json, compute_digest
from utils.exceptions import UsageError

logger = logging.getLogger(__name__)


def parse_exponent(text: str) -> float:
    """Float parser for argparse that also accepts 'inf'."""
    value = text.strip().lower()
    if value in ('inf', 'infinity'):
        return math.inf
    return float(value)


def parse_int_list(text: str) -> List[int]:
    return [int(item) for item in text.split(',') if item.strip()]


def parse_float_list(text: str) -> List[float]:
    return [parse_exponent(item) for item in text.split(',') if item.strip()]


def get_file_hash(filepath: str) -> str:
    """Calculate SHA-256 hash of file content"""
    hash_sha256 = hashlib.sha256()
    with open(filepath, "rb") as f:
        for chunk in iter(lambda: f.read(4096), b""):
            hash_sha256.update(chunk)
    return hash_sha256.hexdigest()


def parse_space(text: str, config, cotype: Optional[float] = None, q: Optional[float] = None) -> SpaceDescriptor:
    """
    Space descriptor from a flag value: 'scalar', 'c0', 'abstract' (needs a
    cotype), 'lp:<s>' or 'lq-star' (l_{q*} for the query's q). Sequence-space
    cotypes come from the configured table unless given explicitly.
    """
    text = text.strip().lower()
    if text == 'scalar':
        return SpaceDescriptor.scalar()
    if text == 'c0':
        return SpaceDescriptor.c0()
    if text == 'abstract':
        if cotype is None:
            raise UsageError("An abstract space needs --cotype", 'cotype')
        return SpaceDescriptor.abstract(cotype)
    if text == 'lq-star':
        if q is None:
            raise UsageError("'lq-star' needs --q", 'q')
        descriptor = SpaceDescriptor.dual_sequence_space(q, 2.0)
        if descriptor.kind is SpaceKind.C0:
            return descriptor
        exponent = descriptor.exponent
        return SpaceDescriptor.sequence(exponent, cotype or config.get_cotype(SpaceKind.SEQUENCE_SPACE.value, exponent))
    if text.startswith('lp:'):
        try:
            exponent = parse_exponent(text[3:])
        except ValueError:
            raise UsageError(f"Malformed sequence space '{text}'", 'space')
        if math.isinf(exponent):
            return SpaceDescriptor.c0()
        return SpaceDescriptor.sequence(exponent, cotype or config.get_cotype(SpaceKind.SEQUENCE_SPACE.value, exponent))
    raise UsageError(f"Unknown space '{text}'; use scalar, c0, abstract, lq-star or lp:<s>", 'space')


def invocation_for(args, **resolved) -> Dict[str, Any]:
    """The parsed flags (plus resolved inputs) as stored in RunRecords."""
    flags = {key: value for key, value in sorted(vars(args).items()) if key != 'handler'}
    flags.update(resolved)
    return {'subcommand': args.command, 'flags': flags}


def make_record(record_type: str, invocation: Dict[str, Any], payload: Dict[str, Any],
                inputs: Optional[Dict[str, Any]] = None) -> RunRecord:
    """A RunRecord whose digest covers ``inputs`` (the invocation when omitted)."""
    record = RunRecord(record_type, invocation, payload)
    if inputs is not None:
        record.input_digest = compute_digest(inputs)
    return record


def _cell(value, precise: bool) -> str:
    if isinstance(value, bool) or value is None:
        return '' if value is None else str(value).lower()
    if isinstance(value, float):
        return format(value, '.17g' if precise else '.10g')
    return str(value)


def emit(fmt: str, rows: Sequence[Dict[str, Any]], columns: Sequence[str], out, document: Any = None) -> None:
    """Print rows as an aligned table or CSV, or ``document`` (default: the rows) as JSON."""
    if fmt == 'json':
        out.write(canonical_json(document if document is not None else list(rows)))
        out.write('\n')
        return
    if fmt == 'csv':
        writer = csv.writer(out, lineterminator='\n')
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_cell(row.get(c), True) for c in columns])
        return
    cells = [[_cell(row.get(c), False) for c in columns] for row in rows]
    widths = [max([len(c)] + [len(line[i]) for line in cells]) for i, c in enumerate(columns)]
    out.write('  '.join(c.ljust(w) for c, w in zip(columns, widths)).rstrip() + '\n')
    for line in cells:
        out.write('  '.join(v.ljust(w) for v, w in zip(line, widths)).rstrip() + '\n')
