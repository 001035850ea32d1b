# storage/models.py
"""
Records persisted as JSON lines. Every record carries the tool version, the
full invocation and a SHA-256 digest of its canonical inputs.
"""

import hashlib
import json
import os
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Any, Dict, Optional

from core import __version__
from utils.exceptions import SchemaError

# Reproducible builds convention: a fixed timestamp when set
SOURCE_DATE_EPOCH_ENV = 'SOURCE_DATE_EPOCH'

RECORD_TYPES = ('series', 'fit_summary')
REQUIRED_FIELDS = ('record_type', 'timestamp', 'version', 'invocation', 'input_digest', 'payload')


def canonical_json(data: Any) -> str:
    """Key-sorted compact JSON; identical inputs give identical text on every platform."""
    return json.dumps(data, sort_keys=True, separators=(',', ':'), ensure_ascii=True)


def compute_digest(inputs: Any) -> str:
    return hashlib.sha256(canonical_json(inputs).encode('utf-8')).hexdigest()


def current_timestamp() -> str:
    epoch = os.environ.get(SOURCE_DATE_EPOCH_ENV)
    if epoch:
        moment = datetime.fromtimestamp(int(epoch), tz=timezone.utc)
    else:
        moment = datetime.now(timezone.utc)
    return moment.isoformat(timespec='seconds')


@dataclass
class RunRecord:
    record_type: str
    invocation: Dict[str, Any]
    payload: Dict[str, Any]
    input_digest: Optional[str] = None
    timestamp: str = field(default_factory=current_timestamp)
    version: str = __version__

    def __post_init__(self):
        if self.record_type not in RECORD_TYPES:
            raise SchemaError(f"Unknown record type '{self.record_type}'", field='record_type')
        if self.input_digest is None:
            self.input_digest = compute_digest(self.invocation)

    def __repr__(self):
        return f"<RunRecord(type='{self.record_type}', digest='{self.input_digest[:12]}')>"

    def to_dict(self) -> Dict[str, Any]:
        return {
            'record_type': self.record_type,
            'timestamp': self.timestamp,
            'version': self.version,
            'invocation': self.invocation,
            'input_digest': self.input_digest,
            'payload': self.payload,
        }

    def to_json(self) -> str:
        return canonical_json(self.to_dict())

    @classmethod
    def from_dict(cls, data: Dict[str, Any], path: Optional[str] = None) -> 'RunRecord':
        if not isinstance(data, dict):
            raise SchemaError("A record must be a JSON object", field='record', path=path)
        for name in REQUIRED_FIELDS:
            if name not in data:
                raise SchemaError(f"Record lacks '{name}'", field=name, path=path)
        for name in ('invocation', 'payload'):
            if not isinstance(data[name], dict):
                raise SchemaError(f"'{name}' must be an object", field=name, path=path)
        if not isinstance(data['input_digest'], str) or len(data['input_digest']) != 64:
            raise SchemaError("'input_digest' must be a SHA-256 hex digest", field='input_digest', path=path)
        if data['record_type'] not in RECORD_TYPES:
            raise SchemaError(f"Unknown record type '{data['record_type']}'", field='record_type', path=path)
        return cls(
            record_type=data['record_type'],
            invocation=data['invocation'],
            payload=data['payload'],
            input_digest=data['input_digest'],
            timestamp=str(data['timestamp']),
            version=str(data['version']),
        )

    @property
    def content_digest(self) -> str:
        """Digest of the whole record, used to detect duplicates."""
        return compute_digest(self.to_dict())


def require(payload: Dict[str, Any], name: str, path: Optional[str] = None):
    """payload[name], or a SchemaError naming the missing field."""
    if name not in payload:
        raise SchemaError(f"Payload lacks '{name}'", field=name, path=path)
    return payload[name]
