# storage/artifact_store.py
"""
Artifact persistence: JSON-lines record files and plot-ready CSV tables
"""
import csv
import json
import logging
import os
from typing import Iterable, List, Sequence

from storage.models import RunRecord
from utils.exceptions import SchemaError

logger = logging.getLogger(__name__)

SERIES_COLUMNS = ('scenario', 'seed', 'n', 'mixed_sum', 'norm', 'weak_product', 'ratio')
FIT_COLUMNS = ('scenario', 'seed', 'slope', 'intercept', 'residual_rms', 'n_used', 'verdict')


def format_float(value) -> str:
    """17 significant digits, '.' decimal separator, independent of locale."""
    return format(float(value), '.17g')


class ArtifactStore:
    """Writes and reads run artifacts under the configured output directory"""

    def __init__(self, config=None, output_dir=None):
        """
        Initialize artifact store

        Args:
            config: Configuration object with an [output] section
            output_dir: Explicit directory, wins over the config
        """
        self.config = config
        self.output_dir = output_dir or self._get_output_dir()

    def _get_output_dir(self) -> str:
        """Get output directory from config or use default"""
        if self.config:
            return self.config.get('output', 'directory', 'artifacts')
        return 'artifacts'

    def _ensure_directory(self):
        """Ensure output directory exists"""
        os.makedirs(self.output_dir, exist_ok=True)

    def path_for(self, name: str, suffix: str) -> str:
        return os.path.join(self.output_dir, f"{name}{suffix}")

    def write_records(self, name: str, records: Iterable[RunRecord]) -> str:
        """One canonical JSON record per line."""
        self._ensure_directory()
        path = self.path_for(name, '.jsonl')
        with open(path, 'w', encoding='utf-8', newline='\n') as f:
            for record in records:
                f.write(record.to_json())
                f.write('\n')
        logger.info(f"Wrote records to {path}")
        return path

    @staticmethod
    def read_records(path: str) -> List[RunRecord]:
        """Parse a JSON-lines artifact; malformed lines raise SchemaError with the line number."""
        if not os.path.exists(path):
            raise SchemaError(f"Artifact not found: {path}", field='path', path=path)
        records = []
        with open(path, 'r', encoding='utf-8') as f:
            for line_number, line in enumerate(f, start=1):
                if not line.strip():
                    continue
                try:
                    data = json.loads(line)
                except json.JSONDecodeError as e:
                    raise SchemaError(f"{path}:{line_number}: not valid JSON ({e.msg})",
                                      field='line', path=path)
                records.append(RunRecord.from_dict(data, path=f"{path}:{line_number}"))
        return records

    def write_series_csv(self, name: str, series_list: Sequence) -> str:
        self._ensure_directory()
        path = self.path_for(name, '_series.csv')
        with open(path, 'w', encoding='utf-8', newline='') as f:
            writer = csv.writer(f, lineterminator='\n')
            writer.writerow(SERIES_COLUMNS)
            for series in series_list:
                for point in series.points:
                    writer.writerow([
                        series.scenario, series.seed, point.n,
                        format_float(point.mixed_sum), format_float(point.norm),
                        format_float(point.weak_product), format_float(point.ratio),
                    ])
        logger.info(f"Wrote series table to {path}")
        return path

    def write_fits_csv(self, name: str, rows: Sequence[dict]) -> str:
        """Rows carry scenario, seed ('median' for the summary), the fit and a verdict."""
        self._ensure_directory()
        path = self.path_for(name, '_fits.csv')
        with open(path, 'w', encoding='utf-8', newline='') as f:
            writer = csv.writer(f, lineterminator='\n')
            writer.writerow(FIT_COLUMNS)
            for row in rows:
                writer.writerow([
                    row['scenario'], row['seed'],
                    format_float(row['slope']), format_float(row['intercept']),
                    format_float(row['residual_rms']), row['n_used'], row.get('verdict', ''),
                ])
        logger.info(f"Wrote fit table to {path}")
        return path

    @staticmethod
    def read_csv(path: str) -> List[dict]:
        with open(path, 'r', encoding='utf-8', newline='') as f:
            return list(csv.DictReader(f))
