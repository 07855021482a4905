"""
Estimate records on disk: CSV or JSON with identical numeric content
"""
import csv
import json
import logging
from pathlib import Path
from typing import Dict, List, Mapping, Sequence

from src.engine.trials import CSV_COLUMNS

logger = logging.getLogger(__name__)

FLOAT_FORMAT = '%.9e'


def _formatted(value) -> str:
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, int):
        return str(value)
    return FLOAT_FORMAT % float(value)


def _normalized(record: Mapping) -> Dict[str, float]:
    """Column values as they read back from either format"""
    row = {}
    for column in CSV_COLUMNS:
        value = record.get(column, 0.0)
        row[column] = int(value) if column == 'trials' else float(_formatted(value))
    return row


def write_records(records: Sequence[Mapping], path: Path, fmt: str = 'csv') -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    rows = [_normalized(r) for r in records]
    if fmt == 'csv':
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(CSV_COLUMNS)
            for row in rows:
                writer.writerow([_formatted(row[c]) for c in CSV_COLUMNS])
    elif fmt == 'json':
        with open(path, "w") as fh:
            json.dump({'columns': list(CSV_COLUMNS), 'records': rows}, fh, indent=2)
    else:
        raise ValueError(f"unknown format '{fmt}'")
    logger.info(f"Wrote {len(rows)} record(s) to {path}")
    return path


def read_records(path: Path) -> List[Dict[str, float]]:
    """Records from a CSV or JSON file written by write_records"""
    path = Path(path)
    if path.suffix == '.json':
        with open(path, "r") as fh:
            return [_normalized(r) for r in json.load(fh)['records']]
    with open(path, "r", newline="") as fh:
        reader = csv.DictReader(fh)
        missing = set(CSV_COLUMNS) - set(reader.fieldnames or [])
        if missing:
            raise ValueError(f"{path}: missing columns {', '.join(sorted(missing))}")
        return [_normalized({k: (int(v) if k == 'trials' else float(v)) for k, v in row.items()})
                for row in reader]


OVERHEAD_COLUMNS = ['p', 'target', 'scheme', 'level', 'qubits', 'gates']


def write_overhead(rows: Sequence[Mapping], path: Path, fmt: str = 'csv') -> Path:
    """Overhead reports (OverheadReport.to_dict) as a flat table or full JSON"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    if fmt == 'json':
        with open(path, "w") as fh:
            json.dump({'reports': list(rows)}, fh, indent=2)
    elif fmt == 'csv':
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(OVERHEAD_COLUMNS)
            for row in rows:
                target = row.get('details', {}).get('target', 0.0)
                writer.writerow([_formatted(row['p']), _formatted(target), row['scheme'], row['level'],
                                 _formatted(row['qubits']), _formatted(row['gates'])])
    else:
        raise ValueError(f"unknown format '{fmt}'")
    logger.info(f"Wrote {len(rows)} overhead row(s) to {path}")
    return path
