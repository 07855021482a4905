"""
Verification reports
"""
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Sequence, Tuple

from src.pauli.noise import FaultEvent

WEIGHT = 1
DECODING = 2


def describe_faults(faults: Sequence[FaultEvent]) -> Tuple[str, ...]:
    return tuple(f.describe() for f in faults)


@dataclass
class Violation:
    """One fault set breaking a checked property"""
    faults: Tuple[str, ...]
    error: str
    record: str
    criterion: int
    detail: str = ''

    def to_dict(self) -> Dict:
        return {
            'faults': list(self.faults),
            'error': self.error,
            'record': self.record,
            'criterion': self.criterion,
            'detail': self.detail,
        }


@dataclass
class FtReport:
    """Result of an exhaustive (or budget-subsampled) fault enumeration"""
    target: str
    checked_fault_sets: int = 0
    violations: List[Violation] = field(default_factory=list)
    notes: List[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations

    def merge(self, other: 'FtReport') -> 'FtReport':
        return FtReport(
            target=self.target,
            checked_fault_sets=self.checked_fault_sets + other.checked_fault_sets,
            violations=self.violations + other.violations,
            notes=self.notes + other.notes,
        )

    def to_dict(self) -> Dict:
        return {
            'target': self.target,
            'passed': self.passed,
            'checked_fault_sets': self.checked_fault_sets,
            'violations': [v.to_dict() for v in self.violations],
            'notes': list(self.notes),
        }

    def save(self, path: Path) -> None:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=2)
