"""
Controlled-Hadamard ordering search: which gate orders keep every flagged
single-fault error distinguishable from the full syndrome and the flags
"""
import logging
from dataclasses import dataclass
from itertools import permutations
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

from src.circuits.gadgets import HadamardMeasurement
from src.circuits.support import controlled_h_positions, single_spreads
from src.codes.stabilizer import StabilizerCode, steane, syndrome, syndrome_string
from src.pauli.paulistring import PauliString

logger = logging.getLogger(__name__)

Template = Callable[[Sequence[int]], HadamardMeasurement]


@dataclass(frozen=True)
class Collision:
    """Two flagged errors with one syndrome and flag pattern that differ by a logical operator"""
    key: Tuple[str, str]
    first: PauliString
    second: PauliString
    first_source: str
    second_source: str

    def describe(self) -> str:
        return (f"{self.first_source} -> {self.first.to_label()} and {self.second_source} -> "
                f"{self.second.to_label()} share syndrome {self.key[0]} with flags '{self.key[1]}'")


def find_collision(hm: HadamardMeasurement, code: StabilizerCode,
                   exclude: Optional[int] = None) -> Optional[Collision]:
    """
    First pair of indistinguishable flagged errors, or None.

    exclude is the 0-based index of a controlled-Hadamard whose own gates
    are left out of the enumeration.
    """
    skip = controlled_h_positions(hm, exclude) if exclude is not None else ()
    seen: Dict[Tuple[str, str], Tuple[PauliString, str]] = {}
    for fault, error in single_spreads(hm, skip):
        if not error.fired:
            continue
        flags = ','.join(sorted(error.fired))
        for branch in error.branches():
            key = (syndrome_string(syndrome(code, branch)), flags)
            if key not in seen:
                seen[key] = (branch, fault.describe())
                continue
            other, source = seen[key]
            if not code.in_stabilizer_group(other * branch):
                return Collision(key, other, branch, source, fault.describe())
    return None


def distinguishability_search(template: Template, orderings: Optional[Iterable[Sequence[int]]] = None,
                              exclude: Optional[int] = None,
                              code: Optional[StabilizerCode] = None) -> List[Tuple[int, ...]]:
    """Orderings (all permutations by default) whose flagged single faults are all distinguishable"""
    code = code or steane()
    if orderings is None:
        orderings = permutations(range(code.n))
    passing = []
    checked = 0
    for order in orderings:
        order = tuple(order)
        checked += 1
        collision = find_collision(template(order), code, exclude)
        if collision is None:
            passing.append(order)
            logger.debug(f"order {order}: distinguishable")
        else:
            logger.debug(f"order {order}: {collision.describe()}")
    logger.info(f"{len(passing)} of {checked} orderings pass"
                + (f" with controlled-Hadamard {exclude + 1} excluded" if exclude is not None else ""))
    return passing
