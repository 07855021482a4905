"""
Flag-aware correction tables built from single-fault propagation
"""
import logging
from typing import Callable, FrozenSet, Iterable, Optional, Sequence

from src.circuits.ec import SyndromeRound
from src.circuits.frame import run_frame
from src.circuits.gadgets import HadamardMeasurement
from src.circuits.support import single_spreads
from src.codes.decoder import FULL, SyndromeTable
from src.codes.stabilizer import StabilizerCode, syndrome
from src.errors import IndistinguishableFaultsError
from src.pauli.noise import location_faults
from src.pauli.paulistring import PauliString

logger = logging.getLogger(__name__)

Part = Callable[[PauliString], PauliString]


def _whole(error: PauliString) -> PauliString:
    return error


def _input_errors(n: int) -> Iterable[PauliString]:
    for q in range(n):
        for letter in 'XYZ':
            yield PauliString.single(n, q, letter)


def build_flag_table(rnd: SyndromeRound, code: StabilizerCode, label: str = '',
                     data: Optional[Sequence[int]] = None, part: Part = _whole,
                     include_inputs: bool = True, flags_only: bool = False) -> SyndromeTable:
    """
    Correction for every single fault (and single-qubit input error) that
    makes the round report something.

    Keys are (syndrome of the resulting data error, label + outcome pattern);
    with flags_only the pattern is the flag outcome alone and only flagged
    events are kept. Two logically different errors under one key raise
    IndistinguishableFaultsError.
    """
    data = list(data) if data is not None else list(range(code.n))
    n_total = rnd.circuit.num_qubits
    table = SyndromeTable(mode=FULL, n=code.n)

    events = []
    if include_inputs:
        for err in _input_errors(code.n):
            events.append((f"input {err.to_label()}", (), err.embed(n_total, data)))
    for loc in rnd.circuit.fault_locations():
        for fault in location_faults(loc):
            events.append((fault.describe(), (fault,), None))

    for source, faults, initial in events:
        frame, record = run_frame(rnd.circuit, faults, initial)
        if flags_only:
            if not rnd.flagged(record):
                continue
            flags = label + 'flag'
        else:
            if not rnd.nontrivial(record):
                continue
            flags = label + rnd.pattern(record)
        error = part(frame.restrict(data))
        bits = syndrome(code, error)
        key = (''.join(str(int(b)) for b in bits), flags)
        if key in table:
            existing = table.entries[key]
            if not code.in_stabilizer_group(existing * error):
                raise IndistinguishableFaultsError(
                    f"{rnd.circuit.name}: {table.sources.get(key, '?')} and {source} share syndrome "
                    f"{key[0]} with flags '{flags}' but differ by a logical operator",
                    first=existing, second=error,
                )
            if error.weight() >= existing.weight():
                continue
        table.add(bits, error.unsigned(), flags=flags, source=source)

    logger.debug(f"{rnd.circuit.name}: flag table with {len(table)} entries")
    return table


def _flag_pattern(fired: Iterable[str]) -> str:
    return ','.join(sorted(fired))


def build_hadamard_flag_table(hm: HadamardMeasurement, code: StabilizerCode,
                              fix: Callable[[FrozenSet[str]], Sequence[int]] = lambda fired: ()) -> SyndromeTable:
    """
    Correction for every flagged single fault of a Hadamard measurement.

    fix(fired) names the data positions that receive a Hadamard before the
    syndrome is taken; each remaining Hadamard or unknown letter is expanded
    into its Pauli branches. Keys are (full syndrome, sorted flag names).
    """
    table = SyndromeTable(mode=FULL, n=code.n)
    for fault, spread_error in single_spreads(hm):
        if not spread_error.fired:
            continue
        flags = _flag_pattern(spread_error.fired)
        fixed = spread_error.toggled(fix(spread_error.fired))
        for error in fixed.branches():
            bits = syndrome(code, error)
            key = (''.join(str(int(b)) for b in bits), flags)
            if key in table:
                existing = table.entries[key]
                if not code.in_stabilizer_group(existing * error):
                    raise IndistinguishableFaultsError(
                        f"{hm.circuit.name}: {table.sources.get(key, '?')} and {fault.describe()} share "
                        f"syndrome {key[0]} with flags '{flags}' but differ by a logical operator",
                        first=existing, second=error,
                    )
                if error.weight() >= existing.weight():
                    continue
            table.add(bits, error, flags=flags, source=fault.describe())

    logger.debug(f"{hm.circuit.name}: Hadamard flag table with {len(table)} entries")
    return table
