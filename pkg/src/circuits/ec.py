"""
Steane-code stabilizer measurement rounds
"""
from dataclasses import dataclass, field
from typing import Dict, List, Sequence, Tuple

import numpy as np

from src.circuits.circuit import Circuit, Location, hadamard_dual, last_measurements
from src.statevec.gates import GateKind

DATA = tuple(range(7))

# Steane generator indices (table order g1..g6)
G1, G2, G3, G4, G5, G6 = range(6)

# Three-ancilla round: a carries one check of one type, b and c two of the other.
# Entries are (control, target); letters name ancillas, integers data qubits.
_EC1_CNOTS: List[List[Tuple]] = [
    [('a', 'b'), (1, 'c')],
    [('a', 'c'), (3, 'b')],
    [('a', 0), (5, 'b')],
    [('a', 4), (6, 'b'), (5, 'c')],
    [('a', 2), (4, 'b'), (6, 'c')],
    [('a', 6), (2, 'c')],
]
_EC_ANCILLAS = {'a': 7, 'b': 8, 'c': 9}


@dataclass(frozen=True)
class SyndromeRound:
    """A stabilizer-measurement circuit and where its outcomes land"""
    circuit: Circuit
    readout: Dict[int, int]
    flags: Tuple[int, ...] = ()
    keys: Dict[int, str] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, 'keys', last_measurements(self.circuit))

    @property
    def ancillas(self) -> Tuple[int, ...]:
        return tuple(sorted(self.readout))

    def pattern(self, record: Dict[str, int]) -> str:
        """Signs of the check ancillas in qubit order, e.g. '-++'"""
        return ''.join('+' if record[self.keys[q]] == 1 else '-' for q in self.ancillas)

    def nontrivial(self, record: Dict[str, int]) -> bool:
        return any(record[self.keys[q]] == -1 for q in self.ancillas + self.flags)

    def flagged(self, record: Dict[str, int]) -> bool:
        return any(record[self.keys[q]] == -1 for q in self.flags)

    def generator_bits(self, record: Dict[str, int]) -> Dict[int, int]:
        return {g: int(record[self.keys[q]] == -1) for q, g in self.readout.items()}


def syndrome_from_bits(bits: Dict[int, int], order: Sequence[int]) -> np.ndarray:
    """Arrange per-generator bits in syndrome order; missing generators read 0"""
    return np.array([bits.get(g, 0) for g in order], dtype=np.uint8)


def _resolve(q) -> int:
    return _EC_ANCILLAS[q] if isinstance(q, str) else q


def cnot(control: int, target: int) -> Location:
    return Location(GateKind.CNOT, (control, target))


def prep(q: int, kind: GateKind = GateKind.PREP_0) -> Location:
    return Location(kind, (q,))


def meas(q: int, kind: GateKind = GateKind.MEAS_Z) -> Location:
    return Location(kind, (q,))


def ec1() -> SyndromeRound:
    """First half: X-check XIXIXIX on a, Z-checks IIIZZZZ and IZZIIZZ on b and c"""
    circuit = Circuit('ec1', 10, roles={**{q: 'data' for q in DATA}, 7: 'ancilla', 8: 'ancilla', 9: 'ancilla'})
    circuit.step(Location(GateKind.PREP_PLUS, (7,)), Location(GateKind.PREP_0, (8,)), Location(GateKind.PREP_0, (9,)))
    for pairs in _EC1_CNOTS:
        circuit.step(*(Location(GateKind.CNOT, (_resolve(c), _resolve(t))) for c, t in pairs))
    circuit.step(Location(GateKind.MEAS_X, (7,)), Location(GateKind.MEAS_Z, (8,)), Location(GateKind.MEAS_Z, (9,)))
    return SyndromeRound(circuit, {7: G1, 8: G5, 9: G6})


def ec2() -> SyndromeRound:
    """Second half: the Hadamard dual of the first, measuring g4, g2 and g3"""
    return SyndromeRound(hadamard_dual(ec1().circuit, 'ec2'), {7: G4, 8: G2, 9: G3})


def _round_roles(flagged: bool) -> Dict[int, str]:
    roles = {q: 'data' for q in DATA}
    roles.update({7: 'ancilla', 8: 'ancilla', 9: 'ancilla'})
    if flagged:
        roles[10] = 'flag'
    return roles


def z_round(flagged: bool = True) -> SyndromeRound:
    """
    Z-stabilizer measurement.

    The unflagged round lets the g5 ancilla share its partial parity with
    the g6 ancilla. The flagged round keeps the ancillas apart and gives each
    one a window on the |+> flag (qubit 10) from after its first CNOT to
    after its last. Visiting orders keep every flagged Z error on its own
    syndrome up to stabilizers.
    """
    data = list(DATA)
    if not flagged:
        circuit = Circuit('zs', 10, roles=_round_roles(False))
        circuit.step(prep(7), live=data + [7])
        circuit.step(prep(8), cnot(5, 7), live=data + [7, 8])
        circuit.step(prep(9), cnot(6, 7), cnot(1, 8), live=data + [7, 8, 9])
        circuit.step(cnot(7, 8), cnot(0, 9), live=data + [7, 8, 9])
        circuit.step(cnot(3, 7), cnot(2, 8), cnot(4, 9), live=data + [7, 8, 9])
        circuit.step(cnot(4, 7), cnot(2, 9), live=data + [7, 8, 9])
        circuit.step(meas(8), cnot(6, 9), live=data + [7, 8, 9])
        circuit.step(meas(7), meas(9), live=data + [7, 9])
        return SyndromeRound(circuit, {7: G5, 8: G6, 9: G4})

    circuit = Circuit('zs_flag', 11, roles=_round_roles(True))
    anc = [7, 8, 9]
    circuit.step(prep(7), prep(8), prep(9), Location(GateKind.PREP_PLUS, (10,)), live=data + anc + [10])
    circuit.step(cnot(6, 7), cnot(1, 8), cnot(4, 9), live=data + anc + [10])
    circuit.step(cnot(10, 7), live=data + anc + [10])
    circuit.step(cnot(10, 8), cnot(5, 7), live=data + anc + [10])
    circuit.step(cnot(10, 9), cnot(3, 7), cnot(5, 8), live=data + anc + [10])
    circuit.step(cnot(0, 9), cnot(4, 7), cnot(2, 8), live=data + anc + [10])
    circuit.step(cnot(10, 7), cnot(2, 9), cnot(6, 8), live=data + anc + [10])
    circuit.step(cnot(10, 8), cnot(6, 9), meas(7), live=data + anc + [10])
    circuit.step(cnot(10, 9), meas(8), live=data + [8, 9, 10])
    circuit.step(meas(9), Location(GateKind.MEAS_X, (10,)), live=data + [9, 10])
    return SyndromeRound(circuit, {7: G5, 8: G6, 9: G4}, flags=(10,))


def x_round(flagged: bool = True) -> SyndromeRound:
    """Hadamard dual of z_round, measuring the X stabilizers"""
    base = z_round(flagged)
    name = 'xs_flag' if flagged else 'xs'
    return SyndromeRound(hadamard_dual(base.circuit, name), {7: G2, 8: G3, 9: G1}, flags=base.flags)
