"""
Pauli-frame propagation through Clifford locations
"""
from typing import Dict, Iterable, Optional, Tuple

import numpy as np

from src.circuits.circuit import Circuit, condition_met, outcome_key
from src.errors import GateArityError
from src.pauli.noise import FaultEvent
from src.pauli.paulistring import PauliString
from src.statevec.gates import GateKind

_SWAP_XZ = {GateKind.H, GateKind.Y_HALF, GateKind.Y_HALF_DAG}
_PHASE = {GateKind.Z_HALF, GateKind.Z_HALF_DAG}
_PAULIS = {GateKind.X, GateKind.Y, GateKind.Z, GateKind.IDLE}


def propagate(x: np.ndarray, z: np.ndarray, kind: GateKind, qubits: Tuple[int, ...]) -> None:
    """Conjugate an unsigned frame in place by one Clifford location"""
    if kind in _PAULIS or kind.is_measurement:
        return
    if kind.is_prep:
        q = qubits[0]
        x[q] = z[q] = False
        return
    if kind in _SWAP_XZ:
        q = qubits[0]
        x[q], z[q] = z[q], x[q]
        return
    if kind in _PHASE:
        q = qubits[0]
        z[q] ^= x[q]
        return
    if kind is GateKind.CNOT:
        c, t = qubits
        x[t] ^= x[c]
        z[c] ^= z[t]
        return
    if kind is GateKind.CZ:
        a, b = qubits
        z[a] ^= x[b]
        z[b] ^= x[a]
        return
    if kind is GateKind.CY:
        c, t = qubits
        z[c] ^= x[t] ^ z[t]
        x[t] ^= x[c]
        z[t] ^= x[c]
        return
    raise GateArityError(f"{kind.name} is not a Clifford location")


def flips(x: np.ndarray, z: np.ndarray, kind: GateKind, qubit: int) -> bool:
    """True when the frame anticommutes with the measured observable"""
    basis = kind.basis
    if basis == 'X':
        return bool(z[qubit])
    if basis == 'Z':
        return bool(x[qubit])
    return bool(x[qubit] ^ z[qubit])


def run_frame(circuit: Circuit, faults: Iterable[FaultEvent] = (),
              initial: Optional[PauliString] = None) -> Tuple[PauliString, Dict[str, int]]:
    """
    Push faults (and an optional input error) through the circuit.

    Returns the final frame and the outcome flip of every measurement
    (+1 unchanged, -1 flipped).
    """
    n = circuit.num_qubits
    x = np.zeros(n, dtype=bool) if initial is None else initial.x_bits.copy()
    z = np.zeros(n, dtype=bool) if initial is None else initial.z_bits.copy()
    by_position: Dict[Tuple[int, int], FaultEvent] = {f.location.position: f for f in faults}
    record: Dict[str, int] = {}

    for t, slot, loc in circuit.locations():
        if loc.kind.is_measurement:
            flipped = flips(x, z, loc.kind, loc.qubits[0])
            fault = by_position.get((t, slot))
            if fault is not None and fault.is_flip:
                flipped = not flipped
            record[outcome_key(t, loc.qubits[0])] = -1 if flipped else +1
            continue
        kind = loc.kind if condition_met(loc.cond, record) else GateKind.IDLE
        propagate(x, z, kind, loc.qubits)
        fault = by_position.get((t, slot))
        if fault is not None and not fault.is_flip:
            for letter_index, q in enumerate(loc.qubits):
                x[q] ^= fault.effect.x_bits[letter_index]
                z[q] ^= fault.effect.z_bits[letter_index]
    return PauliString(x, z), record
