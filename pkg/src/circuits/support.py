"""
Fault spreading through flagged Hadamard measurements.

The controlled-Hadamards are not Clifford, so a fault is tracked as a Pauli
frame plus two qubit sets: qubits that picked up a Hadamard from an X on the
control, and qubits whose error was rotated by a T or T^dagger into an
unknown Pauli. Flag outcomes stay exact since only the control's X part
reaches the flags.
"""
from dataclasses import dataclass
from itertools import product
from typing import FrozenSet, Iterable, Iterator, List, Optional, Set, Tuple

import numpy as np

from src.circuits.circuit import condition_met, outcome_key
from src.circuits.frame import flips, propagate
from src.circuits.gadgets import HadamardMeasurement
from src.pauli.noise import FaultEvent, location_faults
from src.pauli.paulistring import PauliString
from src.statevec.gates import GateKind

_ROTATIONS = (GateKind.T, GateKind.T_DAG)


@dataclass(frozen=True)
class SpreadError:
    """
    Data error left by a set of faults, in data-register positions.

    pauli is the definite part; hadamards carries H letters (each X or Z)
    and arbitrary carries letters that may be any of I, X, Y, Z.
    """
    pauli: PauliString
    hadamards: FrozenSet[int]
    arbitrary: FrozenSet[int]
    fired: FrozenSet[str]
    outcome_flipped: bool = False

    @property
    def num_qubits(self) -> int:
        return self.pauli.num_qubits

    def hadamard_set(self) -> FrozenSet[int]:
        """H on a set equals H on its complement after the transversal Hadamard"""
        complement = frozenset(range(self.num_qubits)) - self.hadamards
        return self.hadamards if len(self.hadamards) <= len(complement) else complement

    def weight(self) -> int:
        """Size of the smallest support any branch can occupy a subset of"""
        base = set(self.pauli.support()) | self.arbitrary
        complement = frozenset(range(self.num_qubits)) - self.hadamards
        return min(len(base | self.hadamards), len(base | complement))

    def is_pauli(self) -> bool:
        return not self.hadamard_set() and not self.arbitrary

    def toggled(self, qubits: Iterable[int]) -> 'SpreadError':
        """Apply a Hadamard correction on the given positions"""
        return SpreadError(self.pauli, self.hadamards ^ frozenset(qubits), self.arbitrary,
                           self.fired, self.outcome_flipped)

    def combine(self, other: 'SpreadError') -> 'SpreadError':
        """Union of two independent spreads; covers every branch of the joint spread"""
        return SpreadError((self.pauli * other.pauli).unsigned(),
                           self.hadamards ^ other.hadamards,
                           self.arbitrary | other.arbitrary,
                           self.fired ^ other.fired,
                           self.outcome_flipped != other.outcome_flipped)

    def branches(self) -> Iterator[PauliString]:
        n = self.num_qubits
        spread_qubits = sorted(self.hadamard_set() - self.arbitrary)
        free = sorted(self.arbitrary)
        for h_letters in product('XZ', repeat=len(spread_qubits)):
            for a_letters in product('IXYZ', repeat=len(free)):
                letters = {**dict(zip(spread_qubits, h_letters)), **dict(zip(free, a_letters))}
                yield (self.pauli * PauliString.on_qubits(n, letters)).unsigned()

    def describe(self) -> str:
        parts = [self.pauli.to_label()]
        if self.hadamard_set():
            parts.append(f"H{sorted(self.hadamard_set())}")
        if self.arbitrary:
            parts.append(f"?{sorted(self.arbitrary)}")
        if self.fired:
            parts.append(f"flags={','.join(sorted(self.fired))}")
        return ' '.join(parts)


def _scramble(x: np.ndarray, z: np.ndarray, arbitrary: Set[int], q: int) -> None:
    # Y commutes with the rotation
    if x[q] != z[q]:
        arbitrary.add(q)
        x[q] = z[q] = False


def _advance(x: np.ndarray, z: np.ndarray, hadamards: Set[int], arbitrary: Set[int],
             kind: GateKind, qubits: Tuple[int, ...], control: int) -> None:
    if kind in _ROTATIONS:
        _scramble(x, z, arbitrary, qubits[0])
        return
    if kind is GateKind.CH:
        c, t = qubits
        if x[t] and z[t]:
            z[c] ^= True
        else:
            _scramble(x, z, arbitrary, t)
        if x[c]:
            hadamards.symmetric_difference_update({t})
        return
    if kind is GateKind.CZ and control in qubits:
        t = qubits[1] if qubits[0] == control else qubits[0]
        z[control] ^= x[t]
        # The Z kick onto the target becomes an H once the trailing T acts
        if x[control]:
            hadamards.symmetric_difference_update({t})
        return
    if kind.is_prep:
        hadamards.discard(qubits[0])
        arbitrary.discard(qubits[0])
    propagate(x, z, kind, qubits)


def spread(hm: HadamardMeasurement, faults: Iterable[FaultEvent] = (),
           initial: Optional[PauliString] = None) -> SpreadError:
    """Push faults (and an optional whole-circuit input error) through a Hadamard measurement"""
    circuit = hm.circuit
    n = circuit.num_qubits
    x = np.zeros(n, dtype=bool) if initial is None else initial.x_bits.copy()
    z = np.zeros(n, dtype=bool) if initial is None else initial.z_bits.copy()
    hadamards: Set[int] = set()
    arbitrary: Set[int] = set()
    by_position = {f.location.position: f for f in faults}
    record = {}

    for t, slot, loc in circuit.locations():
        fault = by_position.get((t, slot))
        if loc.kind.is_measurement:
            flipped = flips(x, z, loc.kind, loc.qubits[0])
            if fault is not None and fault.is_flip:
                flipped = not flipped
            record[outcome_key(t, loc.qubits[0])] = -1 if flipped else +1
            continue
        kind = loc.kind if condition_met(loc.cond, record) else GateKind.IDLE
        _advance(x, z, hadamards, arbitrary, kind, loc.qubits, hm.control)
        if fault is not None and not fault.is_flip:
            for i, q in enumerate(loc.qubits):
                x[q] ^= fault.effect.x_bits[i]
                z[q] ^= fault.effect.z_bits[i]

    position = {q: i for i, q in enumerate(hm.data)}
    return SpreadError(
        pauli=PauliString(x, z).restrict(hm.data),
        hadamards=frozenset(position[q] for q in hadamards if q in position),
        arbitrary=frozenset(position[q] for q in arbitrary if q in position),
        fired=hm.fired(record),
        outcome_flipped=hm.outcome(record) == -1,
    )


def controlled_h_positions(hm: HadamardMeasurement, index: int) -> FrozenSet[Tuple[int, int]]:
    """(timestep, slot) of every gate making up the index-th (0-based) controlled-Hadamard"""
    target = hm.order[index]
    positions = set()
    cz_step = None
    for t, slot, loc in hm.circuit.locations():
        if loc.kind in (GateKind.CZ, GateKind.CH) and loc.qubits == (hm.control, target):
            positions.add((t, slot))
            cz_step = t
    if cz_step is None:
        raise ValueError(f"no controlled-Hadamard on qubit {target} in {hm.circuit.name}")
    for t, slot, loc in hm.circuit.locations():
        if loc.kind in _ROTATIONS and loc.qubits == (target,) and abs(t - cz_step) == 1:
            positions.add((t, slot))
    return frozenset(positions)


def single_spreads(hm: HadamardMeasurement,
                   exclude: Iterable[Tuple[int, int]] = ()) -> List[Tuple[FaultEvent, SpreadError]]:
    """Every single fault of the measurement with its spread"""
    skip = set(exclude)
    spreads = []
    for location in hm.circuit.fault_locations():
        if location.position in skip:
            continue
        for fault in location_faults(location):
            spreads.append((fault, spread(hm, [fault])))
    return spreads
