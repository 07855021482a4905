"""
Magic-state gadgets: T gates from resource states, H-state encoding and
flagged measurements of the transversal Hadamard
"""
from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Sequence, Tuple

from src.circuits.circuit import Circuit, Location, cond_on, outcome_key
from src.circuits.ec import cnot, meas, prep
from src.statevec.gates import GateKind

STEANE_DATA = tuple(range(7))

# C_H order used by the detection scheme
DETECT_ORDER = (0, 1, 2, 3, 4, 5, 6)

# C_H order of the correction scheme. The first three targets are not a
# logical support and the last three are; with the fourth gate left out every
# single fault is distinguishable from syndrome and flags.
CORRECT_ORDER = (0, 4, 1, 3, 6, 5, 2)

# Flag couplings of the [[17,1,5]] measurement: after C_H number g
COLOR17_FLAG_GAPS: Dict[int, Tuple[str, ...]] = {
    1: ('f0', 'f1'),
    3: ('f2',),
    5: ('f0',),
    7: ('f3',),
    9: ('f1',),
    11: ('f0',),
    13: ('f2',),
    15: ('f1',),
    17: ('f0', 'f1', 'f3'),
}


def t_gadget(sign: int = +1) -> Circuit:
    """
    T (sign=+1) or T^dagger (sign=-1) on qubit 0 consuming an |H> on qubit 1.

    C_Y from the resource, Y measurement of the resource, then a Y(pi/2)
    fix-up when the outcome produced the opposite rotation.
    """
    if sign not in (+1, -1):
        raise ValueError("sign must be +1 or -1")
    circuit = Circuit('t_gadget' if sign > 0 else 't_dag_gadget', 2, roles={0: 'data', 1: 'resource'})
    circuit.step(prep(1, GateKind.PREP_H))
    circuit.step(Location(GateKind.CY, (1, 0)))
    t = circuit.step(meas(1, GateKind.MEAS_Y))
    if sign > 0:
        circuit.step(Location(GateKind.Y_HALF, (0,), cond=cond_on(t, 1, -1)), live=[0])
    else:
        circuit.step(Location(GateKind.Y_HALF_DAG, (0,), cond=cond_on(t, 1, +1)), live=[0])
    return circuit


def h_prep_nonft() -> Circuit:
    """Encode an |H> prepared on qubit 2 into the Steane code"""
    circuit = Circuit('h_prep_nonft', 7, roles={q: 'data' for q in STEANE_DATA})
    circuit.step(*(prep(q, GateKind.PREP_PLUS) for q in (0, 1, 3)),
                 prep(2, GateKind.PREP_H),
                 *(prep(q) for q in (4, 5, 6)))
    circuit.step(cnot(2, 4), cnot(1, 5), cnot(3, 6))
    circuit.step(cnot(2, 5), cnot(0, 6), cnot(3, 4))
    circuit.step(cnot(0, 2), cnot(3, 5), cnot(1, 6))
    circuit.step(cnot(0, 4), cnot(1, 2))
    return circuit


@dataclass(frozen=True)
class HadamardMeasurement:
    """A flagged measurement of the transversal Hadamard and its readout keys"""
    circuit: Circuit
    control: int
    data: Tuple[int, ...]
    order: Tuple[int, ...]
    flags: Dict[str, str] = field(default_factory=dict)

    @property
    def control_key(self) -> str:
        keys = [outcome_key(t, loc.qubits[0]) for t, _, loc in self.circuit.locations()
                if loc.kind.is_measurement and loc.qubits[0] == self.control]
        return keys[-1]

    def outcome(self, record: Dict[str, int]) -> int:
        return record[self.control_key]

    def fired(self, record: Dict[str, int]) -> FrozenSet[str]:
        return frozenset(name for name, key in self.flags.items() if record[key] == -1)

    def accepted(self, record: Dict[str, int]) -> bool:
        """Detection-style acceptance: +1 outcome and no flag"""
        return self.outcome(record) == +1 and not self.fired(record)


def _controlled_h(circuit: Circuit, control: int, target: int) -> None:
    circuit.step(Location(GateKind.T_DAG, (target,)))
    circuit.step(Location(GateKind.CZ, (control, target)))
    circuit.step(Location(GateKind.T, (target,)))


def hmeas_detect(order: Sequence[int] = DETECT_ORDER) -> HadamardMeasurement:
    """
    One flag window around all seven C_H gates (9 qubits).

    The flag is prepared one step before the ancilla and read one step
    after it; data qubits idle only while the ancilla is live. That gives
    191 idle locations.
    """
    a, f = 7, 8
    circuit = Circuit('hmeas_f1', 9, roles={**{q: 'data' for q in STEANE_DATA}, a: 'ancilla', f: 'flag'})
    circuit.step(prep(f), live=[f])
    circuit.step(prep(a, GateKind.PREP_PLUS))
    circuit.step(cnot(a, f))
    for target in order:
        _controlled_h(circuit, a, target)
    circuit.step(cnot(a, f))
    circuit.step(meas(a, GateKind.MEAS_X))
    t = circuit.step(meas(f), live=[f])
    return HadamardMeasurement(circuit, a, STEANE_DATA, tuple(order), {'f0': outcome_key(t, f)})


def hmeas_correct(order: Sequence[int] = CORRECT_ORDER) -> HadamardMeasurement:
    """
    Four-flag measurement for the correction scheme (11 qubits).

    f0 spans every C_H; f1 covers the third gate, f2 the fourth and fifth,
    f3 the fourth alone. f1 and f3 share qubit 10.
    """
    a, f0, f2, f13 = 7, 8, 9, 10
    order = tuple(order)
    roles = {**{q: 'data' for q in STEANE_DATA}, a: 'ancilla', f0: 'flag', f2: 'flag', f13: 'flag'}
    circuit = Circuit('hmeas_f2', 11, roles=roles)
    circuit.step(prep(a, GateKind.PREP_PLUS), prep(f0), prep(f2), prep(f13))
    circuit.step(cnot(a, f0))
    _controlled_h(circuit, a, order[0])
    _controlled_h(circuit, a, order[1])
    circuit.step(cnot(a, f13))
    _controlled_h(circuit, a, order[2])
    circuit.step(cnot(a, f2))
    circuit.step(cnot(a, f13))
    t1 = circuit.step(meas(f13))
    circuit.step(prep(f13))
    circuit.step(cnot(a, f13))
    _controlled_h(circuit, a, order[3])
    circuit.step(cnot(a, f13))
    _controlled_h(circuit, a, order[4])
    circuit.step(cnot(a, f2))
    _controlled_h(circuit, a, order[5])
    _controlled_h(circuit, a, order[6])
    circuit.step(cnot(a, f0))
    t = circuit.step(meas(a, GateKind.MEAS_X), meas(f0), meas(f2), meas(f13))
    flags = {
        'f0': outcome_key(t, f0),
        'f1': outcome_key(t1, f13),
        'f2': outcome_key(t, f2),
        'f3': outcome_key(t, f13),
    }
    return HadamardMeasurement(circuit, a, STEANE_DATA, order, flags)


def hmeas_with_T(order: Sequence[int] = DETECT_ORDER) -> HadamardMeasurement:
    """
    The detection measurement with every T and T^dagger taken from |H>
    resources (qubits 9 and 10).

    Layer k applies T^dagger to target k and T to target k-1; the CZ of
    target k-1 runs alongside the resource preparation. Only the first and
    last layers consume a single resource.
    """
    a, f = 7, 8
    resources = (9, 10)
    order = tuple(order)
    roles = {**{q: 'data' for q in STEANE_DATA}, a: 'ancilla', f: 'flag', 9: 'resource', 10: 'resource'}
    circuit = Circuit('hmeas_f1_T', 11, roles=roles)
    circuit.step(prep(a, GateKind.PREP_PLUS), prep(f))

    n = len(order)
    for k in range(n + 1):
        rotations: List[Tuple[int, int]] = []
        if k < n:
            rotations.append((order[k], -1))
        if k >= 1:
            rotations.append((order[k - 1], +1))
        before = [cnot(a, f)] if k == 0 else [Location(GateKind.CZ, (a, order[k - 1]))]
        during = [cnot(a, f)] if k == n else []
        _rotation_layer(circuit, rotations, resources, before, during)

    t = circuit.step(meas(a, GateKind.MEAS_X), meas(f))
    return HadamardMeasurement(circuit, a, STEANE_DATA, order, {'f0': outcome_key(t, f)})


def _rotation_layer(circuit: Circuit, rotations: Sequence[Tuple[int, int]], resources: Sequence[int],
                    before: Sequence[Location] = (), during: Sequence[Location] = ()) -> None:
    """
    T-gadget sub-steps for up to two rotations. before rides on the resource
    preparation and during on the C_Y step.
    """
    pairs = list(zip(rotations, resources))
    circuit.step(*(prep(r, GateKind.PREP_H) for _, r in pairs), *before)
    circuit.step(*(Location(GateKind.CY, (r, q)) for (q, _), r in pairs), *during)
    t = circuit.step(*(meas(r, GateKind.MEAS_Y) for _, r in pairs))
    fixes = []
    for (q, sign), r in pairs:
        if sign > 0:
            fixes.append(Location(GateKind.Y_HALF, (q,), cond=cond_on(t, r, -1)))
        else:
            fixes.append(Location(GateKind.Y_HALF_DAG, (q,), cond=cond_on(t, r, +1)))
    circuit.step(*fixes)


def resource_schedule(*circuits: Circuit) -> Dict[int, int]:
    """How many timesteps consume one, two, ... |H> resources, over every circuit given"""
    per_step = [sum(1 for loc in layer if loc.kind is GateKind.PREP_H)
                for circuit in circuits for layer in circuit.timesteps]
    return dict(Counter(n for n in per_step if n))


def color17_hmeas_2flag() -> HadamardMeasurement:
    """Transversal-H measurement of the 17-qubit color code with four flags"""
    n = 17
    a = n
    names = ('f0', 'f1', 'f2', 'f3')
    flag_qubits = {name: n + 1 + i for i, name in enumerate(names)}
    roles = {**{q: 'data' for q in range(n)}, a: 'ancilla', **{q: 'flag' for q in flag_qubits.values()}}
    circuit = Circuit('color17_hmeas', n + 5, roles=roles)
    circuit.step(prep(a, GateKind.PREP_PLUS), *(prep(q) for q in flag_qubits.values()))
    for g, target in enumerate(range(n), start=1):
        circuit.step(Location(GateKind.CH, (a, target)))
        for name in COLOR17_FLAG_GAPS.get(g, ()):
            circuit.step(cnot(a, flag_qubits[name]))
    t = circuit.step(meas(a, GateKind.MEAS_X), *(meas(q) for q in flag_qubits.values()))
    flags = {name: outcome_key(t, q) for name, q in flag_qubits.items()}
    return HadamardMeasurement(circuit, a, tuple(range(n)), tuple(range(n)), flags)
