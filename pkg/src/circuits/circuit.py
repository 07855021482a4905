"""
Timestep-ordered circuits with explicit idle locations
"""
from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

from src.errors import CircuitFormatError, QubitIndexError
from src.pauli.noise import FaultLocation
from src.statevec.gates import GateKind

_KINDS = {kind.value: kind for kind in GateKind}

# Bumped whenever the text layout changes
TEXT_FORMAT_VERSION = 1


def outcome_key(timestep: int, qubit: int) -> str:
    """Record key of the measurement on qubit at timestep"""
    return f"m{timestep}.{qubit}"


@dataclass(frozen=True)
class Location:
    """
    One operation in one timestep.

    cond names a measurement of the same circuit: the location acts only
    when that outcome was -1 (or +1 when the key starts with "!") and is
    an idle otherwise.
    """
    kind: GateKind
    qubits: Tuple[int, ...]
    cond: Optional[str] = None
    tag: str = ''

    def __post_init__(self):
        if len(self.qubits) != self.kind.arity:
            raise QubitIndexError(f"{self.kind.name} acts on {self.kind.arity} qubit(s), got {self.qubits}")
        if len(set(self.qubits)) != len(self.qubits):
            raise QubitIndexError(f"{self.kind.name} repeats a qubit: {self.qubits}")

    def to_text(self) -> str:
        parts = [self.kind.value, ','.join(str(q) for q in self.qubits)]
        if self.cond:
            parts.append(f"cond={self.cond}")
        if self.tag:
            parts.append(f"tag={self.tag}")
        return ' '.join(parts)

    @classmethod
    def from_text(cls, line: str) -> 'Location':
        fields = line.split()
        if len(fields) < 2 or fields[0] not in _KINDS:
            raise CircuitFormatError(f"cannot parse location '{line}'")
        try:
            qubits = tuple(int(q) for q in fields[1].split(','))
        except ValueError as exc:
            raise CircuitFormatError(f"bad qubit list in '{line}'") from exc
        options = {}
        for extra in fields[2:]:
            key, sep, value = extra.partition('=')
            if not sep or key not in ('cond', 'tag'):
                raise CircuitFormatError(f"unknown attribute '{extra}' in '{line}'")
            options[key] = value
        return cls(_KINDS[fields[0]], qubits, options.get('cond'), options.get('tag', ''))


@dataclass
class Circuit:
    """Parallel layers of locations on num_qubits qubits"""
    name: str
    num_qubits: int
    timesteps: List[List[Location]] = field(default_factory=list)
    roles: Dict[int, str] = field(default_factory=dict)

    def add_timestep(self, locations: Iterable[Location], fill_idle: bool = True,
                     live: Optional[Iterable[int]] = None) -> None:
        """
        Append a layer.

        Every untouched qubit gets an explicit idle; with live given only
        those qubits do (ancillas idle between preparation and measurement).
        """
        layer = list(locations)
        used = set()
        for loc in layer:
            for q in loc.qubits:
                if not 0 <= q < self.num_qubits:
                    raise QubitIndexError(f"qubit {q} outside circuit {self.name} of {self.num_qubits} qubits")
                if q in used:
                    raise QubitIndexError(f"qubit {q} used twice in timestep {len(self.timesteps)} of {self.name}")
                used.add(q)
        if fill_idle:
            pool = range(self.num_qubits) if live is None else sorted(set(live))
            layer += [Location(GateKind.IDLE, (q,)) for q in pool if q not in used]
        self.timesteps.append(layer)

    def step(self, *locations: Location, live: Optional[Iterable[int]] = None) -> int:
        """Shorthand for add_timestep; returns the new timestep index"""
        self.add_timestep(locations, live=live)
        return len(self.timesteps) - 1

    @property
    def depth(self) -> int:
        return len(self.timesteps)

    def locations(self) -> Iterator[Tuple[int, int, Location]]:
        for t, layer in enumerate(self.timesteps):
            for slot, loc in enumerate(layer):
                yield t, slot, loc

    def fault_locations(self) -> List[FaultLocation]:
        return [FaultLocation(t, slot, loc.kind, loc.qubits) for t, slot, loc in self.locations()]

    def measurement_keys(self) -> List[str]:
        return [outcome_key(t, loc.qubits[0]) for t, _, loc in self.locations() if loc.kind.is_measurement]

    def extend(self, other: 'Circuit', qubit_map: Optional[Sequence[int]] = None) -> int:
        """Append other's layers as laid out, relabelling qubits; returns the timestep offset"""
        mapping = list(qubit_map) if qubit_map is not None else list(range(other.num_qubits))
        offset = len(self.timesteps)
        for t, layer in enumerate(other.timesteps):
            moved = []
            for loc in layer:
                cond = loc.cond
                if cond is not None:
                    negated = cond.startswith('!')
                    ct, cq = _parse_key(cond.lstrip('!'))
                    cond = ('!' if negated else '') + outcome_key(ct + offset, mapping[cq])
                moved.append(Location(loc.kind, tuple(mapping[q] for q in loc.qubits), cond, loc.tag))
            self.add_timestep(moved, fill_idle=False)
        return offset

    # Text format

    def to_text(self) -> str:
        lines = [f"version {TEXT_FORMAT_VERSION}", f"circuit {self.name} qubits={self.num_qubits}"]
        for q in sorted(self.roles):
            lines.append(f"role {q} {self.roles[q]}")
        for t, layer in enumerate(self.timesteps):
            lines.append(f"step {t}")
            lines.extend(loc.to_text() for loc in layer)
        return '\n'.join(lines) + '\n'

    @classmethod
    def from_text(cls, text: str) -> 'Circuit':
        lines = [line.strip() for line in text.splitlines()]
        lines = [line for line in lines if line and not line.startswith('#')]
        if not lines or not lines[0].startswith('version '):
            raise CircuitFormatError("missing 'version N' line")
        version = lines[0].split()[1:]
        if version != [str(TEXT_FORMAT_VERSION)]:
            raise CircuitFormatError(f"unsupported circuit format '{lines[0]}', "
                                     f"expected version {TEXT_FORMAT_VERSION}")
        lines = lines[1:]
        if not lines or not lines[0].startswith('circuit '):
            raise CircuitFormatError("missing 'circuit NAME qubits=N' header")
        header = lines[0].split()
        if len(header) != 3 or not header[2].startswith('qubits='):
            raise CircuitFormatError(f"bad header '{lines[0]}'")
        circuit = cls(header[1], int(header[2][len('qubits='):]))
        layer: Optional[List[Location]] = None
        for line in lines[1:]:
            if line.startswith('role '):
                _, q, role = line.split()
                circuit.roles[int(q)] = role
            elif line.startswith('step '):
                if layer is not None:
                    circuit.add_timestep(layer, fill_idle=False)
                if int(line.split()[1]) != len(circuit.timesteps):
                    raise CircuitFormatError(f"steps out of order at '{line}'")
                layer = []
            elif layer is None:
                raise CircuitFormatError(f"location before first step: '{line}'")
            else:
                layer.append(Location.from_text(line))
        if layer is not None:
            circuit.add_timestep(layer, fill_idle=False)
        return circuit


def _parse_key(key: str) -> Tuple[int, int]:
    if not key.startswith('m') or '.' not in key:
        raise CircuitFormatError(f"bad outcome key '{key}'")
    t, q = key[1:].split('.')
    return int(t), int(q)


def location_census(circuit: Circuit) -> Dict[GateKind, int]:
    """Exact count of every location kind, idles included"""
    return dict(Counter(loc.kind for _, _, loc in circuit.locations()))


def condition_met(cond: Optional[str], record: Dict[str, int]) -> bool:
    """Whether a conditioned location acts, given the outcomes so far"""
    if cond is None:
        return True
    if cond.startswith('!'):
        return record.get(cond[1:], +1) == +1
    return record.get(cond, +1) == -1


def cond_on(timestep: int, qubit: int, when: int = -1) -> str:
    """Condition key firing on the given outcome of a measurement"""
    key = outcome_key(timestep, qubit)
    return key if when == -1 else '!' + key


_DUAL_KINDS = {
    GateKind.PREP_0: GateKind.PREP_PLUS,
    GateKind.PREP_PLUS: GateKind.PREP_0,
    GateKind.MEAS_X: GateKind.MEAS_Z,
    GateKind.MEAS_Z: GateKind.MEAS_X,
}


def hadamard_dual(circuit: Circuit, name: str) -> Circuit:
    """Conjugate a CNOT circuit by transversal H: swap bases and reverse every CNOT"""
    dual = Circuit(name, circuit.num_qubits, roles=dict(circuit.roles))
    for layer in circuit.timesteps:
        moved = []
        for loc in layer:
            if loc.kind is GateKind.CNOT:
                moved.append(Location(GateKind.CNOT, loc.qubits[::-1], loc.cond, loc.tag))
            elif loc.kind in _DUAL_KINDS:
                moved.append(Location(_DUAL_KINDS[loc.kind], loc.qubits, loc.cond, loc.tag))
            elif loc.kind is GateKind.IDLE:
                moved.append(loc)
            else:
                raise CircuitFormatError(f"{circuit.name}: {loc.kind.name} has no Hadamard dual here")
        dual.add_timestep(moved, fill_idle=False)
    return dual


def last_measurements(circuit: Circuit) -> Dict[int, str]:
    """Record key of the final measurement on every measured qubit"""
    found: Dict[int, str] = {}
    for t, _, loc in circuit.locations():
        if loc.kind.is_measurement:
            found[loc.qubits[0]] = outcome_key(t, loc.qubits[0])
    return found
