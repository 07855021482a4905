"""
Circuit-level Pauli noise model, fault locations and fault enumeration
"""
from dataclasses import dataclass
from itertools import combinations, product as cartesian
from typing import Iterator, List, Optional, Sequence, Tuple, Union

from src.errors import EnumerationBudgetError
from src.pauli.paulistring import PauliString
from src.statevec.gates import GateKind

MEASUREMENT_FLIP = "flip"

SINGLE_QUBIT_PAULIS = [PauliString.from_label(s) for s in ("X", "Y", "Z")]
TWO_QUBIT_PAULIS = [
    PauliString.from_label(a + b)
    for a, b in cartesian("IXYZ", repeat=2)
    if (a, b) != ("I", "I")
]

Effect = Union[PauliString, str]


@dataclass(frozen=True)
class FaultLocation:
    """One noisy site of a circuit"""
    timestep: int
    slot: int
    kind: GateKind
    qubits: Tuple[int, ...]

    @property
    def position(self) -> Tuple[int, int]:
        return (self.timestep, self.slot)


@dataclass(frozen=True)
class FaultEvent:
    """A non-identity fault at a location: a Pauli on its qubits or a measurement flip"""
    location: FaultLocation
    effect: Effect

    def __post_init__(self):
        if isinstance(self.effect, PauliString) and self.effect.is_identity():
            raise ValueError("fault effect cannot be the identity")

    @property
    def is_flip(self) -> bool:
        return self.effect == MEASUREMENT_FLIP

    def describe(self) -> str:
        effect = self.effect if self.is_flip else self.effect.to_label()
        return f"{self.location.kind.name}{list(self.location.qubits)}@t{self.location.timestep}:{effect}"


def fault_support(kind: GateKind) -> List[Effect]:
    """Every distinct fault a location of this kind can suffer"""
    if kind.is_measurement:
        return [MEASUREMENT_FLIP]
    if kind is GateKind.PREP_0:
        return [PauliString.from_label("X")]
    if kind is GateKind.PREP_PLUS:
        return [PauliString.from_label("Z")]
    if kind.arity == 2:
        return list(TWO_QUBIT_PAULIS)
    return list(SINGLE_QUBIT_PAULIS)


@dataclass(frozen=True)
class NoiseModel:
    """Depolarizing-style circuit noise parameterized by p"""
    p: float
    idle_divisor: float = 100.0

    def __post_init__(self):
        if not 0.0 <= self.p < 1.0:
            raise ValueError(f"p must be in [0, 1), got {self.p}")
        if self.idle_divisor <= 0:
            raise ValueError("idle_divisor must be positive")

    def total_probability(self, kind: GateKind) -> float:
        if kind is GateKind.IDLE:
            return self.p / self.idle_divisor
        if kind in (GateKind.PREP_0, GateKind.PREP_PLUS) or kind.is_measurement:
            return 2 * self.p / 3
        return self.p

    def channel(self, kind: GateKind) -> List[Tuple[float, Effect]]:
        """(probability, effect) pairs; the rule's total is split uniformly over its support"""
        support = fault_support(kind)
        each = self.total_probability(kind) / len(support)
        return [(each, effect) for effect in support]

    def for_stage(self, stage: str) -> 'NoiseModel':
        return self


def sample_fault(location: FaultLocation, model, draw: float) -> Optional[FaultEvent]:
    """Pick at most one fault using a single uniform draw in [0, 1)"""
    cumulative = 0.0
    for prob, effect in model.channel(location.kind):
        cumulative += prob
        if draw < cumulative:
            return FaultEvent(location, effect)
    return None


def location_faults(location: FaultLocation) -> List[FaultEvent]:
    return [FaultEvent(location, effect) for effect in fault_support(location.kind)]


def count_fault_sets(locations: Sequence[FaultLocation], max_weight: int) -> int:
    sizes = [len(fault_support(loc.kind)) for loc in locations]
    total = sum(sizes)
    if max_weight == 2:
        total += (sum(sizes) ** 2 - sum(s * s for s in sizes)) // 2
    return total


def enumerate_fault_sets(circuit, max_weight: int, budget: Optional[int] = None) -> Iterator[Tuple[FaultEvent, ...]]:
    """All fault sets touching at most max_weight distinct locations"""
    if max_weight not in (1, 2):
        raise ValueError("max_weight must be 1 or 2")

    locations = list(circuit.fault_locations())
    if budget is not None:
        needed = count_fault_sets(locations, max_weight)
        if needed > budget:
            raise EnumerationBudgetError(f"{needed} fault sets exceed budget {budget}")

    expanded = [location_faults(loc) for loc in locations]
    for faults in expanded:
        for fault in faults:
            yield (fault,)

    if max_weight == 2:
        for first, second in combinations(range(len(expanded)), 2):
            for pair in cartesian(expanded[first], expanded[second]):
                yield pair
