"""
Protocols: circuits plus the classical control that decides what runs next
"""
import logging
from abc import ABC, abstractmethod
from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from src.circuits.circuit import Circuit, Location, outcome_key
from src.circuits.ec import (DATA, SyndromeRound, cnot, ec1, ec2, meas, prep, syndrome_from_bits,
                             x_round, z_round)
from src.circuits.gadgets import (CORRECT_ORDER, DETECT_ORDER, HadamardMeasurement, color17_hmeas_2flag,
                                  h_prep_nonft, hmeas_correct, hmeas_detect, hmeas_with_T)
from src.codes.decoder import SyndromeTable, lookup_table
from src.codes.flag_table import build_flag_table, build_hadamard_flag_table
from src.codes.stabilizer import StabilizerCode, color_17, four_two_two, steane, syndrome_string
from src.pauli.paulistring import PauliString
from src.statevec.gates import KET_0, KET_H, KET_PLUS, GateKind

logger = logging.getLogger(__name__)

Record = Dict[str, int]


class Executor(ABC):
    """
    Runs circuits on a register and applies classically controlled operations.

    Each run is one occurrence of a named stage; occurrences are counted so
    repeat statistics and fault sites can be addressed as
    (stage, occurrence, timestep, slot).
    """

    def __init__(self, num_qubits: int):
        self.num_qubits = num_qubits
        self.counters: Counter = Counter()

    def run(self, circuit: Circuit, qubits: Optional[Sequence[int]] = None, stage: str = '') -> Record:
        """Execute circuit with its qubit i on register qubit qubits[i]; returns its outcome record"""
        mapping = list(qubits) if qubits is not None else list(range(circuit.num_qubits))
        if len(mapping) != circuit.num_qubits:
            raise ValueError(f"{circuit.name} needs {circuit.num_qubits} register qubits, got {len(mapping)}")
        stage = stage or circuit.name
        occurrence = self.counters[stage]
        self.counters[stage] += 1
        return self._execute(circuit, mapping, (stage, occurrence))

    @abstractmethod
    def _execute(self, circuit: Circuit, mapping: List[int], site: Tuple[str, int]) -> Record:
        ...

    @abstractmethod
    def correct(self, pauli: PauliString, qubits: Sequence[int]) -> None:
        """Apply a noiseless Pauli correction on the listed qubits"""

    @abstractmethod
    def hadamards(self, qubits: Sequence[int]) -> None:
        """Apply noiseless Hadamards on the listed qubits"""

    @abstractmethod
    def prepare_logical(self, code: StabilizerCode, qubits: Sequence[int], ket: np.ndarray) -> None:
        """Place an ideal encoded state on qubits (which must hold |0...0>)"""

    @abstractmethod
    def error(self, qubits: Sequence[int]) -> PauliString:
        """Residual Pauli error on qubits relative to the fault-free run"""


@dataclass
class ProtocolResult:
    """Outcome of one protocol execution"""
    accepted: bool
    logical_fix: str = 'I'
    outcomes: List[int] = field(default_factory=list)
    counters: Counter = field(default_factory=Counter)

    def to_dict(self) -> Dict:
        return {
            'accepted': self.accepted,
            'logical_fix': self.logical_fix,
            'outcomes': list(self.outcomes),
            'counters': dict(self.counters),
        }


class Protocol(ABC):
    """A state-preparation or distillation routine over a fixed register"""

    name: str = ''
    num_qubits: int = 0
    data: Tuple[int, ...] = ()
    # Ideal logical output, one ket per output qubit
    reference: Tuple[np.ndarray, ...] = ()
    clifford_only: bool = False

    @property
    @abstractmethod
    def code(self) -> StabilizerCode:
        ...

    @abstractmethod
    def execute(self, ex: Executor) -> ProtocolResult:
        ...

    @abstractmethod
    def circuits(self) -> List[Circuit]:
        """Every circuit the protocol may run"""

    def noisy(self, kind: GateKind) -> bool:
        """Whether locations of this kind receive faults"""
        return True

    def frame_error(self, ex: Executor, result: ProtocolResult) -> PauliString:
        """Residual error on the data register after a Pauli-frame run"""
        return ex.error(self.data)

    def _result(self, ex: Executor, accepted: bool, **kwargs) -> ProtocolResult:
        return ProtocolResult(accepted=accepted, counters=Counter(ex.counters), **kwargs)


# Steane error correction

@lru_cache(maxsize=None)
def steane_tables() -> Tuple[SyndromeTable, SyndromeTable, SyndromeTable]:
    """Flag tables of both EC halves and the plain lookup table"""
    code = steane()
    return (build_flag_table(ec1(), code, label='1'),
            build_flag_table(ec2(), code, label='2'),
            lookup_table(code))


def full_syndrome(ex: Executor, qubits: Sequence[int], code: StabilizerCode) -> np.ndarray:
    """Both halves, outcomes assembled in the code's syndrome order"""
    first, second = ec1(), ec2()
    bits = dict(first.generator_bits(ex.run(first.circuit, qubits, 'ec1')))
    bits.update(second.generator_bits(ex.run(second.circuit, qubits, 'ec2')))
    return syndrome_from_bits(bits, code.syndrome_order)


def table_correction(table: SyndromeTable, fallback: SyndromeTable, bits: Sequence[int], flags: str) -> PauliString:
    key = (syndrome_string(bits), flags)
    if key in table:
        return table.entries[key]
    return fallback.lookup(bits)


class SteaneEC(Protocol):
    """
    Three-ancilla Steane EC in two halves.

    detect: any nontrivial outcome rejects. correct: a nontrivial half is
    followed by the full syndrome and a correction keyed on which half fired
    and how.
    """

    def __init__(self, mode: str = 'correct', qubits: Sequence[int] = tuple(range(10))):
        if mode not in ('detect', 'correct'):
            raise ValueError(f"unknown EC mode '{mode}'")
        self.mode = mode
        self.name = f"ec_{mode}"
        self.qubits = tuple(qubits)
        self.num_qubits = max(self.qubits) + 1
        self.data = self.qubits[:7]
        self.clifford_only = True
        self.reference = (KET_0,)

    @property
    def code(self) -> StabilizerCode:
        return steane()

    def circuits(self) -> List[Circuit]:
        return [ec1().circuit, ec2().circuit]

    def execute(self, ex: Executor) -> ProtocolResult:
        return self._result(ex, self.apply(ex))

    def apply(self, ex: Executor) -> bool:
        """Run on the live executor; False means a detect-mode rejection"""
        halves = ((ec1(), '1', 'ec1'), (ec2(), '2', 'ed2' if self.mode == 'detect' else 'ec2'))
        for rnd, label, stage in halves:
            record = ex.run(rnd.circuit, self.qubits, stage)
            if not rnd.nontrivial(record):
                continue
            if self.mode == 'detect':
                return False
            self._correct(ex, label + rnd.pattern(record))
            return True
        return True

    def _correct(self, ex: Executor, flags: str) -> None:
        first, second, plain = steane_tables()
        bits = full_syndrome(ex, self.qubits, self.code)
        table = first if flags.startswith('1') else second
        correction = table_correction(table, plain, bits, flags)
        logger.debug(f"EC correction {correction.to_label()} for {syndrome_string(bits)}/{flags}")
        if not correction.is_identity():
            ex.correct(correction, self.data)


# |H> preparation

class DetectScheme(Protocol):
    """Non-FT encoding, one flagged H measurement, EC in detect mode (10 qubits)"""

    def __init__(self, order: Sequence[int] = DETECT_ORDER, gadget_t: bool = False):
        self.order = tuple(order)
        self.gadget_t = gadget_t
        self.name = 'detect_T' if gadget_t else 'detect'
        self.num_qubits = 11 if gadget_t else 10
        self.data = DATA
        self.reference = (KET_H,)

    @property
    def code(self) -> StabilizerCode:
        return steane()

    def measurement(self) -> HadamardMeasurement:
        return hmeas_with_T(self.order) if self.gadget_t else hmeas_detect(self.order)

    def circuits(self) -> List[Circuit]:
        return [h_prep_nonft(), self.measurement().circuit, ec1().circuit, ec2().circuit]

    def execute(self, ex: Executor) -> ProtocolResult:
        ex.run(h_prep_nonft(), DATA, 'hprep')
        hm = self.measurement()
        record = ex.run(hm.circuit, range(hm.circuit.num_qubits), 'hmeas')
        outcome = hm.outcome(record)
        if not hm.accepted(record):
            return self._result(ex, False, outcomes=[outcome])
        accepted = SteaneEC('detect').apply(ex)
        return self._result(ex, accepted, outcomes=[outcome])


def spread_fix_positions(order: Sequence[int], fired) -> Tuple[int, ...]:
    """Data positions that get a Hadamard when f0 fires together with f2 or f3"""
    if 'f0' in fired and {'f2', 'f3'} & set(fired):
        return tuple(order[4:])
    return ()


@lru_cache(maxsize=None)
def hadamard_flag_table(order: Tuple[int, ...]) -> SyndromeTable:
    return build_hadamard_flag_table(hmeas_correct(order), steane(),
                                     fix=lambda fired: spread_fix_positions(order, fired))


class CorrectScheme(Protocol):
    """
    Three four-flag H measurements, each followed by error correction.

    When f0 fires together with f2 or f3, Hadamards on the last three C_H
    targets undo the spread. After any flag the full six-bit syndrome is
    corrected through the table of flagged single-fault errors; otherwise
    the usual EC runs. A flag on the third measurement adds one more EC.
    The majority of the three outcomes picks the final logical fix.
    """

    def __init__(self, order: Sequence[int] = CORRECT_ORDER):
        self.order = tuple(order)
        self.name = 'correct'
        self.num_qubits = 11
        self.data = DATA
        self.reference = (KET_H,)

    @property
    def code(self) -> StabilizerCode:
        return steane()

    def circuits(self) -> List[Circuit]:
        return [h_prep_nonft(), hmeas_correct(self.order).circuit, ec1().circuit, ec2().circuit]

    @staticmethod
    def logical_fix(outcomes: Sequence[int]) -> str:
        return 'I' if sum(outcomes) > 0 else 'Y'

    def _flagged_correction(self, ex: Executor, fired) -> None:
        bits = full_syndrome(ex, range(10), self.code)
        flags = ','.join(sorted(fired))
        correction = table_correction(hadamard_flag_table(self.order), lookup_table(self.code), bits, flags)
        logger.debug(f"Flagged correction {correction.to_label()} for {syndrome_string(bits)}/{flags}")
        if not correction.is_identity():
            ex.correct(correction, DATA)

    def execute(self, ex: Executor) -> ProtocolResult:
        ec = SteaneEC('correct')
        hm = hmeas_correct(self.order)
        ex.run(h_prep_nonft(), DATA, 'hprep')
        outcomes = []
        for i in range(3):
            record = ex.run(hm.circuit, range(11), 'hmeas')
            outcomes.append(hm.outcome(record))
            fired = hm.fired(record)
            fix = spread_fix_positions(self.order, fired)
            if fix:
                ex.hadamards(fix)
            if fired:
                self._flagged_correction(ex, fired)
            else:
                ec.apply(ex)
            if i == 2 and fired:
                ec.apply(ex)
        fix = self.logical_fix(outcomes)
        if fix == 'Y':
            ex.correct(PauliString.from_label('Y' * 7), DATA)
        return self._result(ex, True, logical_fix=fix, outcomes=outcomes)


# Encoded |+> and |0>

@lru_cache(maxsize=None)
def ft_prep_table(basis: str) -> SyndromeTable:
    rnd = z_round(True) if basis == '+' else x_round(True)
    part = PauliString.z_part if basis == '+' else PauliString.x_part
    return build_flag_table(rnd, steane(), part=part, include_inputs=False, flags_only=True)


def _half_syndrome(rnd: SyndromeRound, record: Record, code: StabilizerCode) -> np.ndarray:
    return syndrome_from_bits(rnd.generator_bits(record), code.syndrome_order)


class FtPrep(Protocol):
    """
    |+> (or |0>) on every data qubit, then the flagged Z (or X) round.

    A flag triggers an unflagged round of the other type to undo the spread
    plus an unflagged repeat of the same type; a nontrivial but unflagged
    round triggers the repeat alone.
    """

    def __init__(self, basis: str = '+'):
        if basis not in ('+', '0'):
            raise ValueError("basis must be '+' or '0'")
        self.basis = basis
        self.name = 'ft_prep_plus' if basis == '+' else 'ft_prep_zero'
        self.num_qubits = 11
        self.data = DATA
        self.clifford_only = True
        self.reference = (KET_PLUS if basis == '+' else KET_0,)

    @property
    def code(self) -> StabilizerCode:
        return steane()

    def _rounds(self) -> Tuple[SyndromeRound, SyndromeRound, SyndromeRound, str, str]:
        """(flagged, other type, same type, other stage, same stage)"""
        if self.basis == '+':
            return z_round(True), x_round(False), z_round(False), 'xs', 'zs'
        return x_round(True), z_round(False), x_round(False), 'zs', 'xs'

    def init_circuit(self) -> Circuit:
        kind = GateKind.PREP_PLUS if self.basis == '+' else GateKind.PREP_0
        circuit = Circuit(f"init_{self.name}", 7, roles={q: 'data' for q in DATA})
        circuit.step(*(Location(kind, (q,)) for q in DATA))
        return circuit

    def circuits(self) -> List[Circuit]:
        flagged, other, same, _, _ = self._rounds()
        return [self.init_circuit(), flagged.circuit, other.circuit, same.circuit]

    def execute(self, ex: Executor) -> ProtocolResult:
        flagged, other, same, other_stage, same_stage = self._rounds()
        code = self.code
        plain = lookup_table(code)
        ex.run(self.init_circuit(), DATA, 'init')
        record = ex.run(flagged.circuit, range(11), 'flagged')
        if flagged.flagged(record):
            spread = ex.run(other.circuit, range(10), other_stage)
            bits = _half_syndrome(other, spread, code)
            correction = table_correction(ft_prep_table(self.basis), plain, bits, 'flag')
            if not correction.is_identity():
                ex.correct(correction, DATA)
            self._repeat(ex, same, same_stage, plain)
        elif flagged.nontrivial(record):
            self._repeat(ex, same, same_stage, plain)
        return self._result(ex, True)

    def _repeat(self, ex: Executor, rnd: SyndromeRound, stage: str, plain: SyndromeTable) -> None:
        record = ex.run(rnd.circuit, range(10), stage)
        correction = plain.lookup(_half_syndrome(rnd, record, self.code))
        if not correction.is_identity():
            ex.correct(correction, DATA)


# Teleportation into a code block

# |+> sources and |0> targets of the eight-CNOT block network. The X image of
# each source is a weight-3 codeword: {0,3,4}, {0,1,2}, {1,3,5}, {1,4,6}.
PLUS_SOURCES = (2, 4, 5, 6)
ZERO_TARGETS = (0, 1, 3)
PLUS_NETWORK = (
    ((4, 0), (2, 1), (5, 3)),
    ((4, 3), (2, 0), (6, 1)),
    ((6, 4), (5, 1)),
)
# Qubits measured after the inverse network; the decoded qubit is 2
DECODER_MEASURED = (4, 5, 6)


def plus_encoder() -> Circuit:
    """Logical |+> of the Steane code from four |+> and three |0> with eight CNOTs"""
    circuit = Circuit('encode_plus8', 7, roles={q: 'data' for q in range(7)})
    circuit.step(*(prep(q, GateKind.PREP_PLUS) for q in PLUS_SOURCES), *(prep(q) for q in ZERO_TARGETS))
    for layer in PLUS_NETWORK:
        circuit.step(*(cnot(c, t) for c, t in layer))
    return circuit


def decoder_circuit() -> Circuit:
    """
    Inverse of the |+> network followed by Z measurements of 4, 5 and 6.

    The logical qubit lands on qubit 2 with an X applied when the three
    outcomes multiply to -1 (see decoder_parity).
    """
    circuit = Circuit('decoder', 7, roles={q: 'data' for q in range(7)})
    for layer in reversed(PLUS_NETWORK):
        circuit.step(*(cnot(c, t) for c, t in layer))
    circuit.step(*(meas(q) for q in DECODER_MEASURED))
    return circuit


def decoder_parity(record: Record) -> int:
    """Product of the decoder outcomes: -1 means the decoded qubit carries an X"""
    t = decoder_circuit().depth - 1
    return int(np.prod([record[outcome_key(t, q)] for q in DECODER_MEASURED]))


def block_encoder(kind: GateKind, name: str) -> Circuit:
    """Encoder network with its input qubit prepared by kind"""
    source = h_prep_nonft()
    circuit = Circuit(name, 7, roles=dict(source.roles))
    first = [Location(kind, (2,)) if loc.kind is GateKind.PREP_H else loc for loc in source.timesteps[0]]
    circuit.add_timestep(first)
    for layer in source.timesteps[1:]:
        circuit.add_timestep(layer, fill_idle=False)
    return circuit


def physical_part() -> Circuit:
    """Bell measurement of the input against the decoded qubit (qubit 0: input, 1: decoded)"""
    circuit = Circuit('teleport_physical', 2, roles={0: 'input', 1: 'data'})
    circuit.step(prep(0, GateKind.PREP_H), live=[0])
    circuit.step(cnot(0, 1))
    circuit.step(meas(0, GateKind.MEAS_X), meas(1))
    return circuit


class Teleport(Protocol):
    """
    Teleport a physical |H> into a Steane block: logical Bell pair on blocks
    A (0-6) and B (7-13), decode A, Bell-measure against the input (14),
    and fix B with a logical Pauli.
    """

    def __init__(self):
        self.name = 'teleport'
        self.num_qubits = 15
        self.data = tuple(range(7, 14))
        self.reference = (KET_H,)

    @property
    def code(self) -> StabilizerCode:
        return steane()

    def bell_pair(self) -> Circuit:
        circuit = Circuit('logical_bell', 14, roles={q: 'data' for q in range(14)})
        plus, zero = plus_encoder(), block_encoder(GateKind.PREP_0, 'encode_zero')
        # Both encoders run side by side; block A idles once its network is done
        for t in range(max(plus.depth, zero.depth)):
            layer = [loc for loc in plus.timesteps[t] if loc.kind is not GateKind.IDLE] if t < plus.depth else []
            if t < zero.depth:
                layer += [Location(loc.kind, tuple(q + 7 for q in loc.qubits))
                          for loc in zero.timesteps[t] if loc.kind is not GateKind.IDLE]
            circuit.add_timestep(layer)
        circuit.step(*(cnot(q, q + 7) for q in range(7)))
        return circuit

    def circuits(self) -> List[Circuit]:
        return [self.bell_pair(), decoder_circuit(), physical_part()]

    def execute(self, ex: Executor) -> ProtocolResult:
        ex.run(self.bell_pair(), range(14), 'bell')
        parity = decoder_parity(ex.run(decoder_circuit(), range(7), 'decode'))
        circuit = physical_part()
        record = ex.run(circuit, [14, 2], 'physical')
        t = circuit.depth - 1
        x_outcome = record[outcome_key(t, 0)]
        # An X left by the decoder only flips the Z readout of the decoded qubit
        z_outcome = record[outcome_key(t, 1)] * parity
        code = self.code
        if z_outcome == -1:
            ex.correct(code.logical_x[0], self.data)
        if x_outcome == -1:
            ex.correct(code.logical_z[0], self.data)
        fix = {(1, 1): 'I', (1, -1): 'X', (-1, 1): 'Z', (-1, -1): 'Y'}[(x_outcome, z_outcome)]
        return self._result(ex, True, logical_fix=fix, outcomes=[x_outcome, z_outcome])


# Distillation on [[4,2,2]]

MEK_VARIANTS = ('full', 'ideal_h', 'ideal_stabilizer')


def mek_circuit() -> Circuit:
    """
    Encode two |H> into [[4,2,2]], measure H(x)4 with four C_H from one
    ancilla, then measure XXXX and ZZZZ.

    Qubits 0-3 data, 4 the Hadamard ancilla, 5 and 6 the stabilizer ancillas.
    """
    a, sx, sz = 4, 5, 6
    roles = {**{q: 'data' for q in range(4)}, a: 'ancilla', sx: 'ancilla', sz: 'ancilla'}
    circuit = Circuit('mek', 7, roles=roles)
    circuit.step(prep(0), prep(1, GateKind.PREP_H), prep(2, GateKind.PREP_PLUS), prep(3, GateKind.PREP_H),
                 live=range(4))
    circuit.step(cnot(1, 0), live=range(4))
    circuit.step(cnot(3, 0), cnot(2, 1), live=range(4))
    circuit.step(cnot(2, 0), live=range(4))
    circuit.step(cnot(2, 3), prep(a, GateKind.PREP_PLUS), live=range(5))
    for target in range(4):
        circuit.step(Location(GateKind.T_DAG, (target,)), live=range(5))
        circuit.step(Location(GateKind.CZ, (a, target)), live=range(5))
        circuit.step(Location(GateKind.T, (target,)), live=range(5))
    circuit.step(meas(a, GateKind.MEAS_X), prep(sx, GateKind.PREP_PLUS), prep(sz), live=[0, 1, 2, 3, sx, sz])
    for k in range(4):
        circuit.step(cnot(sx, k), cnot((k + 1) % 4, sz), live=[0, 1, 2, 3, sx, sz])
    circuit.step(meas(sx, GateKind.MEAS_X), meas(sz), live=[0, 1, 2, 3, sx, sz])
    return circuit


class Mek(Protocol):
    """One distillation round; accepts when every measurement is trivial"""

    def __init__(self, variant: str = 'full'):
        if variant not in MEK_VARIANTS:
            raise ValueError(f"unknown MEK variant '{variant}'")
        self.variant = variant
        self.name = 'mek' if variant == 'full' else f"mek_{variant}"
        self.num_qubits = 7
        self.data = (0, 1, 2, 3)
        self.reference = (KET_H, KET_H)

    @property
    def code(self) -> StabilizerCode:
        return four_two_two()

    def circuits(self) -> List[Circuit]:
        return [mek_circuit()]

    def noisy(self, kind: GateKind) -> bool:
        if self.variant == 'ideal_h':
            return kind is not GateKind.PREP_H
        if self.variant == 'ideal_stabilizer':
            return kind is GateKind.PREP_H
        return True

    def execute(self, ex: Executor) -> ProtocolResult:
        record = ex.run(mek_circuit(), range(7), 'mek')
        accepted = all(v == +1 for v in record.values())
        return self._result(ex, accepted, outcomes=[record[k] for k in sorted(record)])


class Color17Detect(Protocol):
    """Ideal encoded |H> in the 17-qubit color code through the two-flag H measurement"""

    def __init__(self):
        self.name = 'color17'
        self.num_qubits = 22
        self.data = tuple(range(17))
        self.reference = (KET_H,)

    @property
    def code(self) -> StabilizerCode:
        return color_17()

    def circuits(self) -> List[Circuit]:
        return [color17_hmeas_2flag().circuit]

    def execute(self, ex: Executor) -> ProtocolResult:
        ex.prepare_logical(self.code, self.data, KET_H)
        hm = color17_hmeas_2flag()
        record = ex.run(hm.circuit, range(22), 'hmeas')
        return self._result(ex, hm.accepted(record), outcomes=[hm.outcome(record)])


PROTOCOLS: Dict[str, Callable[[], Protocol]] = {
    'detect': DetectScheme,
    'detect-T': lambda: DetectScheme(gadget_t=True),
    'correct': CorrectScheme,
    'ec': lambda: SteaneEC('correct'),
    'ec-detect': lambda: SteaneEC('detect'),
    'ft-prep-plus': lambda: FtPrep('+'),
    'ft-prep-zero': lambda: FtPrep('0'),
    'teleport': Teleport,
    'mek-round1': Mek,
    'mek-ideal-h': lambda: Mek('ideal_h'),
    'mek-ideal-stabilizer': lambda: Mek('ideal_stabilizer'),
    'color17': Color17Detect,
}


def get_protocol(name: str) -> Protocol:
    if name not in PROTOCOLS:
        raise KeyError(f"unknown protocol '{name}'; choose from {', '.join(sorted(PROTOCOLS))}")
    return PROTOCOLS[name]()
