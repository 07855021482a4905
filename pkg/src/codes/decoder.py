"""
Lookup-table decoding and the ideal decoder
"""
import itertools
import logging
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from src.codes.stabilizer import StabilizerCode, syndrome, syndrome_string
from src.errors import DecoderError, DimensionMismatchError
from src.pauli.paulistring import PauliString
from src.statevec.simulator import StateVector, apply_pauli, pauli_expectation
from src.utils.config import TOLERANCES

logger = logging.getLogger(__name__)

CSS_SPLIT = 'css-split'
FULL = 'full'

Key = Tuple[str, str]


@dataclass
class SyndromeTable:
    """Map from (syndrome bits, flag pattern) to a correction"""
    mode: str
    n: int
    entries: Dict[Key, PauliString] = field(default_factory=dict)
    sources: Dict[Key, str] = field(default_factory=dict)

    def add(self, bits: Sequence[int], correction: PauliString, flags: str = '', source: str = '') -> None:
        key = (syndrome_string(bits), flags)
        self.entries[key] = correction
        if source:
            self.sources[key] = source

    def __contains__(self, key: Key) -> bool:
        return key in self.entries

    def __len__(self) -> int:
        return len(self.entries)

    def lookup(self, bits: Sequence[int], flags: str = '') -> PauliString:
        key = (syndrome_string(bits), flags)
        if key not in self.entries:
            raise DecoderError(f"no correction for syndrome {key[0]} with flags '{flags}'")
        return self.entries[key]

    def to_dict(self) -> Dict:
        return {
            'mode': self.mode,
            'entries': [
                {'syndrome': s, 'flags': f, 'correction': c.to_label(), 'source': self.sources.get((s, f), '')}
                for (s, f), c in sorted(self.entries.items())
            ],
        }


def _min_weight_errors(code: StabilizerCode, letter: str, check_indices: List[int]) -> Dict[str, PauliString]:
    """Lowest-weight single-type error for every reachable partial syndrome"""
    found: Dict[str, PauliString] = {}
    max_weight = max(1, code.t)
    for weight in range(max_weight + 1):
        for support in itertools.combinations(range(code.n), weight):
            err = PauliString.on_qubits(code.n, {q: letter for q in support})
            bits = ''.join('0' if err.commutes_with(code.generators[i]) else '1' for i in check_indices)
            found.setdefault(bits, err)
        if len(found) == 2 ** len(check_indices):
            break
    return found


def lookup_table(code: StabilizerCode) -> SyndromeTable:
    """Minimum-weight CSS-split table over full syndromes"""
    if not code.is_css:
        raise ValueError(f"{code.name}: CSS-split decoding needs a CSS code")
    x_errors = _min_weight_errors(code, 'X', code.z_type_indices)
    z_errors = _min_weight_errors(code, 'Z', code.x_type_indices)
    table = SyndromeTable(mode=CSS_SPLIT, n=code.n)
    for (sx, ex), (sz, ez) in itertools.product(x_errors.items(), z_errors.items()):
        correction = ex * ez
        table.add([int(b) for b in syndrome(code, correction)], correction.unsigned())
    logger.debug(f"{code.name}: lookup table with {len(table)} entries")
    return table


def _embed_generator(code: StabilizerCode, index: int, data_qubits: Sequence[int], total: int) -> PauliString:
    return code.generators[index].embed(total, data_qubits)


def _project_generator(state: StateVector, generator: PauliString, outcome: int) -> Tuple[float, Optional[StateVector]]:
    expectation = pauli_expectation(state, generator)
    prob = (1 + outcome * expectation) / 2
    if prob <= TOLERANCES.branch:
        return 0.0, None
    image = apply_pauli(state, generator)
    amps = (state.amplitudes + outcome * image.amplitudes) / 2
    return prob, StateVector(state.num_qubits, amps / np.sqrt(prob))


def syndrome_branches(state: StateVector, code: StabilizerCode,
                      data_qubits: Sequence[int]) -> Iterator[Tuple[float, np.ndarray, StateVector]]:
    """Every syndrome outcome with nonzero probability, as (prob, bits, projected state)"""
    total = state.num_qubits

    def recurse(prob, current, order, bits):
        if not order:
            yield prob, np.array(bits, dtype=np.uint8), current
            return
        generator = _embed_generator(code, order[0], data_qubits, total)
        for outcome in (+1, -1):
            p, projected = _project_generator(current, generator, outcome)
            if projected is not None:
                yield from recurse(prob * p, projected, order[1:], bits + [0 if outcome == 1 else 1])

    yield from recurse(1.0, state, list(code.syndrome_order), [])


def logical_amplitudes(state: StateVector, code: StabilizerCode, data_qubits: Sequence[int]) -> np.ndarray:
    """Rows indexed by logical basis, columns by the remaining qubits"""
    data_qubits = list(data_qubits)
    if len(data_qubits) != code.n:
        raise DimensionMismatchError(f"{code.name} needs {code.n} data qubits, got {len(data_qubits)}")
    total = state.num_qubits
    psi = state.amplitudes.reshape((2,) * total)
    # Codeword bit j sits on data_qubits[j]
    axes = [total - 1 - data_qubits[j] for j in reversed(range(code.n))]
    psi = np.moveaxis(psi, axes, list(range(code.n))).reshape(2 ** code.n, -1)
    return code.logical_basis.conj() @ psi


def ideal_decode(state: StateVector, code: StabilizerCode, data_qubits: Sequence[int],
                 table: Optional[SyndromeTable] = None,
                 draws: Optional[Sequence[float]] = None) -> Tuple[StateVector, PauliString]:
    """
    Noiseless syndrome projection, table correction and inverse encoding.

    Without draws each generator is projected onto its more likely outcome.
    """
    table = table or lookup_table(code)
    total = state.num_qubits
    current = state
    bits = np.zeros(len(code.syndrome_order), dtype=np.uint8)
    for pos, index in enumerate(code.syndrome_order):
        generator = _embed_generator(code, index, data_qubits, total)
        p_plus = (1 + pauli_expectation(current, generator)) / 2
        if draws is not None:
            outcome = +1 if draws[pos] < p_plus else -1
        else:
            outcome = +1 if p_plus >= 0.5 else -1
        _, current = _project_generator(current, generator, outcome)
        bits[pos] = 0 if outcome == 1 else 1

    correction = table.lookup(bits)
    current = apply_pauli(current, correction.embed(total, data_qubits))
    return extract_logical(current, code, data_qubits), correction


def extract_logical(state: StateVector, code: StabilizerCode, data_qubits: Sequence[int]) -> StateVector:
    """k-qubit logical state of a code-space register"""
    amplitudes = logical_amplitudes(state, code, data_qubits)
    weight = float(np.sum(np.abs(amplitudes) ** 2))
    if abs(weight - 1.0) > 1e-8:
        raise DecoderError(f"{code.name}: {1 - weight:.3e} of the norm lies outside the code space")
    u, s, _ = np.linalg.svd(amplitudes, full_matrices=False)
    if s.size > 1 and s[1] > 1e-6:
        raise DecoderError(f"{code.name}: logical register is entangled with the remaining qubits")
    logical = u[:, 0]
    pivot = logical[np.argmax(np.abs(logical))]
    logical = logical * (abs(pivot) / pivot)
    return StateVector(code.k, logical)


def encode_into(state: StateVector, code: StabilizerCode, data_qubits: Sequence[int],
                logical_state: np.ndarray) -> StateVector:
    """Replace |0...0> on data_qubits by the encoded logical state"""
    data_qubits = list(data_qubits)
    total = state.num_qubits
    axes = [total - 1 - data_qubits[j] for j in reversed(range(code.n))]
    psi = np.moveaxis(state.amplitudes.reshape((2,) * total), axes, list(range(code.n)))
    shape = psi.shape
    rest = psi.reshape(2 ** code.n, -1)[0]
    if abs(np.vdot(rest, rest).real - 1.0) > TOLERANCES.norm:
        raise DimensionMismatchError("data qubits are not in |0...0>")
    out = np.outer(code.encode(logical_state), rest).reshape(shape)
    out = np.moveaxis(out, list(range(code.n)), axes)
    return StateVector(total, out.reshape(-1))
