"""
Dense state-vector simulation with exact gates and basis measurements
"""
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from src.errors import DimensionMismatchError, GateArityError, QubitIndexError
from src.statevec.gates import BASIS_OBSERVABLES, I2, PAULI_X, PREP_STATES, GateKind
from src.utils.config import TOLERANCES

MAX_QUBITS = 24


class StateVector:
    """Pure state on num_qubits qubits; qubit 0 is the least significant bit"""

    __slots__ = ("_num_qubits", "amplitudes")

    def __init__(self, num_qubits: int, amplitudes: np.ndarray):
        if not 1 <= num_qubits <= MAX_QUBITS:
            raise QubitIndexError(f"num_qubits must be in 1..{MAX_QUBITS}, got {num_qubits}")
        amplitudes = np.asarray(amplitudes, dtype=complex).reshape(-1)
        if amplitudes.size != 2 ** num_qubits:
            raise DimensionMismatchError(
                f"expected {2 ** num_qubits} amplitudes, got {amplitudes.size}"
            )
        self._num_qubits = num_qubits
        self.amplitudes = amplitudes

    @property
    def num_qubits(self) -> int:
        return self._num_qubits

    @classmethod
    def zero_state(cls, num_qubits: int) -> 'StateVector':
        amps = np.zeros(2 ** num_qubits, dtype=complex)
        amps[0] = 1.0
        return cls(num_qubits, amps)

    @classmethod
    def from_product(cls, single_qubit_states: Sequence[np.ndarray]) -> 'StateVector':
        """Product state; element i of the list is qubit i"""
        amps = np.array([1.0], dtype=complex)
        for ket in single_qubit_states:
            amps = np.kron(np.asarray(ket, dtype=complex), amps)
        return cls(len(single_qubit_states), amps)

    def copy(self) -> 'StateVector':
        return StateVector(self._num_qubits, self.amplitudes.copy())

    def norm(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def overlap(self, other: 'StateVector') -> complex:
        """<self|other>"""
        _check_same_size(self, other)
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def allclose(self, other: 'StateVector', atol: float = TOLERANCES.norm) -> bool:
        _check_same_size(self, other)
        return bool(np.allclose(self.amplitudes, other.amplitudes, atol=atol))

    def equal_up_to_phase(self, other: 'StateVector', atol: float = 1e-9) -> bool:
        return abs(abs(self.overlap(other)) - 1.0) < atol

    def __repr__(self) -> str:
        return f"StateVector(num_qubits={self._num_qubits})"


@dataclass
class DensityMatrix:
    """Hermitian, unit-trace matrix built by averaging sampled pure states"""
    entries: np.ndarray

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def is_valid(self, tol=TOLERANCES) -> bool:
        rho = self.entries
        if not np.allclose(rho, rho.conj().T, atol=tol.hermitian):
            return False
        if abs(np.trace(rho).real - 1.0) > tol.trace:
            return False
        return bool(np.linalg.eigvalsh(rho).min() >= tol.psd)


def _check_same_size(a: StateVector, b: StateVector) -> None:
    if a.num_qubits != b.num_qubits:
        raise DimensionMismatchError(f"{a.num_qubits} vs {b.num_qubits} qubits")


def _check_qubits(state: StateVector, qubits: Sequence[int]) -> None:
    if len(set(qubits)) != len(qubits):
        raise QubitIndexError(f"repeated qubit in {list(qubits)}")
    for q in qubits:
        if not 0 <= q < state.num_qubits:
            raise QubitIndexError(f"qubit {q} out of range for {state.num_qubits} qubits")


def apply_matrix(state: StateVector, matrix: np.ndarray, qubits: Sequence[int]) -> StateVector:
    """Apply a 2^k x 2^k operator; the first listed qubit is the most significant matrix index"""
    _check_qubits(state, qubits)
    k = len(qubits)
    if matrix.shape != (2 ** k, 2 ** k):
        raise GateArityError(f"matrix of shape {matrix.shape} cannot act on {k} qubits")

    n = state.num_qubits
    psi = state.amplitudes.reshape((2,) * n)
    axes = [n - 1 - q for q in qubits]
    op = matrix.reshape((2,) * (2 * k))
    out = np.tensordot(op, psi, axes=(list(range(k, 2 * k)), axes))
    out = np.moveaxis(out, list(range(k)), axes)
    return StateVector(n, out.reshape(-1))


def apply_gate(state: StateVector, gate: GateKind, qubits: Sequence[int]) -> StateVector:
    """Apply the exact unitary of gate; preparations reset the qubit"""
    qubits = list(qubits)
    if len(qubits) != gate.arity:
        raise GateArityError(f"{gate.name} acts on {gate.arity} qubit(s), got {len(qubits)}")
    if gate is GateKind.IDLE:
        _check_qubits(state, qubits)
        return state
    if gate.is_prep:
        return prepare(state, qubits[0], PREP_STATES[gate])
    if gate.is_measurement:
        raise GateArityError(f"{gate.name} is a measurement; use measure()")
    return apply_matrix(state, gate.matrix(), qubits)


def project(state: StateVector, qubit: int, basis: str, outcome: int) -> Tuple[float, Optional[StateVector]]:
    """Probability of outcome and the renormalized post-measurement state (None if impossible)"""
    _check_qubits(state, [qubit])
    projector = (I2 + outcome * BASIS_OBSERVABLES[basis]) / 2
    projected = apply_matrix(state, projector, [qubit])
    prob = projected.norm()
    if prob <= 0.0:
        return 0.0, None
    projected.amplitudes /= np.sqrt(prob)
    return prob, projected


def measure(state: StateVector, qubit: int, basis: str, draw: float) -> Tuple[int, StateVector]:
    """Born-rule measurement driven by a caller-supplied uniform draw in [0, 1)"""
    prob_plus, plus_state = project(state, qubit, basis, +1)
    if draw < prob_plus:
        return +1, plus_state
    _, minus_state = project(state, qubit, basis, -1)
    return -1, minus_state


def prepare(state: StateVector, qubit: int, ket: np.ndarray) -> StateVector:
    """Reset an unentangled qubit to |0> and rotate it to ket"""
    prob0, zero_branch = project(state, qubit, 'Z', +1)
    if prob0 >= 0.5:
        reset = zero_branch
    else:
        _, one_branch = project(state, qubit, 'Z', -1)
        reset = apply_matrix(one_branch, PAULI_X, [qubit])
    # Unitary with first column = ket
    a, b = ket
    rotation = np.array([[a, -np.conj(b)], [b, np.conj(a)]], dtype=complex)
    return apply_matrix(reset, rotation, [qubit])


def pauli_expectation(state: StateVector, pauli) -> float:
    """<psi|P|psi> for a PauliString acting on all qubits of the state"""
    if pauli.num_qubits != state.num_qubits:
        raise DimensionMismatchError(
            f"Pauli on {pauli.num_qubits} qubits, state on {state.num_qubits}"
        )
    image = apply_pauli(state, pauli)
    return float(np.vdot(state.amplitudes, image.amplitudes).real)


def apply_pauli(state: StateVector, pauli) -> StateVector:
    """Apply a PauliString (including its phase) by bit operations"""
    if pauli.num_qubits != state.num_qubits:
        raise DimensionMismatchError(
            f"Pauli on {pauli.num_qubits} qubits, state on {state.num_qubits}"
        )
    n = state.num_qubits
    weights = 1 << np.arange(n, dtype=np.int64)
    x_mask = int(np.dot(pauli.x_bits.astype(np.int64), weights))
    z_mask = int(np.dot(pauli.z_bits.astype(np.int64), weights))
    y_count = int(np.count_nonzero(pauli.x_bits & pauli.z_bits))

    index = np.arange(2 ** n, dtype=np.int64)
    # P = phase * i^{#Y} * X^x Z^z ; Z^z acts first
    parity = np.zeros(2 ** n, dtype=np.int64)
    masked = index & z_mask
    while np.any(masked):
        parity ^= masked & 1
        masked >>= 1
    signs = 1 - 2 * parity
    amps = state.amplitudes * signs
    out = np.empty_like(amps)
    out[index ^ x_mask] = amps
    out *= pauli.phase * (1j ** y_count)
    return StateVector(n, out)


def accumulate_density(samples: Iterable[StateVector]) -> DensityMatrix:
    """Average of |psi_i><psi_i| over the samples"""
    total = None
    count = 0
    for sample in samples:
        vec = sample.amplitudes
        outer = np.outer(vec, vec.conj())
        if total is None:
            total = outer
        elif total.shape != outer.shape:
            raise DimensionMismatchError("samples of different dimension")
        else:
            total = total + outer
        count += 1
    if count == 0:
        raise ValueError("accumulate_density needs at least one sample")
    total = total / np.trace(total).real
    return DensityMatrix(total)


def partial_trace(rho: DensityMatrix, keep: int, total_qubits: int) -> DensityMatrix:
    """2x2 reduced density matrix of qubit keep"""
    if rho.dim != 2 ** total_qubits:
        raise DimensionMismatchError(f"dim {rho.dim} is not 2^{total_qubits}")
    if not 0 <= keep < total_qubits:
        raise QubitIndexError(f"qubit {keep} out of range")
    n = total_qubits
    tensor = rho.entries.reshape((2,) * (2 * n))
    axis = n - 1 - keep
    # Bring the kept qubit's row and column axes to the front, trace the rest
    tensor = np.moveaxis(tensor, [axis, n + axis], [0, 1])
    rest = 2 ** (n - 1)
    tensor = tensor.reshape(2, 2, rest, rest)
    return DensityMatrix(np.einsum('abjj->ab', tensor))


def reduced_state(state: StateVector, keep: List[int]) -> np.ndarray:
    """Reduced density matrix on the listed qubits (first listed is most significant)"""
    _check_qubits(state, keep)
    n = state.num_qubits
    psi = state.amplitudes.reshape((2,) * n)
    axes = [n - 1 - q for q in keep]
    psi = np.moveaxis(psi, axes, list(range(len(keep))))
    psi = psi.reshape(2 ** len(keep), -1)
    return psi @ psi.conj().T
