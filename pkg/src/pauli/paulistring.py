"""
Signed Pauli strings in X/Z bit-vector form
"""
from functools import reduce
from typing import Iterable, List, Optional, Sequence

import numpy as np

from src.errors import DimensionMismatchError
from src.statevec.gates import I2, PAULI_X, PAULI_Y, PAULI_Z

_LETTER_BITS = {'I': (0, 0), 'X': (1, 0), 'Y': (1, 1), 'Z': (0, 1)}
_BITS_LETTER = {v: k for k, v in _LETTER_BITS.items()}
_PHASES = (1, 1j, -1, -1j)


class PauliString:
    """phase * (tensor of I/X/Y/Z); letter i of a label acts on qubit i"""

    __slots__ = ("x_bits", "z_bits", "phase")

    def __init__(self, x_bits, z_bits, phase: complex = 1):
        self.x_bits = np.asarray(x_bits, dtype=bool).copy()
        self.z_bits = np.asarray(z_bits, dtype=bool).copy()
        if self.x_bits.shape != self.z_bits.shape:
            raise DimensionMismatchError("x and z bit-vectors differ in length")
        if phase not in _PHASES:
            raise ValueError(f"phase must be one of +-1, +-i, got {phase}")
        self.phase = complex(phase)

    # Construction

    @classmethod
    def identity(cls, n: int) -> 'PauliString':
        return cls(np.zeros(n, bool), np.zeros(n, bool))

    @classmethod
    def from_label(cls, label: str) -> 'PauliString':
        """'XIZ', '-XIZ', '+iY' style labels"""
        phase: complex = 1
        if label.startswith('-'):
            phase, label = -1, label[1:]
        elif label.startswith('+'):
            label = label[1:]
        if label.startswith('i'):
            phase, label = phase * 1j, label[1:]
        bits = [_LETTER_BITS[ch] for ch in label]
        return cls([b[0] for b in bits], [b[1] for b in bits], phase)

    @classmethod
    def single(cls, n: int, qubit: int, letter: str) -> 'PauliString':
        return cls.on_qubits(n, {qubit: letter})

    @classmethod
    def on_qubits(cls, n: int, letters: dict) -> 'PauliString':
        """Build from {qubit: letter}"""
        x = np.zeros(n, bool)
        z = np.zeros(n, bool)
        for q, letter in letters.items():
            x[q], z[q] = _LETTER_BITS[letter]
        return cls(x, z)

    @classmethod
    def x_type(cls, n: int, support: Iterable[int]) -> 'PauliString':
        return cls.on_qubits(n, {q: 'X' for q in support})

    @classmethod
    def z_type(cls, n: int, support: Iterable[int]) -> 'PauliString':
        return cls.on_qubits(n, {q: 'Z' for q in support})

    # Queries

    @property
    def num_qubits(self) -> int:
        return self.x_bits.size

    def weight(self) -> int:
        return int(np.count_nonzero(self.x_bits | self.z_bits))

    def support(self) -> List[int]:
        return [int(q) for q in np.flatnonzero(self.x_bits | self.z_bits)]

    def is_identity(self) -> bool:
        """True when no qubit carries X, Y or Z (phase ignored)"""
        return not (self.x_bits.any() or self.z_bits.any())

    def letter(self, qubit: int) -> str:
        return _BITS_LETTER[(int(self.x_bits[qubit]), int(self.z_bits[qubit]))]

    def commutes_with(self, other: 'PauliString') -> bool:
        _check_length(self, other)
        sym = np.count_nonzero(self.x_bits & other.z_bits) + np.count_nonzero(self.z_bits & other.x_bits)
        return sym % 2 == 0

    def x_part(self) -> 'PauliString':
        return PauliString(self.x_bits, np.zeros_like(self.z_bits))

    def z_part(self) -> 'PauliString':
        return PauliString(np.zeros_like(self.x_bits), self.z_bits)

    def unsigned(self) -> 'PauliString':
        return PauliString(self.x_bits, self.z_bits)

    def key(self) -> bytes:
        """Hashable identity of the unsigned operator"""
        return np.packbits(np.concatenate([self.x_bits, self.z_bits])).tobytes() + bytes([self.num_qubits])

    # Algebra

    def __mul__(self, other: 'PauliString') -> 'PauliString':
        return pauli_multiply(self, other)

    def __neg__(self) -> 'PauliString':
        return PauliString(self.x_bits, self.z_bits, -self.phase)

    def __eq__(self, other) -> bool:
        if not isinstance(other, PauliString):
            return NotImplemented
        return (self.num_qubits == other.num_qubits and self.phase == other.phase
                and np.array_equal(self.x_bits, other.x_bits)
                and np.array_equal(self.z_bits, other.z_bits))

    def __hash__(self) -> int:
        return hash((self.key(), self.phase))

    def embed(self, n: int, qubits: Sequence[int]) -> 'PauliString':
        """Place this operator on the listed qubits of an n-qubit register"""
        if len(qubits) != self.num_qubits:
            raise DimensionMismatchError(f"{self.num_qubits} letters for {len(qubits)} qubits")
        x = np.zeros(n, bool)
        z = np.zeros(n, bool)
        x[list(qubits)] = self.x_bits
        z[list(qubits)] = self.z_bits
        return PauliString(x, z, self.phase)

    def restrict(self, qubits: Sequence[int]) -> 'PauliString':
        """Letters on the listed qubits only (phase dropped)"""
        idx = list(qubits)
        return PauliString(self.x_bits[idx], self.z_bits[idx])

    def to_label(self) -> str:
        prefix = {1: '', -1: '-', 1j: 'i', -1j: '-i'}[self.phase]
        return prefix + ''.join(self.letter(q) for q in range(self.num_qubits))

    def to_matrix(self) -> np.ndarray:
        """Dense matrix; qubit 0 is the least significant tensor factor"""
        mats = {'I': I2, 'X': PAULI_X, 'Y': PAULI_Y, 'Z': PAULI_Z}
        factors = [mats[self.letter(q)] for q in reversed(range(self.num_qubits))]
        return self.phase * reduce(np.kron, factors, np.eye(1, dtype=complex))

    def __repr__(self) -> str:
        return f"PauliString('{self.to_label()}')"


def _check_length(a: PauliString, b: PauliString) -> None:
    if a.num_qubits != b.num_qubits:
        raise DimensionMismatchError(f"Pauli lengths differ: {a.num_qubits} vs {b.num_qubits}")


def pauli_multiply(a: PauliString, b: PauliString) -> PauliString:
    """Group product a*b with exact phase"""
    _check_length(a, b)
    x1, z1 = a.x_bits.astype(int), a.z_bits.astype(int)
    x2, z2 = b.x_bits.astype(int), b.z_bits.astype(int)
    x3, z3 = x1 ^ x2, z1 ^ z2
    # Each letter is i^{xz} X^x Z^z; moving Z^{z1} past X^{x2} costs (-1)^{z1 x2}
    exponent = int(np.sum(x1 * z1 + x2 * z2 + 2 * z1 * x2 - x3 * z3)) % 4
    phase = a.phase * b.phase * (1j ** exponent)
    phase = _PHASES[int(round(np.angle(phase) / (np.pi / 2))) % 4]
    return PauliString(x3.astype(bool), z3.astype(bool), phase)


def product(paulis: Iterable[PauliString], n: Optional[int] = None) -> PauliString:
    items = list(paulis)
    if not items:
        if n is None:
            raise ValueError("empty product needs n")
        return PauliString.identity(n)
    return reduce(pauli_multiply, items)
