"""
Gate kinds and their exact matrices
"""
from enum import Enum
from typing import Dict, Optional

import numpy as np

COS_PI_8 = np.cos(np.pi / 8)
SIN_PI_8 = np.sin(np.pi / 8)
INV_SQRT2 = 1 / np.sqrt(2)

I2 = np.eye(2, dtype=complex)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
HADAMARD = INV_SQRT2 * np.array([[1, 1], [1, -1]], dtype=complex)

# T = exp(-i pi Y / 8), a real rotation taking |0> to |H>
T_GATE = np.array([[COS_PI_8, -SIN_PI_8], [SIN_PI_8, COS_PI_8]], dtype=complex)
Y_HALF = INV_SQRT2 * np.array([[1, -1], [1, 1]], dtype=complex)
Z_HALF = np.diag([np.exp(-1j * np.pi / 4), np.exp(1j * np.pi / 4)])

KET_0 = np.array([1, 0], dtype=complex)
KET_PLUS = INV_SQRT2 * np.array([1, 1], dtype=complex)
KET_H = np.array([COS_PI_8, SIN_PI_8], dtype=complex)
KET_MINUS_H = PAULI_Y @ KET_H

BASIS_OBSERVABLES = {'X': PAULI_X, 'Y': PAULI_Y, 'Z': PAULI_Z}


def controlled(u: np.ndarray) -> np.ndarray:
    """C_U = |0><0| (x) I + |1><1| (x) U, control first"""
    out = np.zeros((4, 4), dtype=complex)
    out[:2, :2] = I2
    out[2:, 2:] = u
    return out


class GateKind(Enum):
    """Every location kind that can appear in a circuit"""
    X = 'X'
    Y = 'Y'
    Z = 'Z'
    H = 'H'
    Y_HALF = 'YHALF'
    Y_HALF_DAG = 'YHALF_DAG'
    Z_HALF = 'ZHALF'
    Z_HALF_DAG = 'ZHALF_DAG'
    T = 'T'
    T_DAG = 'T_DAG'
    CNOT = 'CNOT'
    CY = 'CY'
    CZ = 'CZ'
    CH = 'CH'
    PREP_0 = 'PREP0'
    PREP_PLUS = 'PREP+'
    PREP_H = 'PREPH'
    MEAS_X = 'MEASX'
    MEAS_Y = 'MEASY'
    MEAS_Z = 'MEASZ'
    IDLE = 'IDLE'

    @property
    def arity(self) -> int:
        return 2 if self in TWO_QUBIT_KINDS else 1

    @property
    def is_prep(self) -> bool:
        return self in PREP_STATES

    @property
    def is_measurement(self) -> bool:
        return self in MEASUREMENT_BASIS

    @property
    def is_unitary(self) -> bool:
        return self in GATE_MATRICES

    @property
    def basis(self) -> Optional[str]:
        return MEASUREMENT_BASIS.get(self)

    def inverse(self) -> 'GateKind':
        """Inverse gate kind (self-inverse kinds map to themselves)"""
        return INVERSES.get(self, self)

    def matrix(self) -> np.ndarray:
        if self not in GATE_MATRICES:
            raise ValueError(f"{self.name} has no unitary matrix")
        return GATE_MATRICES[self]


TWO_QUBIT_KINDS = frozenset({GateKind.CNOT, GateKind.CY, GateKind.CZ, GateKind.CH})

GATE_MATRICES: Dict[GateKind, np.ndarray] = {
    GateKind.X: PAULI_X,
    GateKind.Y: PAULI_Y,
    GateKind.Z: PAULI_Z,
    GateKind.H: HADAMARD,
    GateKind.Y_HALF: Y_HALF,
    GateKind.Y_HALF_DAG: Y_HALF.conj().T,
    GateKind.Z_HALF: Z_HALF,
    GateKind.Z_HALF_DAG: Z_HALF.conj().T,
    GateKind.T: T_GATE,
    GateKind.T_DAG: T_GATE.conj().T,
    GateKind.CNOT: controlled(PAULI_X),
    GateKind.CY: controlled(PAULI_Y),
    GateKind.CZ: controlled(PAULI_Z),
    GateKind.CH: controlled(HADAMARD),
    GateKind.IDLE: I2,
}

PREP_STATES: Dict[GateKind, np.ndarray] = {
    GateKind.PREP_0: KET_0,
    GateKind.PREP_PLUS: KET_PLUS,
    GateKind.PREP_H: KET_H,
}

MEASUREMENT_BASIS: Dict[GateKind, str] = {
    GateKind.MEAS_X: 'X',
    GateKind.MEAS_Y: 'Y',
    GateKind.MEAS_Z: 'Z',
}

INVERSES = {
    GateKind.Y_HALF: GateKind.Y_HALF_DAG,
    GateKind.Y_HALF_DAG: GateKind.Y_HALF,
    GateKind.Z_HALF: GateKind.Z_HALF_DAG,
    GateKind.Z_HALF_DAG: GateKind.Z_HALF,
    GateKind.T: GateKind.T_DAG,
    GateKind.T_DAG: GateKind.T,
}
