"""
Stabilizer code definitions
"""
import itertools
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import yaml

from src.errors import DimensionMismatchError
from src.pauli.paulistring import PauliString

DATA_DIR = Path(__file__).resolve().parents[2] / "data"


def gf2_rank(rows: np.ndarray) -> int:
    """Rank of a 0/1 matrix over GF(2)"""
    m = np.array(rows, dtype=np.uint8) % 2
    rank = 0
    for col in range(m.shape[1]):
        pivot = next((r for r in range(rank, m.shape[0]) if m[r, col]), None)
        if pivot is None:
            continue
        m[[rank, pivot]] = m[[pivot, rank]]
        for r in range(m.shape[0]):
            if r != rank and m[r, col]:
                m[r] ^= m[rank]
        rank += 1
        if rank == m.shape[0]:
            break
    return rank


def _span(rows: List[np.ndarray], n: int) -> np.ndarray:
    """All 2^len(rows) GF(2) combinations of the rows"""
    elements = [np.zeros(n, dtype=bool)]
    for row in rows:
        elements = elements + [e ^ row for e in elements]
    return np.array(elements, dtype=bool)


@dataclass
class StabilizerCode:
    """[[n, k, d]] stabilizer code with generators in table order"""
    name: str
    n: int
    k: int
    d: int
    generators: List[PauliString]
    logical_x: List[PauliString]
    logical_z: List[PauliString]
    syndrome_order: List[int] = field(default_factory=list)

    def __post_init__(self):
        for g in self.generators + self.logical_x + self.logical_z:
            if g.num_qubits != self.n:
                raise DimensionMismatchError(f"{g} does not act on {self.n} qubits")
        if len(self.logical_x) != self.k or len(self.logical_z) != self.k:
            raise ValueError(f"{self.name}: expected {self.k} logical pairs")
        for a, b in itertools.combinations(self.generators, 2):
            if not a.commutes_with(b):
                raise ValueError(f"{self.name}: generators {a} and {b} anticommute")
        for op in self.logical_x + self.logical_z:
            if not all(op.commutes_with(g) for g in self.generators):
                raise ValueError(f"{self.name}: logical {op} is not in the normalizer")
        for i, lx in enumerate(self.logical_x):
            for j, lz in enumerate(self.logical_z):
                if lx.commutes_with(lz) == (i == j):
                    raise ValueError(f"{self.name}: logical pair ({i}, {j}) has wrong commutation")
        if gf2_rank(self.check_matrix) != len(self.generators):
            raise ValueError(f"{self.name}: generators are not independent")
        if self.n - len(self.generators) != self.k:
            raise ValueError(f"{self.name}: n - #generators != k")
        if not self.syndrome_order:
            # Bits that detect X errors come first
            self.syndrome_order = self.z_type_indices + self.x_type_indices + self.mixed_indices

    # Structure

    @property
    def check_matrix(self) -> np.ndarray:
        return np.array([np.concatenate([g.x_bits, g.z_bits]) for g in self.generators], dtype=np.uint8)

    @property
    def x_type_indices(self) -> List[int]:
        return [i for i, g in enumerate(self.generators) if g.x_bits.any() and not g.z_bits.any()]

    @property
    def z_type_indices(self) -> List[int]:
        return [i for i, g in enumerate(self.generators) if g.z_bits.any() and not g.x_bits.any()]

    @property
    def mixed_indices(self) -> List[int]:
        pure = set(self.x_type_indices) | set(self.z_type_indices)
        return [i for i in range(len(self.generators)) if i not in pure]

    @property
    def is_css(self) -> bool:
        return not self.mixed_indices

    @property
    def t(self) -> int:
        return (self.d - 1) // 2

    @cached_property
    def x_stabilizer_group(self) -> np.ndarray:
        """X-supports of every element of the X-type stabilizer subgroup"""
        return _span([self.generators[i].x_bits for i in self.x_type_indices], self.n)

    @cached_property
    def z_stabilizer_group(self) -> np.ndarray:
        return _span([self.generators[i].z_bits for i in self.z_type_indices], self.n)

    def in_stabilizer_group(self, op: PauliString) -> bool:
        """Membership up to sign"""
        vec = np.concatenate([op.x_bits, op.z_bits]).astype(np.uint8)
        base = self.check_matrix
        return gf2_rank(np.vstack([base, vec])) == gf2_rank(base)

    def is_logical(self, op: PauliString) -> bool:
        """In the normalizer but not the stabilizer group"""
        return (all(op.commutes_with(g) for g in self.generators)
                and not self.in_stabilizer_group(op))

    def reduced_weight(self, error: PauliString) -> Tuple[int, int]:
        """Minimum (X-part, Z-part) weights over stabilizer equivalents"""
        if not self.is_css:
            raise ValueError(f"{self.name}: reduced weight is defined for CSS codes only")
        wx = int(np.min(np.count_nonzero(self.x_stabilizer_group ^ error.x_bits, axis=1)))
        wz = int(np.min(np.count_nonzero(self.z_stabilizer_group ^ error.z_bits, axis=1)))
        return wx, wz

    # Encoded states

    @cached_property
    def logical_basis(self) -> np.ndarray:
        """Row j is the codeword |j> (logical qubit i = bit i of j); CSS codes only"""
        if not self.is_css:
            raise ValueError(f"{self.name}: codewords are built for CSS codes only")
        if any(op.z_bits.any() for op in self.logical_x):
            raise ValueError(f"{self.name}: logical X operators must be X-type")
        weights = 1 << np.arange(self.n, dtype=np.int64)
        zero = np.zeros(2 ** self.n, dtype=complex)
        indices = self.x_stabilizer_group.astype(np.int64) @ weights
        zero[indices] = 1.0
        zero /= np.linalg.norm(zero)
        masks = [int(op.x_bits.astype(np.int64) @ weights) for op in self.logical_x]
        basis = np.zeros((2 ** self.k, 2 ** self.n), dtype=complex)
        every = np.arange(2 ** self.n, dtype=np.int64)
        for j in range(2 ** self.k):
            mask = 0
            for i, m in enumerate(masks):
                if (j >> i) & 1:
                    mask ^= m
            basis[j, every ^ mask] = zero
        return basis

    def encode(self, logical_state: np.ndarray) -> np.ndarray:
        """Amplitudes of sum_j c_j |j_L> on n qubits"""
        coeffs = np.asarray(logical_state, dtype=complex).reshape(-1)
        if coeffs.size != 2 ** self.k:
            raise DimensionMismatchError(f"expected {2 ** self.k} logical amplitudes")
        return coeffs @ self.logical_basis

    # Serialization

    def to_dict(self) -> Dict:
        return {
            'name': self.name,
            'n': self.n,
            'k': self.k,
            'd': self.d,
            'generators': [g.to_label() for g in self.generators],
            'logical_x': [op.to_label() for op in self.logical_x],
            'logical_z': [op.to_label() for op in self.logical_z],
            'syndrome_order': list(self.syndrome_order),
        }


def _labels(labels: Sequence[str]) -> List[PauliString]:
    return [PauliString.from_label(label) for label in labels]


def steane() -> StabilizerCode:
    """[[7,1,3]]; generators g1..g6 in table order"""
    supports = [[0, 2, 4, 6], [3, 4, 5, 6], [1, 2, 5, 6]]
    generators = ([PauliString.x_type(7, s) for s in supports]
                  + [PauliString.z_type(7, s) for s in supports])
    return StabilizerCode(
        name='steane', n=7, k=1, d=3,
        generators=generators,
        logical_x=_labels(['XXXXXXX']),
        logical_z=_labels(['ZZZZZZZ']),
    )


def four_two_two() -> StabilizerCode:
    """[[4,2,2]] error-detecting code"""
    return StabilizerCode(
        name='four_two_two', n=4, k=2, d=2,
        generators=_labels(['XXXX', 'ZZZZ']),
        logical_x=_labels(['XXII', 'XIIX']),
        logical_z=_labels(['ZIIZ', 'ZZII']),
    )


def load_code(path: Path) -> StabilizerCode:
    """Face-based CSS code description (each face carries an X and a Z generator)"""
    with open(path) as fh:
        layout = yaml.safe_load(fh)
    n = int(layout['n'])
    faces = list(layout['faces'].values())
    generators = ([PauliString.x_type(n, f) for f in faces]
                  + [PauliString.z_type(n, f) for f in faces])
    return StabilizerCode(
        name=layout['name'], n=n, k=int(layout['k']), d=int(layout['d']),
        generators=generators,
        logical_x=_labels(layout['logical_x']),
        logical_z=_labels(layout['logical_z']),
    )


def color_17(path: Optional[Path] = None) -> StabilizerCode:
    return load_code(path or DATA_DIR / "color17.yaml")


def syndrome(code: StabilizerCode, error: PauliString) -> np.ndarray:
    """Bit per generator in code.syndrome_order; 1 = anticommutes"""
    if error.num_qubits != code.n:
        raise DimensionMismatchError(f"error acts on {error.num_qubits} qubits, code has {code.n}")
    return np.array(
        [0 if error.commutes_with(code.generators[i]) else 1 for i in code.syndrome_order],
        dtype=np.uint8,
    )


def syndrome_string(bits: Sequence[int]) -> str:
    return ''.join(str(int(b)) for b in bits)
