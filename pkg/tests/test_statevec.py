import numpy as np
import pytest
from numpy.testing import assert_allclose

from src.errors import GateArityError, QubitIndexError
from src.pauli.paulistring import PauliString
from src.statevec.gates import COS_PI_8, HADAMARD, KET_0, KET_H, KET_PLUS, SIN_PI_8, GateKind
from src.statevec.simulator import (StateVector, accumulate_density, apply_gate, apply_pauli, measure,
                                    partial_trace, pauli_expectation)

KET_1 = np.array([0, 1], dtype=complex)


class TestGates:
    def test_cnot_flips_target_when_control_set(self):
        state = StateVector.from_product([KET_1, KET_0])
        out = apply_gate(state, GateKind.CNOT, [0, 1])
        assert out.allclose(StateVector.from_product([KET_1, KET_1]))

    def test_cnot_leaves_target_when_control_clear(self):
        state = StateVector.from_product([KET_0, KET_1])
        out = apply_gate(state, GateKind.CNOT, [0, 1])
        assert out.allclose(state)

    def test_idle_is_identity(self):
        state = StateVector.from_product([KET_H, KET_PLUS])
        assert apply_gate(state, GateKind.IDLE, [1]).allclose(state)

    def test_t_rotates_zero_to_h(self):
        out = apply_gate(StateVector.zero_state(1), GateKind.T, [0])
        assert_allclose(out.amplitudes, [COS_PI_8, SIN_PI_8], atol=1e-12)

    def test_h_state_is_hadamard_eigenstate(self):
        assert_allclose(HADAMARD @ KET_H, KET_H, atol=1e-12)

    def test_t_dag_inverts_t(self):
        state = StateVector.from_product([KET_PLUS])
        out = apply_gate(apply_gate(state, GateKind.T, [0]), GateKind.T_DAG, [0])
        assert out.allclose(state)

    def test_controlled_hadamard(self):
        state = StateVector.from_product([KET_1, KET_0])
        out = apply_gate(state, GateKind.CH, [0, 1])
        assert out.allclose(StateVector.from_product([KET_1, KET_PLUS]))

    def test_norm_preserved(self):
        rng = np.random.default_rng(3)
        amps = rng.normal(size=8) + 1j * rng.normal(size=8)
        state = StateVector(3, amps / np.linalg.norm(amps))
        for kind, qubits in [(GateKind.H, [2]), (GateKind.CZ, [0, 2]), (GateKind.T, [1]), (GateKind.CH, [1, 0])]:
            state = apply_gate(state, kind, qubits)
            assert state.norm() == pytest.approx(1.0, abs=1e-10)

    def test_arity_mismatch(self):
        with pytest.raises(GateArityError):
            apply_gate(StateVector.zero_state(2), GateKind.CNOT, [0])

    def test_index_out_of_range(self):
        with pytest.raises(QubitIndexError):
            apply_gate(StateVector.zero_state(2), GateKind.H, [2])

    def test_prep_resets_qubit(self):
        state = StateVector.from_product([KET_1, KET_0])
        out = apply_gate(state, GateKind.PREP_PLUS, [0])
        assert out.allclose(StateVector.from_product([KET_PLUS, KET_0]))


class TestMeasure:
    def test_z_measure_zero_state(self):
        outcome, collapsed = measure(StateVector.zero_state(1), 0, 'Z', draw=0.999)
        assert outcome == +1
        assert collapsed.allclose(StateVector.zero_state(1))

    def test_draw_selects_branch(self):
        state = StateVector.from_product([KET_PLUS])
        assert measure(state, 0, 'Z', draw=0.2)[0] == +1
        outcome, collapsed = measure(state, 0, 'Z', draw=0.7)
        assert outcome == -1
        assert collapsed.allclose(StateVector.from_product([KET_1]))

    def test_x_measure_plus_state(self):
        outcome, _ = measure(StateVector.from_product([KET_PLUS]), 0, 'X', draw=0.99)
        assert outcome == +1


class TestPauli:
    def test_apply_pauli_matches_matrix(self):
        rng = np.random.default_rng(11)
        amps = rng.normal(size=4) + 1j * rng.normal(size=4)
        state = StateVector(2, amps / np.linalg.norm(amps))
        pauli = PauliString.from_label('XY')
        out = apply_pauli(state, pauli)
        # Qubit 0 is the least significant bit, so the matrix is ordered (q1, q0)
        expected = np.kron(PauliString.from_label('Y').to_matrix(), PauliString.from_label('X').to_matrix())
        assert_allclose(out.amplitudes, expected @ state.amplitudes, atol=1e-12)

    def test_expectation_of_h_state(self):
        state = StateVector.from_product([KET_H])
        x = pauli_expectation(state, PauliString.from_label('X'))
        z = pauli_expectation(state, PauliString.from_label('Z'))
        assert x == pytest.approx(1 / np.sqrt(2))
        assert z == pytest.approx(1 / np.sqrt(2))


class TestDensity:
    def test_accumulate_and_trace(self):
        samples = [StateVector.from_product([KET_0, KET_H]), StateVector.from_product([KET_1, KET_H])]
        rho = accumulate_density(samples)
        assert rho.is_valid()
        reduced = partial_trace(rho, 1, 2)
        assert_allclose(reduced.entries, np.outer(KET_H, KET_H.conj()), atol=1e-12)
        mixed = partial_trace(rho, 0, 2)
        assert_allclose(mixed.entries, np.eye(2) / 2, atol=1e-12)

    def test_empty_samples(self):
        with pytest.raises(ValueError):
            accumulate_density([])
