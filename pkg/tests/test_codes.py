import numpy as np
import pytest
from numpy.testing import assert_array_equal

from src.codes.decoder import extract_logical, ideal_decode, lookup_table
from src.codes.stabilizer import StabilizerCode, color_17, four_two_two, steane, syndrome
from src.errors import DecoderError
from src.pauli.paulistring import PauliString
from src.statevec.gates import KET_H
from src.statevec.simulator import StateVector, apply_pauli, pauli_expectation


@pytest.fixture(scope="module")
def code():
    return steane()


class TestSteane:
    def test_parameters(self, code):
        assert (code.n, code.k, code.d) == (7, 1, 3)
        assert code.is_css
        assert code.t == 1

    def test_x_error_syndrome_comes_first(self, code):
        bits = syndrome(code, PauliString.single(7, 0, 'X'))
        assert_array_equal(bits, [1, 0, 0, 0, 0, 0])

    def test_y_error_trips_both_halves(self, code):
        bits = syndrome(code, PauliString.single(7, 6, 'Y'))
        assert_array_equal(bits, [1, 1, 1, 1, 1, 1])

    def test_reduced_weight(self, code):
        error = PauliString.x_type(7, [2, 4, 6])
        assert code.reduced_weight(error) == (1, 0)
        assert code.reduced_weight(PauliString.from_label('XXZIIII')) == (2, 1)

    def test_stabilizer_membership(self, code):
        assert code.in_stabilizer_group(PauliString.z_type(7, [0, 2, 4, 6]))
        assert code.is_logical(PauliString.from_label('XXXXXXX'))
        assert not code.is_logical(PauliString.x_type(7, [3, 4, 5, 6]))


class TestLookup:
    def test_single_errors_corrected(self, code):
        table = lookup_table(code)
        assert len(table) == 64
        for q in range(7):
            for letter in 'XYZ':
                error = PauliString.single(7, q, letter)
                correction = table.lookup(syndrome(code, error))
                assert code.in_stabilizer_group(correction * error)

    def test_unknown_syndrome(self, code):
        table = lookup_table(code)
        with pytest.raises(DecoderError):
            table.lookup([0, 0, 0, 0, 0, 0], flags='x')


class TestEncoding:
    def test_zero_codeword_is_stabilized(self, code):
        state = StateVector(7, code.encode([1, 0]))
        for generator in code.generators + code.logical_z:
            assert pauli_expectation(state, generator) == pytest.approx(1.0)

    def test_ideal_decode_removes_single_error(self, code):
        encoded = StateVector(7, code.encode(KET_H))
        damaged = apply_pauli(encoded, PauliString.single(7, 3, 'Y'))
        logical, correction = ideal_decode(damaged, code, list(range(7)))
        assert logical.equal_up_to_phase(StateVector(1, KET_H))
        assert correction.to_label() == 'IIIYIII'

    def test_extract_rejects_non_codeword(self, code):
        with pytest.raises(DecoderError):
            extract_logical(StateVector.zero_state(7), code, list(range(7)))


class TestOtherCodes:
    def test_four_two_two(self):
        mek = four_two_two()
        assert (mek.n, mek.k, mek.d) == (4, 2, 2)
        assert mek.logical_basis.shape == (4, 16)

    def test_color_17_loads(self):
        color = color_17()
        assert (color.n, color.k, color.d) == (17, 1, 5)
        assert len(color.generators) == 16
        assert color.t == 2

    def test_anticommuting_generators_rejected(self):
        with pytest.raises(ValueError):
            StabilizerCode('broken', 2, 0, 1, [PauliString.from_label('XX'), PauliString.from_label('ZI')], [], [])

    def test_codewords_are_orthonormal(self):
        basis = four_two_two().logical_basis
        np.testing.assert_allclose(basis @ basis.conj().T, np.eye(4), atol=1e-12)
