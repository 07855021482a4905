import pytest

from src.circuits.circuit import Circuit, Location
from src.errors import DimensionMismatchError, EnumerationBudgetError
from src.pauli.noise import (MEASUREMENT_FLIP, FaultLocation, NoiseModel, count_fault_sets, enumerate_fault_sets,
                             fault_support, sample_fault)
from src.pauli.paulistring import PauliString, product
from src.statevec.gates import GateKind


class TestPauliString:
    def test_label_phase(self):
        p = PauliString.from_label('-iXZ')
        assert p.phase == -1j
        assert p.to_label() == '-iXZ'

    def test_xz_is_minus_i_y(self):
        out = PauliString.from_label('X') * PauliString.from_label('Z')
        assert out == PauliString.from_label('-iY')

    def test_yy_is_identity(self):
        out = PauliString.from_label('YY') * PauliString.from_label('YY')
        assert out.is_identity()
        assert out.phase == 1

    def test_commutation(self):
        assert PauliString.from_label('XX').commutes_with(PauliString.from_label('ZZ'))
        assert not PauliString.from_label('XI').commutes_with(PauliString.from_label('ZI'))

    def test_weight_and_support(self):
        p = PauliString.from_label('IXIYZ')
        assert p.weight() == 3
        assert p.support() == [1, 3, 4]

    def test_embed_and_restrict(self):
        small = PauliString.from_label('XZ')
        big = small.embed(5, [3, 1])
        assert big.to_label() == 'IZIXI'
        assert big.restrict([3, 1]) == small

    def test_length_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            PauliString.from_label('X') * PauliString.from_label('XX')

    def test_empty_product_needs_size(self):
        assert product([], n=3).is_identity()
        with pytest.raises(ValueError):
            product([])


class TestNoiseModel:
    def test_rates(self):
        model = NoiseModel(1e-3)
        assert model.total_probability(GateKind.IDLE) == pytest.approx(1e-5)
        assert model.total_probability(GateKind.PREP_0) == pytest.approx(2e-3 / 3)
        assert model.total_probability(GateKind.MEAS_X) == pytest.approx(2e-3 / 3)
        assert model.total_probability(GateKind.T) == pytest.approx(1e-3)

    def test_two_qubit_channel_is_uniform(self):
        channel = NoiseModel(1.5e-3).channel(GateKind.CNOT)
        assert len(channel) == 15
        assert all(prob == pytest.approx(1e-4) for prob, _ in channel)

    def test_supports(self):
        assert fault_support(GateKind.MEAS_Z) == [MEASUREMENT_FLIP]
        assert fault_support(GateKind.PREP_0) == [PauliString.from_label('X')]
        assert fault_support(GateKind.PREP_PLUS) == [PauliString.from_label('Z')]
        assert len(fault_support(GateKind.H)) == 3

    @pytest.mark.parametrize("p", [-0.1, 1.0])
    def test_rejects_bad_rate(self, p):
        with pytest.raises(ValueError):
            NoiseModel(p)

    def test_sample_fault(self):
        location = FaultLocation(0, 0, GateKind.H, (0,))
        model = NoiseModel(0.3)
        assert sample_fault(location, model, 0.05).effect == PauliString.from_label('X')
        assert sample_fault(location, model, 0.25).effect == PauliString.from_label('Z')
        assert sample_fault(location, model, 0.5) is None


class TestEnumeration:
    def _circuit(self):
        circuit = Circuit('tiny', 3)
        circuit.add_timestep([Location(GateKind.CNOT, (0, 1)), Location(GateKind.MEAS_Z, (2,))])
        return circuit

    def test_counts(self):
        locations = self._circuit().fault_locations()
        assert count_fault_sets(locations, 1) == 16
        assert count_fault_sets(locations, 2) == 31

    def test_enumeration_matches_count(self):
        circuit = self._circuit()
        assert len(list(enumerate_fault_sets(circuit, 2))) == 31

    def test_budget(self):
        with pytest.raises(EnumerationBudgetError):
            list(enumerate_fault_sets(self._circuit(), 2, budget=20))
