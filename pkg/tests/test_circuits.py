import pytest

from src.circuits.circuit import Circuit, Location, hadamard_dual, location_census
from src.circuits.ec import ec1, ec2, x_round, z_round
from src.circuits.frame import run_frame
from src.circuits.gadgets import (CORRECT_ORDER, color17_hmeas_2flag, h_prep_nonft, hmeas_correct, hmeas_detect,
                                  hmeas_with_T, resource_schedule, t_gadget)
from src.circuits.protocols import PROTOCOLS, decoder_circuit, get_protocol, mek_circuit, plus_encoder
from src.circuits.support import controlled_h_positions, spread
from src.errors import CircuitFormatError, QubitIndexError
from src.pauli.noise import FaultEvent, FaultLocation
from src.pauli.paulistring import PauliString
from src.statevec.gates import GateKind


class TestCensus:
    def test_ec1(self):
        census = location_census(ec1().circuit)
        assert census[GateKind.IDLE] == 46
        assert census[GateKind.CNOT] == 14
        assert census[GateKind.PREP_0] == 2
        assert census[GateKind.PREP_PLUS] == 1
        assert census[GateKind.MEAS_Z] == 2
        assert census[GateKind.MEAS_X] == 1

    def test_ec2_is_dual(self):
        census = location_census(ec2().circuit)
        assert census[GateKind.PREP_0] == 1
        assert census[GateKind.PREP_PLUS] == 2
        assert census[GateKind.CNOT] == 14

    def test_h_prep(self):
        census = location_census(h_prep_nonft())
        assert census[GateKind.CNOT] == 11
        assert census[GateKind.IDLE] == 6
        assert census[GateKind.PREP_PLUS] == 3
        assert census[GateKind.PREP_0] == 3
        assert census[GateKind.PREP_H] == 1

    def test_unflagged_z_round(self):
        census = location_census(z_round(False).circuit)
        assert census[GateKind.IDLE] == 48
        assert census[GateKind.CNOT] == 11

    def test_hadamard_measurement(self):
        census = location_census(hmeas_detect().circuit)
        assert census[GateKind.IDLE] == 191
        assert census[GateKind.CZ] == 7
        assert census[GateKind.T] == 7
        assert census[GateKind.T_DAG] == 7
        assert census[GateKind.CNOT] == 2
        assert census[GateKind.PREP_PLUS] == 1
        assert census[GateKind.PREP_0] == 1
        assert census[GateKind.MEAS_X] == 1
        assert census[GateKind.MEAS_Z] == 1
        assert sum(census.values()) == 218

    def test_gadget_measurement_resources(self):
        assert resource_schedule(hmeas_with_T().circuit) == {1: 2, 2: 6}

    def test_resources_with_encoded_h(self):
        assert resource_schedule(h_prep_nonft(), hmeas_with_T().circuit) == {1: 3, 2: 6}

    def test_gadget_measurement_ends_with_readout(self):
        hm = hmeas_with_T()
        last = {loc.kind for loc in hm.circuit.timesteps[-1] if loc.kind is not GateKind.IDLE}
        assert last == {GateKind.MEAS_X, GateKind.MEAS_Z}
        assert location_census(hm.circuit)[GateKind.CZ] == 7

    def test_correct_measurement_flags(self):
        hm = hmeas_correct()
        assert sorted(hm.flags) == ['f0', 'f1', 'f2', 'f3']
        assert hm.order == CORRECT_ORDER
        assert hm.circuit.num_qubits == 11

    def test_color17_measurement(self):
        hm = color17_hmeas_2flag()
        assert location_census(hm.circuit)[GateKind.CH] == 17
        assert hm.circuit.num_qubits == 22


class TestCircuit:
    def test_text_format(self):
        circuit = t_gadget(-1)
        restored = Circuit.from_text(circuit.to_text())
        assert restored.to_text() == circuit.to_text()
        assert restored.timesteps[-1][0].cond == circuit.timesteps[-1][0].cond

    def test_bad_header(self):
        with pytest.raises(CircuitFormatError):
            Circuit.from_text("step 0\nH 0\n")

    def test_text_is_versioned(self):
        assert t_gadget().to_text().startswith("version 1\n")

    def test_unsupported_version(self):
        text = t_gadget().to_text().replace("version 1", "version 2", 1)
        with pytest.raises(CircuitFormatError):
            Circuit.from_text(text)

    def test_missing_version(self):
        text = t_gadget().to_text().split("\n", 1)[1]
        with pytest.raises(CircuitFormatError):
            Circuit.from_text(text)

    def test_qubit_reuse_in_layer(self):
        circuit = Circuit('clash', 2)
        with pytest.raises(QubitIndexError):
            circuit.add_timestep([Location(GateKind.H, (0,)), Location(GateKind.CNOT, (0, 1))])

    def test_dual_rejects_non_css_gate(self):
        with pytest.raises(CircuitFormatError):
            hadamard_dual(h_prep_nonft(), 'dual')

    def test_plus_encoder(self):
        census = location_census(plus_encoder())
        assert census[GateKind.PREP_PLUS] == 4
        assert census[GateKind.PREP_0] == 3
        assert census[GateKind.CNOT] == 8

    def test_decoder(self):
        census = location_census(decoder_circuit())
        assert census[GateKind.CNOT] == 8
        assert census[GateKind.MEAS_Z] == 3
        assert GateKind.PREP_0 not in census

    def test_mek_circuit(self):
        census = location_census(mek_circuit())
        assert census[GateKind.PREP_H] == 2
        assert census[GateKind.CZ] == 4


class TestFrame:
    def test_data_error_flips_z_checks(self):
        rnd = ec1()
        _, record = run_frame(rnd.circuit, initial=PauliString.single(10, 5, 'X'))
        assert rnd.pattern(record) == '+--'
        assert rnd.generator_bits(record) == {0: 0, 4: 1, 5: 1}

    def test_clean_round_is_trivial(self):
        for rnd in (ec1(), ec2(), z_round(True), x_round(True)):
            _, record = run_frame(rnd.circuit)
            assert not rnd.nontrivial(record)


class TestSpread:
    def _first_cz(self, hm):
        for t, slot, loc in hm.circuit.locations():
            if loc.kind is GateKind.CZ:
                return FaultLocation(t, slot, loc.kind, loc.qubits)

    def test_y_on_data_flips_outcome(self):
        hm = hmeas_detect()
        error = spread(hm, initial=PauliString.single(9, 0, 'Y'))
        assert error.outcome_flipped
        assert error.pauli.to_label() == 'YIIIIII'
        assert not error.fired

    def test_x_on_data_is_scrambled(self):
        error = spread(hmeas_detect(), initial=PauliString.single(9, 0, 'X'))
        assert error.arbitrary == frozenset({0})
        assert error.weight() == 1

    def test_control_fault_spreads_hadamards(self):
        hm = hmeas_detect()
        fault = FaultEvent(self._first_cz(hm), PauliString.from_label('XI'))
        error = spread(hm, [fault])
        assert error.fired == frozenset({'f0'})
        assert error.hadamard_set() == frozenset({0})
        assert error.weight() == 1
        assert len(list(error.branches())) == 2

    def test_controlled_h_positions(self):
        hm = hmeas_detect()
        assert len(controlled_h_positions(hm, 0)) == 3


class TestRegistry:
    def test_every_protocol_builds(self):
        for name in PROTOCOLS:
            protocol = get_protocol(name)
            assert protocol.circuits()

    def test_unknown_protocol(self):
        with pytest.raises(KeyError):
            get_protocol('nonsense')
