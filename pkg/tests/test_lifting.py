import pytest

from src.analysis.fits import ErrorModelFit, load_fits
from src.engine.lifting import (ComposedFit, LiftedNoise, RecProtocol, StagedNoise, level_lift, location_group,
                                noise_for_level, protocol_for_level)
from src.engine.trials import run_trials
from src.errors import ProbabilityOverflowError
from src.pauli.noise import MEASUREMENT_FLIP, NoiseModel
from src.statevec.gates import GateKind


def _quadratic(name='toy', coefficient=10.0):
    return ErrorModelFit(name, {'total': [(2, coefficient)]})


class TestLevelLift:
    def test_groups(self):
        assert location_group(GateKind.CNOT) == 'two_qubit'
        assert location_group(GateKind.PREP_H) == 'H'
        assert location_group(GateKind.MEAS_X) == 'meas'
        assert location_group(GateKind.IDLE) == 'idle'
        assert location_group(GateKind.T) == 'single'

    def test_two_qubit_channel(self):
        noise = level_lift({'two_qubit': _quadratic()}, 1e-2)
        channel = noise.channel(GateKind.CNOT)
        assert len(channel) == 15
        assert noise.total_probability(GateKind.CNOT) == pytest.approx(1e-3)

    def test_measurement_is_a_flip(self):
        fit = ErrorModelFit('m', {'X': [(1, 0.1)]})
        noise = level_lift({'meas': fit}, 1e-2)
        assert noise.channel(GateKind.MEAS_Z) == [(pytest.approx(1e-3), MEASUREMENT_FLIP)]

    def test_missing_kind(self):
        noise = level_lift({'two_qubit': _quadratic()}, 1e-2)
        with pytest.raises(KeyError):
            noise.channel(GateKind.H)

    def test_class_arity_mismatch(self):
        with pytest.raises(ValueError):
            level_lift({'two_qubit': ErrorModelFit('bad', {'X': [(1, 1.0)]})}, 1e-2)

    def test_overflow(self):
        with pytest.raises(ProbabilityOverflowError):
            LiftedNoise(0.1, {GateKind.H: [(0.6, 'flip'), (0.5, 'flip')]})

    def test_composed_fit(self):
        composed = ComposedFit(_quadratic(), depth=2)
        assert composed.total(1e-3) == pytest.approx(1e-9)
        assert composed.name == 'toy^2'


class TestNoiseForLevel:
    def test_level_one_is_physical(self):
        assert isinstance(noise_for_level(1, 1e-3), NoiseModel)

    def test_level_two_needs_models(self):
        with pytest.raises(ValueError):
            noise_for_level(2, 1e-3)

    def test_level_two(self):
        h_fits = {1: load_fits()['detect-l1']}
        noise = noise_for_level(2, 1e-3, rec_fits={'two_qubit': _quadratic()}, h_fits=h_fits)
        assert noise.total_probability(GateKind.CNOT) == pytest.approx(1e-5)
        assert noise.total_probability(GateKind.T) == pytest.approx(h_fits[1].total(1e-3))

    def test_starred_stages(self):
        h_fits = {1: load_fits()['detect-l1']}
        noise = noise_for_level(2, 1e-3, rec_fits={'two_qubit': _quadratic()}, h_fits=h_fits,
                                starred_rec_fits={'two_qubit': _quadratic('inner', 1.0)})
        assert isinstance(noise, StagedNoise)
        assert noise.for_stage('hmeas').total_probability(GateKind.CNOT) == pytest.approx(1e-6)
        assert noise.for_stage('ec1').total_probability(GateKind.CNOT) == pytest.approx(1e-5)

    def test_gadget_scheme_above_level_one(self):
        assert protocol_for_level('detect', 2).name == 'detect_T'
        assert protocol_for_level('detect', 1).name == 'detect'


class TestRec:
    def test_register_sizes(self):
        assert RecProtocol(GateKind.CNOT).num_qubits == 17
        assert RecProtocol(GateKind.PREP_0).num_qubits == 11
        assert RecProtocol(GateKind.H).num_qubits == 10

    def test_noiseless_rec(self):
        result = run_trials(RecProtocol(GateKind.H), NoiseModel(0.0), 5, seed=1)
        assert result.accepted == 5
        assert result.class_counts == {'I': 5}
