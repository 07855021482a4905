import numpy as np
import pytest

from src.circuits.protocols import SteaneEC, get_protocol
from src.codes.stabilizer import steane
from src.engine.trials import (CSV_COLUMNS, EstimateResult, RateEstimate, Tally, classify_logical,
                               clopper_pearson, extract_channel, frame_logical_class, h_channel_state, run_trials)
from src.engine.executors import FrameExecutor, StateVectorExecutor, trial_rng
from src.errors import ClassificationError, DimensionMismatchError, FrameUnavailableError
from src.pauli.noise import NoiseModel
from src.pauli.paulistring import PauliString
from src.statevec.gates import KET_H, KET_PLUS, PAULI_Y
from src.statevec.simulator import DensityMatrix, StateVector


class TestStatistics:
    def test_clopper_pearson_zero_successes(self):
        low, high = clopper_pearson(0, 10)
        assert low == 0.0
        assert high == pytest.approx(1 - 0.025 ** 0.1, rel=1e-6)

    def test_rare_counts_are_exact(self):
        assert RateEstimate.from_counts(3, 1000).method == 'clopper-pearson'

    def test_normal_interval(self):
        est = RateEstimate.from_counts(500, 1000)
        assert est.method == 'normal'
        assert est.err == pytest.approx(np.sqrt(0.25 / 1000))

    def test_no_trials(self):
        assert RateEstimate.from_counts(0, 0).method == 'empty'


class TestClassification:
    def test_pauli_images(self):
        reference = StateVector.from_product([KET_H])
        assert classify_logical(reference, reference) == 'I'
        assert classify_logical(StateVector.from_product([PAULI_Y @ KET_H]), reference) == 'Y'

    def test_not_a_pauli_image(self):
        reference = StateVector.from_product([KET_H])
        with pytest.raises(ClassificationError):
            classify_logical(StateVector.from_product([KET_PLUS]), reference)

    def test_frame_classes(self):
        code = steane()
        logical_x = PauliString.from_label('XXXXXXX')
        assert frame_logical_class(logical_x, code) == 'X'
        assert frame_logical_class(logical_x, code, (KET_PLUS,)) == 'I'
        assert frame_logical_class(PauliString.single(7, 4, 'Y'), code) == 'I'

    def test_channel_recovery(self):
        p_x, p_z = extract_channel(h_channel_state(0.01, 0.02))
        assert p_x == pytest.approx(0.01)
        assert p_z == pytest.approx(0.02)

    def test_channel_needs_one_qubit(self):
        with pytest.raises(DimensionMismatchError):
            extract_channel(DensityMatrix(np.eye(4) / 4))


class TestRunTrials:
    def test_noiseless_runs_accept(self):
        result = run_trials(SteaneEC('detect'), NoiseModel(0.0), 20, seed=1)
        assert result.accepted == 20
        assert result.logical_error.value == 0.0
        assert result.repeat_stats['n_rec1'] == 1.0

    def test_noiseless_teleport_is_exact(self):
        result = run_trials(get_protocol('teleport'), NoiseModel(0.0), 8, seed=5)
        assert result.accepted == 8
        assert result.logical_error.value == 0.0

    def test_thread_count_does_not_change_results(self):
        protocol = SteaneEC('detect')
        one = run_trials(protocol, NoiseModel(2e-2), 600, seed=7, threads=1)
        two = run_trials(protocol, NoiseModel(2e-2), 600, seed=7, threads=3)
        assert one.accepted == two.accepted
        assert one.class_counts == two.class_counts
        assert one.repeat_totals == two.repeat_totals
        assert one.accepted < 600

    def test_record_columns(self):
        record = run_trials(SteaneEC('correct'), NoiseModel(1e-2), 50, seed=3).to_record()
        assert set(record) == set(CSV_COLUMNS)
        assert record['trials'] == 50

    def test_rejects_empty_run(self):
        with pytest.raises(ValueError):
            run_trials(SteaneEC('detect'), NoiseModel(0.0), 0, seed=1)

    def test_from_empty_tally(self):
        result = EstimateResult.from_tally('none', 1e-3, Tally())
        assert result.mean_faults == 0.0
        assert result.acceptance.method == 'empty'


class TestExecutors:
    def test_state_vector_has_no_frame(self):
        with pytest.raises(FrameUnavailableError):
            StateVectorExecutor(2).error([0])

    def test_frame_error_tracks_corrections(self):
        ex = FrameExecutor(2)
        assert ex.error([0, 1]).is_identity()
        ex.correct(PauliString.from_label('X'), [1])
        assert ex.error([0, 1]).to_label() == 'IX'

    def test_protocol_reads_frame(self):
        protocol = SteaneEC('detect')
        ex = FrameExecutor(protocol.num_qubits)
        result = protocol.execute(ex)
        assert protocol.frame_error(ex, result).is_identity()

    def test_trial_stream_replays(self):
        first = trial_rng(11, 3).random(5)
        assert np.array_equal(first, trial_rng(11, 3).random(5))
        assert not np.array_equal(first, trial_rng(11, 4).random(5))
