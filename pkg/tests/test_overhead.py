import pytest

from src.analysis.fits import load_fits
from src.analysis.overhead import (AT_LEAST_TWO, MekAcceptance, OverheadInputs, RepeatAverages, compare_schemes,
                                   gate_overhead_detect, gate_primitives, mek_overhead, min_level_for_target,
                                   qubit_overhead_detect, solve_parallel_counts, teleport_bound)
from src.errors import ProbabilityOverflowError, UnreachableTargetError


def _inputs(level, accept=1.0, **kwargs):
    return OverheadInputs(level=level, p=1e-4, acceptance={l: accept for l in range(1, level + 1)}, **kwargs)


class TestParallelCounts:
    def test_at_least_one(self):
        assert solve_parallel_counts(0.5, 0.99) == 7

    def test_at_least_two(self):
        assert solve_parallel_counts(0.5, 0.99, AT_LEAST_TWO) == 11

    def test_certain_acceptance(self):
        assert solve_parallel_counts(1.0, 0.999) == 1
        assert solve_parallel_counts(1.0, 0.999, AT_LEAST_TWO) == 2

    def test_unreachable(self):
        with pytest.raises(UnreachableTargetError):
            solve_parallel_counts(1e-6, 0.999)

    @pytest.mark.parametrize("p_a,target", [(0.0, 0.9), (0.5, 1.0)])
    def test_bad_arguments(self, p_a, target):
        with pytest.raises(ValueError):
            solve_parallel_counts(p_a, target)


class TestDetectOverhead:
    def test_level_one_qubits(self):
        assert qubit_overhead_detect(_inputs(1, 0.8)).qubits == pytest.approx(12.5)
        assert qubit_overhead_detect(_inputs(1)).qubits == pytest.approx(10.0)

    def test_level_one_primitives(self):
        level_one = gate_primitives(_inputs(1))[1]
        assert level_one.ec1 == 66
        assert level_one.t == 29
        assert level_one.h_nf == 24
        assert level_one.h_meas == 218
        assert level_one.zero == 103

    def test_level_one_gates(self):
        report = gate_overhead_detect(_inputs(1))
        assert report.gates == pytest.approx(24 + 218 + 132)

    def test_costs_grow_with_level(self):
        qubits = [qubit_overhead_detect(_inputs(level, 0.99)).qubits for level in (1, 2, 3)]
        gates = [gate_overhead_detect(_inputs(level, 0.99)).gates for level in (1, 2, 3)]
        assert qubits == sorted(qubits) and len(set(qubits)) == 3
        assert gates == sorted(gates) and len(set(gates)) == 3

    def test_pinned_counts(self):
        report = qubit_overhead_detect(_inputs(2, 0.99, m1={2: 3}, m2={2: 4}))
        assert report.details['m1_l2'] == 3
        assert report.details['m2_l2'] == 4
        assert report.qubits == pytest.approx(sum(report.qubit_breakdown.values()))

    def test_repeats_feed_primitives(self):
        base = gate_overhead_detect(_inputs(1)).gates
        busy = gate_overhead_detect(_inputs(1, repeats={1: RepeatAverages(n_rec1=1.5)})).gates
        assert busy == pytest.approx(base)
        heavy = gate_primitives(_inputs(1, repeats={1: RepeatAverages(n_zs0=1.0)}))[1]
        assert heavy.zero == 103 + 65

    def test_validation(self):
        with pytest.raises(ValueError):
            _inputs(4)
        with pytest.raises(ValueError):
            _inputs(2, m2={2: 1})
        with pytest.raises(ValueError):
            RepeatAverages(n_rec1=0.5)
        with pytest.raises(ProbabilityOverflowError):
            qubit_overhead_detect(_inputs(1, 0.0))


class TestMek:
    def test_level_two_qubits(self):
        report = mek_overhead('full', 1e-4, MekAcceptance(), level=2)
        assert report.qubits == pytest.approx(667.5)
        assert report.details['n_q02'] == 243
        assert report.details['numerator'] == 1335

    def test_level_three_needs_more(self):
        accept = MekAcceptance()
        assert mek_overhead('full', 1e-4, accept).qubits > mek_overhead('full', 1e-4, accept, level=2).qubits

    def test_hybrid(self):
        report = mek_overhead('hybrid', 1e-4, MekAcceptance(), _inputs(3, 0.99))
        assert report.level == 3
        assert report.details['n_q23'] > 2 * 11 ** 3

    def test_level_four(self):
        accept = MekAcceptance()
        report = mek_overhead('full', 1e-4, accept, level=4)
        assert report.level == 4
        assert 'n_q34' in report.details
        assert report.qubits > mek_overhead('full', 1e-4, accept, level=3).qubits

    def test_bad_variant(self):
        with pytest.raises(ValueError):
            mek_overhead('triple', 1e-4, MekAcceptance())
        with pytest.raises(ValueError):
            mek_overhead('full', 1e-4, MekAcceptance(), level=1)
        with pytest.raises(ValueError):
            mek_overhead('full', 1e-4, MekAcceptance(), level=5)

    def test_zero_acceptance(self):
        with pytest.raises(ProbabilityOverflowError):
            mek_overhead('full', 1e-4, MekAcceptance(level2=0.0))


class TestTeleportBound:
    def test_level_one(self):
        assert teleport_bound(1, 1e-3, [1e-4], 10) == pytest.approx(3e-4 + 1e-2 + 4e-3)

    def test_wrong_length(self):
        with pytest.raises(ValueError):
            teleport_bound(2, 1e-3, [1e-4], 10)

    def test_increasing_bounds(self):
        with pytest.raises(ValueError):
            teleport_bound(1, 1e-3, [1e-2], 10)


class TestComparison:
    @pytest.fixture(scope="class")
    def golden(self):
        return load_fits()

    def test_min_level(self, golden):
        assert min_level_for_target(5e-5, 1e-9, 'detect', golden) == 3
        assert min_level_for_target(4e-5, 1e-8, 'detect', golden) == 2
        assert min_level_for_target(5e-5, 1e-9, 'mek', golden) == 4
        assert min_level_for_target(4e-5, 1e-8, 'mek', golden) == 3

    def test_unreachable_schemes_skipped(self, golden):
        reports = compare_schemes(5e-5, 1e-9, golden)
        assert [r.scheme for r in reports] == ['detect', 'mek-full']
        assert reports[0].level == 3
        assert reports[1].level == 4
        assert reports[0].details['target'] == 1e-9

    def test_detect_cheaper_than_distillation(self, golden):
        reports = {r.scheme: r for r in compare_schemes(4e-5, 1e-8, golden)}
        assert set(reports) == {'detect', 'mek-full', 'mek-hybrid'}
        assert reports['detect'].qubits < reports['mek-full'].qubits
        assert reports['detect'].qubits < reports['mek-hybrid'].qubits

    def test_distillation_overhead_ratio(self, golden):
        reports = {r.scheme: r for r in compare_schemes(5e-5, 1e-9, golden)}
        detect, mek = reports['detect'], reports['mek-full']
        assert mek.qubits / detect.qubits > 40
        assert mek.gates / detect.gates >= 100

    def test_unknown_scheme(self, golden):
        with pytest.raises(ValueError):
            min_level_for_target(1e-4, 1e-9, 'magic', golden)
