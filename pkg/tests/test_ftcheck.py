import pytest

from src.circuits.ec import ec1, ec2, x_round, z_round
from src.circuits.gadgets import color17_hmeas_2flag, hmeas_detect
from src.circuits.protocols import DetectScheme
from src.codes.stabilizer import color_17, steane
from src.errors import EnumerationBudgetError
from src.ftcheck.flags import (EC1_HOOKS, check_flag_property, check_hooks, hook_errors, hook_of,
                               without_flag_couplings)
from src.ftcheck.ordering import distinguishability_search, find_collision
from src.ftcheck.prep import CASE_TABLE, check_state_prep_ft, signs
from src.ftcheck.report import FtReport, Violation


@pytest.fixture(scope="module")
def code():
    return steane()


class TestHooks:
    def test_ec1_hooks(self, code):
        expected = {hook_of(letter, support, code) for letter, support in EC1_HOOKS}
        assert hook_errors(ec1(), code) == expected

    def test_check_hooks_passes(self, code):
        report = check_hooks(ec1(), code)
        assert report.passed
        assert report.target == 'ec1_hooks'

    def test_missing_hook_reported(self, code):
        report = check_hooks(ec1(), code, expected=EC1_HOOKS[:2])
        assert len(report.violations) == 1
        assert report.violations[0].detail == "unexpected hook"


class TestFlagProperty:
    @pytest.mark.parametrize("make", [ec1, ec2])
    def test_ec_halves(self, make, code):
        assert check_flag_property(make(), code, v_max=1).passed

    @pytest.mark.parametrize("make", [z_round, x_round])
    def test_flagged_rounds(self, make, code):
        assert check_flag_property(make(True), code, v_max=1).passed

    def test_hadamard_measurement(self, code):
        report = check_flag_property(hmeas_detect(), code, v_max=1)
        assert report.passed
        assert report.checked_fault_sets > 0

    def test_unflagged_measurement_is_caught(self, code):
        report = check_flag_property(without_flag_couplings(hmeas_detect()), code, v_max=1)
        assert not report.passed

    def test_bad_weight(self, code):
        with pytest.raises(ValueError):
            check_flag_property(ec1(), code, v_max=3)

    def test_pair_budget(self, code):
        with pytest.raises(EnumerationBudgetError):
            check_flag_property(hmeas_detect(), code, v_max=2, budget=10)

    @pytest.mark.slow
    def test_color17_two_faults(self):
        assert check_flag_property(color17_hmeas_2flag(), color_17(), v_max=2).passed


class TestOrdering:
    def test_single_flag_measurement_collides(self, code):
        collision = find_collision(hmeas_detect(), code)
        assert collision is not None
        assert not code.in_stabilizer_group(collision.first * collision.second)

    def test_search_filters_orderings(self, code):
        orders = [(0, 1, 2, 3, 4, 5, 6), (6, 5, 4, 3, 2, 1, 0)]
        assert distinguishability_search(hmeas_detect, orders, code=code) == []


class TestReport:
    def test_merge_and_dict(self):
        first = FtReport('a', checked_fault_sets=3)
        second = FtReport('b', checked_fault_sets=2, violations=[Violation(('x',), 'XI', '+', 1)])
        merged = first.merge(second)
        assert merged.target == 'a'
        assert merged.checked_fault_sets == 5
        assert not merged.passed
        assert merged.to_dict()['violations'][0]['error'] == 'XI'

    def test_save(self, tmp_path):
        path = tmp_path / "nested" / "report.json"
        FtReport('t').save(path)
        assert path.exists()


class TestCaseTable:
    def test_majority_rows(self):
        assert signs([1, -1, -1]) == '+--'
        assert CASE_TABLE['+++'] == 'I'
        assert CASE_TABLE['---'] == 'Y'

    @pytest.mark.slow
    def test_detect_scheme_is_fault_tolerant(self):
        assert check_state_prep_ft(DetectScheme(), t=1).passed
