import pytest

from src.analysis.fits import (ACCEPT, ErrorModelFit, fit_error_model, fit_estimate_records, gamma_recursion,
                               load_fits, load_unassigned_acceptance, round2_piecewise, round3_distilled, save_fits)
from src.errors import FitError, ProbabilityOverflowError


@pytest.fixture(scope="module")
def golden():
    return load_fits()


class TestGolden:
    def test_detect_level_one(self, golden):
        fit = golden['detect-l1']
        p = 1e-3
        assert fit.acceptance(p) == pytest.approx((1 - p) ** 75)
        assert fit.total(p) == pytest.approx((9.95 + 4.41 + 7.87) * p ** 2)

    def test_missing_class_is_zero(self, golden):
        assert golden['mek-hybrid-l3'].evaluate('Y', 1e-4) == 0.0

    def test_range_guard(self, golden):
        with pytest.raises(ProbabilityOverflowError):
            golden['detect-l3'].check_range(1e-3)

    def test_piecewise(self, golden):
        model = round2_piecewise(golden)
        p = 1e-4
        pieces = [golden['mek-round2-ideal-stabilizer-l3'], golden['mek-round2-ideal-h-l3']]
        assert model.acceptance(p) == pytest.approx(min(piece.acceptance(p) for piece in pieces))
        assert model.total(p) == pytest.approx(sum(piece.total(p) for piece in pieces))
        assert model.valid_p_max == pytest.approx(5e-3)

    def test_third_round_squares_the_second(self, golden):
        model = round3_distilled(golden)
        p = 5e-5
        assert model.quadratic == pytest.approx(302.0)
        assert model.total(p) == pytest.approx(302.0 * round2_piecewise(golden).total(p) ** 2)
        assert model.acceptance(p) == pytest.approx(round2_piecewise(golden).acceptance(p))

    def test_unassigned_rows_kept(self):
        rows = load_unassigned_acceptance()
        assert len(rows) == 4
        assert rows[0][1] == (1, -73.8)


class TestFitting:
    def test_quadratic(self):
        data = [(p, 10 * p ** 2, 1e-9) for p in (1e-3, 2e-3, 3e-3)]
        fit = fit_error_model(data, [2])
        assert fit.evaluate('total', 1e-3) == pytest.approx(1e-5, rel=1e-6)

    def test_recursion(self):
        fit = ErrorModelFit('toy', {'total': [(2, 10.0)]})
        assert gamma_recursion(fit, 1e-3, 2) == pytest.approx([1e-5, 1e-9])

    def test_recursion_leaves_range(self):
        fit = ErrorModelFit('toy', {'total': [(1, 10.0)]}, valid_p_max=1e-2)
        with pytest.raises(ProbabilityOverflowError):
            gamma_recursion(fit, 5e-3, 2)

    def test_too_few_points(self):
        with pytest.raises(FitError):
            fit_error_model([(1e-3, 1e-5, 1e-7)], [1, 2])

    def test_negative_coefficient_warns(self):
        data = [(p, -p, 1e-6) for p in (1e-3, 2e-3)]
        with pytest.warns(UserWarning):
            fit_error_model(data, [1])

    def test_records(self):
        records = [
            {'p': p, 'px': 5 * p ** 2, 'px_err': 1e-8, 'py': 2 * p ** 2, 'py_err': 1e-8,
             'pz': 3 * p ** 2, 'pz_err': 1e-8, 'accept': 1 - 75 * p, 'accept_err': 1e-6}
            for p in (1e-3, 2e-3, 4e-3)
        ]
        fit = fit_estimate_records(records, [2], name='toy')
        assert fit.evaluate('X', 2e-3) == pytest.approx(5 * 4e-6, rel=1e-6)
        assert fit.acceptance(2e-3) == pytest.approx(1 - 0.15, rel=1e-6)
        assert fit.valid_p_max == pytest.approx(4e-3)
        assert ACCEPT not in fit.error_classes

    def test_save_and_load(self, tmp_path):
        fit = ErrorModelFit('toy', {'X': [(2, 3.0)], ACCEPT: [(0, 1.0), (1, -1.0)]}, accept_power=10)
        path = tmp_path / "fits.yaml"
        save_fits({'toy': fit}, path, source='https://example.org/data')
        loaded = load_fits(path)['toy']
        assert loaded.total(1e-3) == pytest.approx(fit.total(1e-3))
        assert loaded.acceptance(1e-3) == pytest.approx(0.999 ** 10)
