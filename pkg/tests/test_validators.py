import math

from src.utils.validators import (validate_output_format, validate_probability, validate_protocol_name,
                                  validate_seed, validate_source_url, validate_trials)


class TestValidators:
    def test_probability(self):
        assert validate_probability(1e-3)
        assert validate_probability(0.0)
        assert not validate_probability(0.0, allow_zero=False)
        assert not validate_probability(1.0)
        assert not validate_probability(-1e-3)
        assert not validate_probability(math.nan)

    def test_trials(self):
        assert validate_trials(1)
        assert not validate_trials(0)
        assert not validate_trials(2.5)

    def test_protocol_name(self):
        assert validate_protocol_name('detect')
        assert validate_protocol_name('mek-round1')
        assert not validate_protocol_name('')
        assert not validate_protocol_name('steane-magic')

    def test_output_format(self):
        assert validate_output_format('CSV')
        assert validate_output_format('json')
        assert not validate_output_format('xlsx')

    def test_seed(self):
        assert validate_seed(0)
        assert not validate_seed(None)
        assert not validate_seed(-4)

    def test_source_url(self):
        assert validate_source_url(None)
        assert validate_source_url('https://example.org/fits/golden.yaml')
        assert not validate_source_url('not a url')
