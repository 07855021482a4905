import pytest

from src.utils.config import TOLERANCES, RunConfig, load_config


class TestLoadConfig:
    def test_packaged_defaults(self, monkeypatch):
        monkeypatch.delenv("FLAGMAGIC_OUTPUT_DIR", raising=False)
        config = load_config()
        assert config.trials == 10000
        assert config.p_values == [1e-3, 2e-3, 3e-3]
        assert config.output_dir == "output"
        assert config.seed is None

    def test_environment_output_dir(self, monkeypatch):
        monkeypatch.setenv("FLAGMAGIC_OUTPUT_DIR", "/tmp/flagmagic-out")
        assert load_config().output_dir == "/tmp/flagmagic-out"

    def test_file_and_overrides(self, tmp_path, monkeypatch):
        monkeypatch.setenv("FLAGMAGIC_OUTPUT_DIR", "from-env")
        path = tmp_path / "run.yaml"
        path.write_text("trials: 500\noutput_dir: from-file\np_values: ['1e-4']\n")
        config = load_config(str(path), {'trials': 20, 'seed': None, 'level': 2})
        assert config.trials == 20
        assert config.level == 2
        assert config.output_dir == "from-file"
        assert config.p_values == [1e-4]

    def test_unknown_key(self, tmp_path):
        path = tmp_path / "bad.yaml"
        path.write_text("trails: 5\n")
        with pytest.raises(ValueError):
            load_config(str(path))

    def test_non_mapping_file(self, tmp_path):
        path = tmp_path / "list.yaml"
        path.write_text("- 1\n- 2\n")
        with pytest.raises(ValueError):
            load_config(str(path))

    def test_to_dict(self):
        assert RunConfig().to_dict()['protocol'] == 'detect'

    def test_tolerances_are_frozen(self):
        with pytest.raises(Exception):
            TOLERANCES.norm = 1.0
