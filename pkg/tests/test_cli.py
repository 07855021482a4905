import csv

from click.testing import CliRunner

from main import EXIT_OK, EXIT_USAGE, EXIT_VIOLATIONS, cli


class TestCircuitsCommand:
    def test_emit_and_load(self, tmp_path):
        runner = CliRunner()
        result = runner.invoke(cli, ['circuits', '--emit', str(tmp_path)])
        assert result.exit_code == EXIT_OK
        emitted = sorted(tmp_path.glob("*.circ"))
        assert emitted
        loaded = runner.invoke(cli, ['circuits', '--load', str(emitted[0])])
        assert loaded.exit_code == EXIT_OK


class TestCheckCommand:
    def test_ec_passes(self, tmp_path):
        result = CliRunner().invoke(cli, ['check', '--target', 'ec', '-o', str(tmp_path)])
        assert result.exit_code == EXIT_OK
        assert (tmp_path / "check_ec.json").exists()

    def test_sabotaged_circuit_fails(self, tmp_path):
        result = CliRunner().invoke(cli, ['check', '--target', 'broken-detect-selftest', '-o', str(tmp_path)])
        assert result.exit_code == EXIT_VIOLATIONS


class TestSimulateCommand:
    def test_seed_required(self, tmp_path):
        result = CliRunner().invoke(cli, ['simulate', '-P', 'ec-detect', '--p', '1e-3', '-n', '10',
                                          '-o', str(tmp_path)])
        assert result.exit_code == EXIT_USAGE

    def test_unknown_protocol(self, tmp_path):
        result = CliRunner().invoke(cli, ['simulate', '-P', 'nope', '--seed', '1', '-o', str(tmp_path)])
        assert result.exit_code == EXIT_USAGE

    def test_writes_records(self, tmp_path):
        result = CliRunner().invoke(cli, ['simulate', '-P', 'ec-detect', '--p', '1e-3', '--p', '2e-3',
                                          '-n', '20', '--seed', '1', '-o', str(tmp_path)])
        assert result.exit_code == EXIT_OK
        with open(tmp_path / "simulate_ec-detect_l1.csv") as fh:
            rows = list(csv.DictReader(fh))
        assert [float(r['p']) for r in rows] == [1e-3, 2e-3]


class TestOverheadCommand:
    def test_compare(self, tmp_path):
        result = CliRunner().invoke(cli, ['overhead', '--p', '4e-5', '--target', '1e-8', '-o', str(tmp_path)])
        assert result.exit_code == EXIT_OK
        with open(tmp_path / "overhead.csv") as fh:
            schemes = {r['scheme'] for r in csv.DictReader(fh)}
        assert 'detect' in schemes
