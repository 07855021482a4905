import csv
import json

import pytest

from src.engine.records import OVERHEAD_COLUMNS, read_records, write_overhead, write_records
from src.engine.trials import CSV_COLUMNS


def _record(p, accept):
    record = {column: 0.0 for column in CSV_COLUMNS}
    record.update({'p': p, 'trials': 1000, 'accept': accept, 'accept_err': 0.01, 'px': 1.25e-4, 'n_rec1': 1.02})
    return record


class TestRecords:
    def test_formats_read_back_equal(self, tmp_path):
        records = [_record(1e-3, 0.93), _record(2e-3, 1 / 3)]
        from_csv = read_records(write_records(records, tmp_path / "out.csv", 'csv'))
        from_json = read_records(write_records(records, tmp_path / "out.json", 'json'))
        assert from_csv == from_json
        assert from_csv[0]['trials'] == 1000
        assert from_csv[1]['accept'] == pytest.approx(1 / 3)

    def test_header_order(self, tmp_path):
        path = write_records([_record(1e-3, 0.9)], tmp_path / "out.csv")
        with open(path) as fh:
            assert next(csv.reader(fh)) == CSV_COLUMNS

    def test_missing_columns(self, tmp_path):
        path = tmp_path / "partial.csv"
        path.write_text("p,trials\n0.001,10\n")
        with pytest.raises(ValueError):
            read_records(path)

    def test_unknown_format(self, tmp_path):
        with pytest.raises(ValueError):
            write_records([_record(1e-3, 0.9)], tmp_path / "out.txt", 'xml')


class TestOverhead:
    ROWS = [{'p': 5e-5, 'scheme': 'detect', 'level': 3, 'qubits': 1234.5, 'gates': 98765.0,
             'details': {'target': 1e-9}}]

    def test_csv_table(self, tmp_path):
        path = write_overhead(self.ROWS, tmp_path / "overhead.csv")
        with open(path) as fh:
            rows = list(csv.DictReader(fh))
        assert list(rows[0]) == OVERHEAD_COLUMNS
        assert rows[0]['scheme'] == 'detect'
        assert int(rows[0]['level']) == 3
        assert float(rows[0]['target']) == pytest.approx(1e-9)

    def test_json_keeps_details(self, tmp_path):
        path = write_overhead(self.ROWS, tmp_path / "overhead.json", 'json')
        data = json.loads(path.read_text())
        assert data['reports'][0]['details'] == {'target': 1e-9}
