import csv
import io
import json

import pytest

from src import __version__
from src.reporting.cli import EXIT_IO, EXIT_OK, EXIT_USAGE, EXIT_VERIFY_FAILED, main


@pytest.fixture(autouse=True)
def clean_env(monkeypatch):
    monkeypatch.delenv('BPT_PRECISION', raising=False)
    monkeypatch.delenv('BPT_LOG_LEVEL', raising=False)


def _csv_rows(text):
    return list(csv.DictReader(io.StringIO(text)))


class TestTransform:
    def test_aligned_csv(self, capsys):
        assert main(['transform', '--q', '2', '--d', '2', '--i', '0', '--format', 'csv']) == EXIT_OK
        rows = _csv_rows(capsys.readouterr().out)
        assert len(rows) == 1
        row = rows[0]
        assert row['value_exact'] == '3/1'
        assert row['series_exact'] == row['rearranged_exact'] == row['oracle_exact'] == '3/1'
        assert row['kind'] == 'aligned'
        assert row['j'] == ''
        assert row['reversed'] == 'false'
        assert row['value_decimal'] == '3.000000000000'

    def test_transverse_json(self, capsys):
        code = main(['transform', '--q', '2', '--d', '4', '--i', '1', '--j', '1', '--format', 'json'])
        assert code == EXIT_OK
        payload = json.loads(capsys.readouterr().out)
        assert payload['meta'] == {'q': 2, 'd': 4, 'version': __version__}
        assert payload['rows'][0]['value_exact'] == '3/4'
        assert payload['rows'][0]['j'] == 1

    def test_reversed(self, capsys):
        main(['transform', '--q', '3', '--d', '3', '--i', '1', '--reversed', '--format', 'csv'])
        row = _csv_rows(capsys.readouterr().out)[0]
        assert row['value_exact'] == '-10/3'
        assert row['reversed'] == 'true'

    def test_invalid_q(self, capsys):
        assert main(['transform', '--q', '1', '--d', '2', '--i', '0']) == EXIT_USAGE
        assert 'q must be >= 2' in capsys.readouterr().err

    def test_invalid_transverse(self, capsys):
        assert main(['transform', '--q', '2', '--d', '4', '--i', '0', '--j', '1']) == EXIT_USAGE

    def test_precision_from_environment(self, capsys, monkeypatch):
        monkeypatch.setenv('BPT_PRECISION', '3')
        main(['transform', '--q', '2', '--d', '4', '--i', '1', '--j', '1', '--format', 'csv'])
        assert _csv_rows(capsys.readouterr().out)[0]['value_decimal'] == '0.750'

    def test_precision_flag_wins(self, capsys, monkeypatch):
        monkeypatch.setenv('BPT_PRECISION', '3')
        main(['transform', '--q', '2', '--d', '4', '--i', '1', '--j', '1', '--format', 'csv', '--precision', '1'])
        assert _csv_rows(capsys.readouterr().out)[0]['value_decimal'] == '0.8'

    def test_bad_precision(self, capsys, monkeypatch):
        monkeypatch.setenv('BPT_PRECISION', 'many')
        assert main(['transform', '--q', '2', '--d', '2', '--i', '0']) == EXIT_USAGE


class TestNorm:
    def test_rows(self, capsys):
        assert main(['norm', '--q', '2', '--d-max', '3']) == EXIT_OK
        out = capsys.readouterr().out
        rows = _csv_rows(out)
        assert [r['norm_sq'] for r in rows] == ['24/1', '72/1', '132/1']
        assert all(r['gj_residual'] == '0/1' for r in rows)
        assert rows[1]['lower'] == '8/1'
        assert '"24/1"' in out

    def test_deterministic_output(self, capsys):
        main(['norm', '--q', '3', '--d-max', '4', '--format', 'json'])
        first = capsys.readouterr().out
        main(['norm', '--q', '3', '--d-max', '4', '--format', 'json'])
        assert capsys.readouterr().out == first
        assert json.loads(first)['rows'][2]['norm_sq'] == '656/9'

    def test_out_file(self, tmp_path):
        target = tmp_path / 'norms.csv'
        assert main(['norm', '--q', '2', '--d-max', '2', '--out', str(target)]) == EXIT_OK
        text = target.read_bytes().decode('utf-8')
        assert '\r\n' not in text
        assert _csv_rows(text)[0]['norm_sq'] == '24/1'

    def test_unwritable_out(self, tmp_path):
        target = tmp_path / 'missing' / 'norms.csv'
        assert main(['norm', '--q', '2', '--d-max', '2', '--out', str(target)]) == EXIT_IO

    def test_bad_range(self):
        assert main(['norm', '--q', '2', '--d-max', '0']) == EXIT_USAGE


class TestVerify:
    def test_single_suite(self, capsys):
        assert main(['verify', '--q', '2', '--d-max', '3', '--suite', 'symmetry']) == EXIT_OK
        assert '✅ symmetry' in capsys.readouterr().out

    def test_unknown_suite(self):
        assert main(['verify', '--q', '2', '--d-max', '3', '--suite', 'nope']) == EXIT_USAGE

    def test_small_range(self):
        assert main(['verify', '--q', '2', '--d-max', '1']) == EXIT_USAGE

    def test_failure_exit_code(self, capsys, monkeypatch):
        import src.transforms.poisson as poisson
        from src.kernels.piecewise_kernel import KernelKind, indicator

        original = poisson.make_kernel

        def perturbed(kind, inst):
            kernel = original(kind, inst)
            return kernel - indicator([1]) if kind is KernelKind.G_HALF else kernel

        monkeypatch.setattr(poisson, 'make_kernel', perturbed)
        assert main(['verify', '--q', '2', '--d-max', '2', '--suite', 'routes']) == EXIT_VERIFY_FAILED
        assert '❌ routes' in capsys.readouterr().out
        assert main(['transform', '--q', '2', '--d', '2', '--i', '0']) == EXIT_VERIFY_FAILED


class TestFitGj:
    def test_q2(self, capsys):
        assert main(['fit-gj', '--q', '2', '--d-max', '10']) == EXIT_OK
        out = capsys.readouterr().out
        assert "C' = 72/1" in out
        assert "K' = 96/1" in out
        assert 'identity holds for d=1..10' in out

    def test_q3(self, capsys):
        main(['fit-gj', '--q', '3', '--d-max', '5'])
        out = capsys.readouterr().out
        assert "C' = 32/1" in out and "K' = 24/1" in out

    def test_default_range(self, capsys):
        assert main(['fit-gj', '--q', '2']) == EXIT_OK
        assert 'identity holds for d=1..40' in capsys.readouterr().out

    def test_invalid_q(self):
        assert main(['fit-gj', '--q', '0']) == EXIT_USAGE


def test_missing_subcommand():
    assert main([]) == EXIT_USAGE
