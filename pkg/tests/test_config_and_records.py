import json
from fractions import Fraction

import pytest

from src.reporting.records import (
    NormRow,
    OutputRecord,
    format_decimal,
    format_fraction,
    parse_fraction,
    records_to_frame,
    render,
)
from src.utils.config import DEFAULT_PRECISION, Settings, load_settings
from src.utils.errors import BusemannPoissonError, ConfigurationError


class TestSettings:
    def test_defaults(self, monkeypatch):
        monkeypatch.delenv('BPT_PRECISION', raising=False)
        monkeypatch.delenv('BPT_LOG_LEVEL', raising=False)
        assert load_settings() == Settings(DEFAULT_PRECISION, 'INFO')

    def test_environment(self, monkeypatch):
        monkeypatch.setenv('BPT_PRECISION', '4')
        monkeypatch.setenv('BPT_LOG_LEVEL', 'debug')
        assert load_settings() == Settings(4, 'DEBUG')

    def test_arguments_override_environment(self, monkeypatch):
        monkeypatch.setenv('BPT_PRECISION', '4')
        assert load_settings(precision=0, log_level='warning') == Settings(0, 'WARNING')

    @pytest.mark.parametrize("precision,level", [('x', 'INFO'), ('-1', 'INFO'), ('3', 'LOUD')])
    def test_invalid(self, monkeypatch, precision, level):
        monkeypatch.setenv('BPT_PRECISION', precision)
        monkeypatch.setenv('BPT_LOG_LEVEL', level)
        with pytest.raises(ConfigurationError):
            load_settings()

    def test_errors_share_a_base(self):
        assert issubclass(ConfigurationError, BusemannPoissonError)
        assert issubclass(BusemannPoissonError, ValueError)


class TestFormatting:
    def test_fraction(self):
        assert format_fraction(Fraction(3)) == '3/1'
        assert format_fraction(Fraction(-6, 4)) == '-3/2'
        assert format_fraction(Fraction(0)) == '0/1'
        assert parse_fraction('-3/2') == Fraction(-3, 2)

    @pytest.mark.parametrize("value,precision,expected", [
        (Fraction(1, 8), 2, '0.12'),
        (Fraction(3, 8), 2, '0.38'),
        (Fraction(-3, 4), 3, '-0.750'),
        (Fraction(3), 0, '3'),
        (Fraction(1, 3), 12, '0.333333333333'),
        (Fraction(656, 9), 4, '72.8889'),
        (Fraction(-1, 1000), 2, '0.00'),
    ])
    def test_decimal(self, value, precision, expected):
        assert format_decimal(value, precision) == expected


def _record(**overrides):
    fields = dict(q=2, d=4, kind='transverse', i=1, j=1, reversed=False, value_exact='3/4',
                  value_decimal='0.75', bound_exact='1/1', series_exact='3/4',
                  rearranged_exact='3/4', oracle_exact='3/4')
    fields.update(overrides)
    return OutputRecord(**fields)


class TestRender:
    def test_frame_blanks_missing_depth(self):
        df = records_to_frame([_record(), _record(kind='aligned', j=None, reversed=True)])
        assert list(df['j']) == [1, '']
        assert list(df['reversed']) == ['false', 'true']

    def test_csv_column_order_and_quoting(self):
        text = render([_record()], 'csv', {})
        header, row = text.splitlines()
        assert header.split(',')[:4] == ['"q"', '"d"', '"kind"', '"i"']
        assert row.startswith('2,4,"transverse",1,1,"false","3/4"')

    def test_json_keeps_types(self):
        payload = json.loads(render([_record(j=None)], 'json', {'q': 2}))
        assert payload['meta']['q'] == 2
        assert payload['rows'][0]['j'] is None
        assert payload['rows'][0]['reversed'] is False

    def test_text_table(self):
        row = NormRow(2, 1, '24/1', '24.0', '4/1', '296/3', '24/1', '0/1')
        text = render([row], 'text', {})
        assert 'norm_sq' in text.splitlines()[0]
        assert '296/3' in text

    def test_unknown_format(self):
        with pytest.raises(ValueError):
            render([_record()], 'xml', {})
