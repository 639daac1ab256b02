#!/usr/bin/env python3
"""
Output Records
Row types and writers for transform and norm results. Exact values are
rendered as canonical "num/den" strings next to rounded decimals.
"""

import csv
import io
import json
import logging
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import Any, Dict, Optional, Sequence

import pandas as pd

from .. import __version__

logger = logging.getLogger(__name__)

FORMATS = ('text', 'csv', 'json')


def format_fraction(value: Fraction) -> str:
    """Canonical reduced fraction, always with a denominator ("3/1")"""
    value = Fraction(value)
    return f"{value.numerator}/{value.denominator}"


def parse_fraction(text: str) -> Fraction:
    return Fraction(text)


def format_decimal(value: Fraction, precision: int) -> str:
    """Round half to even at the given number of digits"""
    scaled = round(Fraction(value) * 10 ** precision)
    sign = "-" if scaled < 0 else ""
    digits = str(abs(scaled))
    if precision == 0:
        return f"{sign}{digits}"
    digits = digits.rjust(precision + 1, "0")
    return f"{sign}{digits[:-precision]}.{digits[-precision:]}"


@dataclass
class OutputRecord:
    q: int
    d: int
    kind: str
    i: int
    j: Optional[int]
    reversed: bool
    value_exact: str
    value_decimal: str
    bound_exact: str
    series_exact: str
    rearranged_exact: str
    oracle_exact: str


@dataclass
class NormRow:
    q: int
    d: int
    norm_sq: str
    norm_sq_decimal: str
    lower: str
    upper: str
    gj_prediction: str
    gj_residual: str


def records_to_frame(records: Sequence[Any]) -> pd.DataFrame:
    """DataFrame with one row per record; empty optional cells render as ''"""
    df = pd.DataFrame([asdict(r) for r in records])
    if 'j' in df.columns:
        df['j'] = df['j'].astype(object).where(df['j'].notna(), "")
        df['j'] = df['j'].map(lambda v: v if v == "" else int(v))
    if 'reversed' in df.columns:
        df['reversed'] = df['reversed'].map(lambda v: "true" if v else "false")
    return df


def render(records: Sequence[Any], fmt: str, meta: Dict[str, Any]) -> str:
    """Render records as an aligned text table, CSV or JSON"""
    if fmt == 'json':
        payload = {"meta": {**meta, "version": __version__}, "rows": [asdict(r) for r in records]}
        return json.dumps(payload, indent=2, ensure_ascii=False) + "\n"

    df = records_to_frame(records)
    if fmt == 'csv':
        buffer = io.StringIO()
        df.to_csv(buffer, index=False, lineterminator="\n", quoting=csv.QUOTE_NONNUMERIC)
        return buffer.getvalue()
    if fmt == 'text':
        return df.to_string(index=False) + "\n"
    raise ValueError(f"unknown format {fmt!r}")


def write_output(text: str, out: Optional[str] = None) -> None:
    """Write to a file (UTF-8, LF) or stdout"""
    if out is None:
        print(text, end="")
        return
    with open(out, 'w', encoding='utf-8', newline='\n') as f:
        f.write(text)
    logger.info(f"💾 Wrote {out}")
