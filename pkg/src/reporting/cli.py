#!/usr/bin/env python3
"""
Busemann-Poisson command line
Subcommands: transform, norm, verify, fit-gj

Exit codes: 0 success, 1 verification failure or route disagreement,
2 usage or parameter error, 3 I/O error.
"""

import argparse
import logging
import sys
from typing import List, Optional

from ..geometry.tree_model import EdgeClass, ProblemInstance
from ..transforms.norm_growth import (
    GJ_CHECK_RANGE,
    SUITES,
    fit_gj,
    gj_prediction,
    norm_report,
    norm_squared,
    verify_suite,
)
from ..transforms.poisson import Route, evaluate_routes, per_edge_bound
from ..utils.config import Settings, load_settings
from ..utils.errors import BusemannPoissonError, ConfigurationError, RouteMismatchError
from .records import FORMATS, NormRow, OutputRecord, format_decimal, format_fraction, render, write_output

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_USAGE = 2
EXIT_IO = 3


def cmd_transform(args: argparse.Namespace, settings: Settings) -> int:
    """Transform value at one edge class through every route"""
    inst = ProblemInstance(args.q, args.d)
    if args.j is None:
        cls = EdgeClass.aligned(args.i, reversed=args.reversed)
    else:
        cls = EdgeClass.transverse(args.i, args.j, reversed=args.reversed)

    logger.info(f"🌳 Evaluating {cls} for q={inst.q}, d={inst.d}")
    values = {v.route: v.value for v in evaluate_routes(inst, cls)}
    if len(set(values.values())) != 1:
        detail = ", ".join(f"{route.value}={value}" for route, value in values.items())
        raise RouteMismatchError(f"routes disagree at {cls}: {detail}")

    value = values[Route.SERIES]
    record = OutputRecord(
        q=inst.q,
        d=inst.d,
        kind=cls.kind.value,
        i=cls.i,
        j=cls.j,
        reversed=cls.reversed,
        value_exact=format_fraction(value),
        value_decimal=format_decimal(value, settings.precision),
        bound_exact=format_fraction(per_edge_bound(inst, cls)),
        series_exact=format_fraction(values[Route.SERIES]),
        rearranged_exact=format_fraction(values[Route.REARRANGED]),
        oracle_exact=format_fraction(values[Route.ORACLE]),
    )
    write_output(render([record], args.format, {"q": inst.q, "d": inst.d}))
    return EXIT_OK


def cmd_norm(args: argparse.Namespace, settings: Settings) -> int:
    """One row per d with the exact norm, growth bounds and fitted prediction"""
    if args.d_max < 1:
        raise BusemannPoissonError(f"--d-max must be >= 1 (got {args.d_max})")
    ProblemInstance(args.q, args.d_max)

    fit = fit_gj(args.q)
    rows = []
    for d in range(1, args.d_max + 1):
        report = norm_report(args.q, d, fit)
        rows.append(NormRow(
            q=args.q,
            d=d,
            norm_sq=format_fraction(report.norm_sq),
            norm_sq_decimal=format_decimal(report.norm_sq, settings.precision),
            lower=format_fraction(report.lower),
            upper=format_fraction(report.upper),
            gj_prediction=format_fraction(report.gj_prediction),
            gj_residual=format_fraction(report.gj_residual),
        ))
        logger.debug(f"📊 d={d}: norm_sq={report.norm_sq}")

    text = render(rows, args.format, {"q": args.q, "d_max": args.d_max})
    write_output(text, args.out)
    return EXIT_OK


def cmd_verify(args: argparse.Namespace, settings: Settings) -> int:
    """Run the verification suite and print one line per check"""
    suites = [args.suite] if args.suite else None
    report = verify_suite(args.q, args.d_max, suites)

    print(f"🔍 Verification for q={args.q}, d <= {args.d_max}")
    for check in report.checks:
        if check.passed:
            print(f"✅ {check.name}: {check.checked} checks passed")
        else:
            witness = ", ".join(f"{k}={v}" for k, v in check.witness.items())
            print(f"❌ {check.name}: failed ({check.checked} checks); first witness: {witness}")
    return EXIT_OK if report.passed else EXIT_VERIFY_FAILED


def cmd_fit_gj(args: argparse.Namespace, settings: Settings) -> int:
    """Fit C', K' on d = 1, 2 and test the identity up to --d-max"""
    ProblemInstance(args.q, 1)
    c_fit, k_fit = fit_gj(args.q)
    print(f"C' = {format_fraction(c_fit)} ≈ {format_decimal(c_fit, settings.precision)}")
    print(f"K' = {format_fraction(k_fit)} ≈ {format_decimal(k_fit, settings.precision)}")

    for d in range(1, args.d_max + 1):
        residual = norm_squared(ProblemInstance(args.q, d)) - gj_prediction(args.q, d, (c_fit, k_fit))
        if residual != 0:
            print(f"identity fails at d={d} (residual {format_fraction(residual)})")
            return EXIT_VERIFY_FAILED
    print(f"identity holds for d=1..{args.d_max}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--precision', type=int, default=None,
                        help='Decimal digits for rounded values (or use BPT_PRECISION env var)')
    common.add_argument('--log-level', default=None,
                        help='Logging level (or use BPT_LOG_LEVEL env var)')

    parser = argparse.ArgumentParser(
        prog='busemann_poisson',
        description='Exact Poisson transform of the Busemann cocycle on a (q+1)-regular tree')
    sub = parser.add_subparsers(dest='command', required=True)

    p = sub.add_parser('transform', parents=[common], help='Transform value at one edge class')
    p.add_argument('--q', type=int, required=True, help='Tree valency parameter (q >= 2)')
    p.add_argument('--d', type=int, required=True, help='Distance d(x,y) >= 0')
    p.add_argument('--i', type=int, required=True, help='Edge parameter i')
    p.add_argument('--j', type=int, default=None, help='Transverse depth j >= 1 (omit for aligned edges)')
    p.add_argument('--reversed', action='store_true', help='Use the opposite orientation')
    p.add_argument('--format', choices=FORMATS, default='text')
    p.set_defaults(handler=cmd_transform)

    p = sub.add_parser('norm', parents=[common], help='Squared l2 norm for d = 1..d-max')
    p.add_argument('--q', type=int, required=True)
    p.add_argument('--d-max', type=int, required=True)
    p.add_argument('--format', choices=FORMATS, default='csv')
    p.add_argument('--out', default=None, help='Output file (default stdout)')
    p.set_defaults(handler=cmd_norm)

    p = sub.add_parser('verify', parents=[common], help='Run the verification suite')
    p.add_argument('--q', type=int, required=True)
    p.add_argument('--d-max', type=int, required=True)
    p.add_argument('--suite', choices=SUITES, default=None, help='Run a single suite')
    p.set_defaults(handler=cmd_verify)

    p = sub.add_parser('fit-gj', parents=[common], help="Fit the exact growth constants C', K'")
    p.add_argument('--q', type=int, required=True)
    p.add_argument('--d-max', type=int, default=GJ_CHECK_RANGE, help='Check the identity for d = 1..d-max')
    p.set_defaults(handler=cmd_fit_gj)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    try:
        settings = load_settings(args.precision, args.log_level)
    except ConfigurationError as e:
        print(f"❌ {e}", file=sys.stderr)
        return EXIT_USAGE

    logging.basicConfig(
        level=getattr(logging, settings.log_level),
        format='%(asctime)s - %(levelname)s - %(message)s',
        stream=sys.stderr,
        force=True,
    )

    try:
        return args.handler(args, settings)
    except RouteMismatchError as e:
        logger.error(f"❌ {e}")
        return EXIT_VERIFY_FAILED
    except BusemannPoissonError as e:
        logger.error(f"❌ {e}")
        return EXIT_USAGE
    except OSError as e:
        logger.error(f"❌ I/O error: {e}")
        return EXIT_IO
