#!/usr/bin/env python3
"""
Norm Growth
Exact squared l2 norm of the transform over all oriented edges, the upper and
lower growth bounds, the fitted exact growth identity, and the verification
suite that cross-checks every route, symmetry and bound.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from ..geometry.tree_model import (
    EdgeClass,
    ProblemInstance,
    count_edges,
    oriented_edges_within,
    vertices_within,
)
from ..kernels.piecewise_kernel import average_T
from ..measures.boundary_measure import (
    cross_cell_measure,
    cross_cell_oracle,
    spine_cell_measure,
    spine_cell_oracle,
)
from ..utils.errors import (
    InvalidParametersError,
    NotSummableError,
    RouteMismatchError,
    SingularSystemError,
)
from .poisson import (
    harmonic_defect,
    oracle_edge_value,
    oracle_transform,
    p_aligned_rearranged,
    p_aligned_series,
    p_transverse_closed,
    p_transverse_series,
    per_edge_bound,
)

logger = logging.getLogger(__name__)

TAIL_SAMPLES = 6
GJ_CHECK_RANGE = 40

SUITES = (
    'bounds',
    'constants',
    'gj',
    'routes',
    'symmetry',
    'harmonicity',
    'alternation',
    'edge-bounds',
    'lower-bound',
    'measures',
)


@dataclass
class NormReport:
    d: int
    norm_sq: Fraction
    lower: Fraction
    upper: Fraction
    gj_prediction: Fraction
    gj_residual: Fraction


@dataclass(frozen=True)
class GeometricTail:
    """sum_{m >= 0} count0 rho^m (value0 r^m)^2 with its two ratios"""
    value0: Fraction
    count0: int
    ratio: Fraction
    count_ratio: int

    def total(self, start: int = 0) -> Fraction:
        """Sum from index start on"""
        if self.value0 == 0:
            return Fraction(0)
        step = self.count_ratio * self.ratio ** 2
        if abs(step) >= 1:
            raise NotSummableError(f"tail ratio {step} does not decay")
        first = self.count0 * self.value0 ** 2 * step ** start
        return first / (1 - step)


def _extract_tail(values: Sequence[Fraction], count0: int, count_ratio: int, label: str) -> GeometricTail:
    """Read off a geometric sequence from consecutive values, checking the ratio is constant"""
    if all(v == 0 for v in values):
        return GeometricTail(Fraction(0), count0, Fraction(0), count_ratio)
    if values[0] == 0:
        raise NotSummableError(f"{label}: leading value 0 but later values non-zero")
    ratios = {b / a for a, b in zip(values, values[1:])} if all(values) else {None}
    if len(ratios) != 1 or None in ratios:
        raise NotSummableError(f"{label}: values {list(map(str, values))} are not geometric")
    return GeometricTail(values[0], count0, ratios.pop(), count_ratio)


def _x_tail(inst: ProblemInstance) -> GeometricTail:
    values = [p_aligned_series(inst, -m) for m in range(1, TAIL_SAMPLES + 1)]
    return _extract_tail(values, count_edges(inst, EdgeClass.aligned(-1)), inst.q, "x-side tail")


def _y_tail(inst: ProblemInstance) -> GeometricTail:
    d = inst.d
    values = [p_aligned_series(inst, d + m) for m in range(TAIL_SAMPLES)]
    return _extract_tail(values, count_edges(inst, EdgeClass.aligned(d)), inst.q, "y-side tail")


def _transverse_tail(inst: ProblemInstance, i: int) -> GeometricTail:
    values = [p_transverse_series(inst, i, j) for j in range(1, TAIL_SAMPLES + 1)]
    return _extract_tail(values, count_edges(inst, EdgeClass.transverse(i, 1)), inst.q, f"transverse tail i={i}")


def norm_squared(inst: ProblemInstance) -> Fraction:
    """
    Squared l2 norm of the transform over all oriented edges

    Twice the sum over geometric edges: the spine window directly, the two
    aligned tails and every transverse j-tail as exact geometric series.
    """
    d = inst.d
    if d == 0:
        return Fraction(0)
    logger.debug(f"📐 Computing norm for q={inst.q}, d={d}")
    window = sum((p_aligned_series(inst, i) ** 2 for i in range(d)), Fraction(0))
    tails = _x_tail(inst).total() + _y_tail(inst).total()
    transverse = sum((_transverse_tail(inst, i).total() for i in range(1, d)), Fraction(0))
    return 2 * (window + tails + transverse)


def truncation_tail(inst: ProblemInstance, radius: int) -> Fraction:
    """
    Squared norm carried by oriented edges with an endpoint farther than radius from [x, y]

    An x-side aligned edge with parameter -m reaches distance m, a y-side one
    with parameter d+m reaches m+1, and a transverse edge (i, j) reaches j.
    """
    d = inst.d
    if d == 0:
        return Fraction(0)
    total = _x_tail(inst).total(start=radius) + _y_tail(inst).total(start=radius)
    total += sum((_transverse_tail(inst, i).total(start=radius) for i in range(1, d)), Fraction(0))
    return 2 * total


def theorem_constants(q: int) -> Tuple[Fraction, Fraction]:
    """C = 8 (q+1)^2 / (q-1)^2, K = 16 q^2 (2q+1) / ((q-1)^3 (q+1))"""
    C = Fraction(8 * (q + 1) ** 2, (q - 1) ** 2)
    K = Fraction(16 * q * q * (2 * q + 1), (q - 1) ** 3 * (q + 1))
    return C, K


def _geometric_sum(first: Fraction, ratio: Fraction) -> Fraction:
    return first / (1 - ratio)


def envelope_constants(q: int) -> Tuple[Fraction, Fraction]:
    """
    Re-derive (C, K) by summing the per-edge envelopes over edge counts

    Spine edges give C. The x-side aligned envelope tail is counted for both
    sides and the transverse envelopes are summed over i >= 0 for both halves
    of [x, y].
    """
    inv = Fraction(1, q)
    scale = Fraction(2, q - 1)
    spine = Fraction(2 * (q + 1), q - 1) ** 2
    # sum_{m>=1} q^m (scale q^-(m-1))^2
    side = _geometric_sum(q * scale ** 2, inv)
    # sum_{i>=0} sum_{j>=1} (q-1) q^(j-1) (scale q^-(i+j-1))^2
    per_i = _geometric_sum((q - 1) * scale ** 2, inv)
    cross_half = _geometric_sum(per_i, inv ** 2)
    return 2 * spine, 2 * (2 * side + 2 * cross_half)


def theorem_bounds(inst: ProblemInstance, constants: Optional[Tuple[Fraction, Fraction]] = None) -> Tuple[Fraction, Fraction]:
    """(4d, C d + K)"""
    if inst.d < 1:
        raise InvalidParametersError(f"growth bounds need d >= 1 (got d={inst.d})")
    C, K = constants or theorem_constants(inst.q)
    return Fraction(4 * inst.d), C * inst.d + K


def fit_gj(q: int) -> Tuple[Fraction, Fraction]:
    """
    Solve C' d - K' (1 - q^-d) = norm_squared(d) for d = 1, 2

    Raises:
        SingularSystemError: zero determinant
    """
    n1 = norm_squared(ProblemInstance(q, 1))
    n2 = norm_squared(ProblemInstance(q, 2))
    inv = Fraction(1, q)
    a11, a12 = Fraction(1), -(1 - inv)
    a21, a22 = Fraction(2), -(1 - inv ** 2)
    det = a11 * a22 - a12 * a21
    if det == 0:
        raise SingularSystemError(f"fitting system is singular for q={q}")
    c_fit = (n1 * a22 - a12 * n2) / det
    k_fit = (a11 * n2 - a21 * n1) / det
    logger.info(f"🧮 Fitted growth constants for q={q}: C'={c_fit}, K'={k_fit}")
    return c_fit, k_fit


def gj_prediction(q: int, d: int, fit: Tuple[Fraction, Fraction]) -> Fraction:
    c_fit, k_fit = fit
    return c_fit * d - k_fit * (1 - Fraction(1, q) ** d)


def norm_report(q: int, d: int, fit: Tuple[Fraction, Fraction],
                constants: Optional[Tuple[Fraction, Fraction]] = None) -> NormReport:
    inst = ProblemInstance(q, d)
    value = norm_squared(inst)
    lower, upper = theorem_bounds(inst, constants)
    prediction = gj_prediction(q, d, fit)
    return NormReport(d, value, lower, upper, prediction, value - prediction)


# ============================================================
# Verification suite
# ============================================================

@dataclass
class CheckResult:
    name: str
    passed: bool
    checked: int
    witness: Optional[Dict[str, object]] = None


@dataclass
class VerificationReport:
    q: int
    d_max: int
    checks: List[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)


class _Check:
    """Counts assertions and keeps the first failing witness"""

    def __init__(self, name: str):
        self.name = name
        self.checked = 0
        self.witness: Optional[Dict[str, object]] = None

    def expect(self, condition: bool, **witness):
        self.checked += 1
        if not condition and self.witness is None:
            self.witness = {k: str(v) for k, v in witness.items()}

    def result(self) -> CheckResult:
        return CheckResult(self.name, self.witness is None, self.checked, self.witness)


def _aligned_range(d: int) -> range:
    return range(-6, d + 7)


def _transverse_pairs(d: int) -> List[Tuple[int, int]]:
    return [(i, j) for i in range(1, d) for j in range(1, 7)]


def _check_bounds(q, d_max, norms, constants, **_) -> CheckResult:
    check = _Check('bounds')
    for d in range(1, d_max + 1):
        lower, upper = theorem_bounds(ProblemInstance(q, d), constants)
        check.expect(lower <= norms[d] <= upper, q=q, d=d, norm_sq=norms[d], lower=lower, upper=upper)
    return check.result()


def _check_constants(q, constants, **_) -> CheckResult:
    check = _Check('constants')
    derived = envelope_constants(q)
    C, K = constants
    check.expect(derived[0] == C, q=q, constant='C', stated=C, derived=derived[0])
    check.expect(derived[1] == K, q=q, constant='K', stated=K, derived=derived[1])
    return check.result()


def _check_gj(q, d_max, norms, **_) -> CheckResult:
    check = _Check('gj')
    fit = fit_gj(q)
    for d in range(1, d_max + 1):
        residual = norms[d] - gj_prediction(q, d, fit)
        check.expect(residual == 0, q=q, d=d, residual=residual)
    for d in range(1, d_max):
        check.expect(norms[d] < norms[d + 1], q=q, d=d, norm_d=norms[d], norm_next=norms[d + 1])
    return check.result()


def _check_routes(q, d_max, **_) -> CheckResult:
    check = _Check('routes')
    for d in range(1, d_max + 1):
        inst = ProblemInstance(q, d)
        for i in _aligned_range(d):
            series = p_aligned_series(inst, i)
            rearranged = p_aligned_rearranged(inst, i)
            oracle = oracle_transform(inst, EdgeClass.aligned(i))
            check.expect(series == rearranged == oracle, q=q, d=d, i=i,
                         series=series, rearranged=rearranged, oracle=oracle)
        for i, j in _transverse_pairs(d):
            series = p_transverse_series(inst, i, j)
            oracle = oracle_transform(inst, EdgeClass.transverse(i, j))
            try:
                closed = p_transverse_closed(inst, i, j)
            except RouteMismatchError as e:
                check.expect(False, q=q, d=d, i=i, j=j, error=e)
                continue
            check.expect(series == closed == oracle, q=q, d=d, i=i, j=j,
                         series=series, closed=closed, oracle=oracle)
    return check.result()


def _check_symmetry(q, d_max, **_) -> CheckResult:
    check = _Check('symmetry')
    for d in range(1, d_max + 1):
        inst = ProblemInstance(q, d)
        for i in _aligned_range(d):
            a, b = p_aligned_series(inst, i), p_aligned_series(inst, d - 1 - i)
            check.expect(a == b, q=q, d=d, i=i, value=a, mirror=b)
        for i, j in _transverse_pairs(d):
            a, b = p_transverse_series(inst, i, j), p_transverse_series(inst, d - i, j)
            check.expect(a == -b, q=q, d=d, i=i, j=j, value=a, mirror=b)
    return check.result()


def _check_harmonicity(q, d_max, **_) -> CheckResult:
    check = _Check('harmonicity')
    for d in range(1, d_max + 1):
        inst = ProblemInstance(q, d)
        cache: Dict[EdgeClass, Fraction] = {}
        for v in vertices_within(inst, 3):
            defect = harmonic_defect(inst, v, cache)
            check.expect(defect == 0, q=q, d=d, vertex=v, defect=defect)
    return check.result()


def _check_alternation(q, d_max, **_) -> CheckResult:
    check = _Check('alternation')
    for d in range(1, d_max + 1):
        inst = ProblemInstance(q, d)
        classes = [EdgeClass.aligned(i) for i in _aligned_range(d)]
        classes += [EdgeClass.transverse(i, j) for i, j in _transverse_pairs(d)]
        for cls in classes:
            forward, backward = oracle_transform(inst, cls), oracle_transform(inst, cls.reverse())
            check.expect(forward == -backward, q=q, d=d, edge=cls, forward=forward, backward=backward)
    return check.result()


def _check_edge_bounds(q, d_max, **_) -> CheckResult:
    check = _Check('edge-bounds')
    for d in range(1, d_max + 1):
        inst = ProblemInstance(q, d)
        for i in _aligned_range(d):
            cls = EdgeClass.aligned(i)
            value, bound = p_aligned_series(inst, i), per_edge_bound(inst, cls)
            check.expect(abs(value) <= bound, q=q, d=d, edge=cls, value=value, bound=bound)
        for i, j in _transverse_pairs(d):
            cls = EdgeClass.transverse(i, j)
            value, bound = p_transverse_series(inst, i, j), per_edge_bound(inst, cls)
            check.expect(abs(value) <= bound, q=q, d=d, edge=cls, value=value, bound=bound)
    return check.result()


def _check_lower_bound(q, d_max, **_) -> CheckResult:
    check = _Check('lower-bound')
    for d in range(1, d_max + 1):
        inst = ProblemInstance(q, d)
        for i in _aligned_range(d):
            value = p_aligned_series(inst, i)
            check.expect(value >= 0, q=q, d=d, i=i, value=value)
            if 0 <= i < d:
                check.expect(value >= 2, q=q, d=d, i=i, value=value)
                averaged = average_T(inst, i)
                low = min(abs(averaged(k)) for k in range(-50, 51))
                check.expect(low >= 1, q=q, d=d, i=i, min_abs_T_f=low)
    return check.result()


def _check_measures(q, d_max, **_) -> CheckResult:
    check = _Check('measures')
    for d in range(2, min(d_max, 4) + 1):
        inst = ProblemInstance(q, d)
        for i in range(0, d):
            for k in range(i - 8, i + 9):
                lemma, oracle = spine_cell_measure(inst, i, k), spine_cell_oracle(inst, i, k)
                check.expect(lemma == oracle, q=q, d=d, i=i, k=k, lemma=lemma, oracle=oracle)
        for i in range(1, d):
            for j in range(1, 4):
                for k in range(i - 8, i + 9):
                    for l in range(max(j - 6, -6), j + 7):
                        oracle = cross_cell_oracle(inst, i, j, k, l)
                        if oracle is None:
                            continue
                        lemma = cross_cell_measure(inst, i, j, k, l)
                        check.expect(lemma == oracle, q=q, d=d, i=i, j=j, k=k, l=l, lemma=lemma, oracle=oracle)
    return check.result()


_CHECKS: Dict[str, Callable[..., CheckResult]] = {
    'bounds': _check_bounds,
    'constants': _check_constants,
    'gj': _check_gj,
    'routes': _check_routes,
    'symmetry': _check_symmetry,
    'harmonicity': _check_harmonicity,
    'alternation': _check_alternation,
    'edge-bounds': _check_edge_bounds,
    'lower-bound': _check_lower_bound,
    'measures': _check_measures,
}


def verify_suite(q: int, d_max: int, suites: Optional[Sequence[str]] = None,
                 constants: Optional[Tuple[Fraction, Fraction]] = None) -> VerificationReport:
    """
    Run the named checks (all by default) for every d <= d_max

    Failures are recorded with their first witness; nothing is raised.
    """
    if d_max < 2:
        raise InvalidParametersError(f"d_max must be >= 2 (got {d_max})")
    ProblemInstance(q, d_max)
    names = list(suites) if suites else list(SUITES)
    unknown = [n for n in names if n not in _CHECKS]
    if unknown:
        raise InvalidParametersError(f"unknown suite(s): {', '.join(unknown)}")

    constants = constants or theorem_constants(q)
    norms: Dict[int, Fraction] = {}
    if {'bounds', 'gj'} & set(names):
        norms = {d: norm_squared(ProblemInstance(q, d)) for d in range(1, d_max + 1)}

    report = VerificationReport(q, d_max)
    for name in names:
        logger.info(f"🔍 Running {name} checks for q={q}, d <= {d_max}")
        result = _CHECKS[name](q=q, d_max=d_max, norms=norms, constants=constants)
        status = "✅" if result.passed else "❌"
        logger.info(f"{status} {name}: {result.checked} checks")
        report.checks.append(result)
    return report


def brute_force_norm(inst: ProblemInstance, radius: int) -> Fraction:
    """Sum of squared level-set oracle values over oriented edges within radius of [x, y]"""
    edges = oriented_edges_within(inst, radius)
    return sum((oracle_edge_value(inst, edge) ** 2 for edge in edges), Fraction(0))
