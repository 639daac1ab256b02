#!/usr/bin/env python3
"""
Poisson Transform of the Busemann Cocycle
Evaluates the transform at an edge class through independent routes:
the integration-formula series, the symmetry-rearranged l1 norms and closed
forms, and a finite level-set oracle working directly on shadows.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Dict, List, Mapping, Optional

from ..geometry.tree_model import (
    EdgeClass,
    ProblemInstance,
    Shadow,
    Vertex,
    ball_edges,
    classify_any_edge,
    neighbors,
    realize_edge,
    sphere,
    step_toward,
    validate_class,
)
from ..kernels.piecewise_kernel import (
    KernelKind,
    average_T,
    average_Ttilde,
    l1_norm_positives,
    make_kernel,
    pair,
)
from ..measures.boundary_measure import Edge, edge_measure_shadow, level_shadow
from ..utils.errors import IncompleteCoverError, InvalidParametersError, RouteMismatchError

logger = logging.getLogger(__name__)


class Route(Enum):
    SERIES = 'series'
    REARRANGED = 'rearranged'
    ORACLE = 'oracle'


@dataclass(frozen=True)
class TransformValue:
    value: Fraction
    route: Route


def _check_transverse(inst: ProblemInstance, i: int, j: int):
    if not 1 <= i <= inst.d - 1 or j < 1:
        raise InvalidParametersError(
            f"transverse parameters need 1 <= i <= d-1 and j >= 1 (got i={i}, j={j}, d={inst.d})")


# ============================================================
# Series route
# ============================================================

def p_aligned_series(inst: ProblemInstance, i: int) -> Fraction:
    """P(i) = (q-1)/q <f, tau_i g_half>"""
    q = inst.q
    f = make_kernel(KernelKind.F, inst)
    g_half = make_kernel(KernelKind.G_HALF, inst)
    return Fraction(q - 1, q) * pair(f, g_half.translate(i))


def p_transverse_series(inst: ProblemInstance, i: int, j: int) -> Fraction:
    """P(i,j) = -(2/q) f(i) g_half(j) + (q-1)/q^2 g_half(j) <f, tau_i h>"""
    _check_transverse(inst, i, j)
    q = inst.q
    f = make_kernel(KernelKind.F, inst)
    g_half = make_kernel(KernelKind.G_HALF, inst)
    h = make_kernel(KernelKind.H, inst)
    spread = pair(f, h.translate(i))
    return -Fraction(2, q) * f(i) * g_half(j) + Fraction(q - 1, q * q) * g_half(j) * spread


# ============================================================
# Rearranged route
# ============================================================

def p_aligned_rearranged(inst: ProblemInstance, i: int) -> Fraction:
    """P(i) = 2(q-1)/q * || T_i f . g_half ||_l1(N*)"""
    if inst.d == 0:
        return Fraction(0)
    q = inst.q
    g_half = make_kernel(KernelKind.G_HALF, inst)
    return Fraction(2 * (q - 1), q) * l1_norm_positives(average_T(inst, i) * g_half)


def p_transverse_closed(inst: ProblemInstance, i: int, j: int) -> Fraction:
    """
    Closed form -2 q^-i / (q-1) * g_half(j) * (1 - q^-f(i)) for 2i <= d

    The other half follows from P_j(d-i) = -P_j(i). The closed form is checked
    against the rearranged expression 2(q-1)/q^2 g_half(j) (Delta - q f(i)/(q-1))
    with Delta = || T~_i f . h ||_l1(N*).

    Raises:
        RouteMismatchError: the two expressions disagree
    """
    _check_transverse(inst, i, j)
    if 2 * i > inst.d:
        return -p_transverse_closed(inst, inst.d - i, j)

    q = inst.q
    f = make_kernel(KernelKind.F, inst)
    g_half = make_kernel(KernelKind.G_HALF, inst)
    h = make_kernel(KernelKind.H, inst)
    f_i = f(i)
    closed = -2 * Fraction(1, q) ** i / (q - 1) * g_half(j) * (1 - Fraction(1, q) ** int(f_i))

    delta = l1_norm_positives(average_Ttilde(inst, i) * h)
    sigma_i = delta - q * f_i / (q - 1)
    rearranged = Fraction(2 * (q - 1), q * q) * g_half(j) * sigma_i
    if rearranged != closed:
        raise RouteMismatchError(
            f"transverse closed form {closed} != rearranged {rearranged} at q={q}, d={inst.d}, i={i}, j={j}")
    return closed


# ============================================================
# Level-set oracle
# ============================================================

def oracle_edge_value(inst: ProblemInstance, edge: Edge) -> Fraction:
    """
    Integrate B(x,y) against nu_e over its d+1 level sets

    B equals d - 2k on Omega_x(sigma(k)) minus Omega_x(sigma(k+1)), and -d on
    Omega_x(y). Each nested difference is a difference of edge measures.
    """
    d = inst.d
    if d == 0:
        return Fraction(0)

    def nested(k: int) -> Fraction:
        if k > d:
            return Fraction(0)
        region = level_shadow(inst, k)
        if region is None:
            return Fraction(0)
        return edge_measure_shadow(inst, edge, region)

    total = Fraction(0)
    upper = nested(0)
    for k in range(d + 1):
        lower = nested(k + 1)
        total += (d - 2 * k) * (upper - lower)
        upper = lower
    return total


def oracle_transform(inst: ProblemInstance, cls: EdgeClass) -> Fraction:
    """Level-set oracle on a concrete edge realizing cls"""
    return oracle_edge_value(inst, realize_edge(inst, cls))


# ============================================================
# Per-class evaluation
# ============================================================

def _oriented(cls: EdgeClass, value: Fraction) -> Fraction:
    return -value if cls.reversed else value


def series_value(inst: ProblemInstance, cls: EdgeClass) -> Fraction:
    validate_class(inst, cls)
    if cls.is_aligned:
        return _oriented(cls, p_aligned_series(inst, cls.i))
    return _oriented(cls, p_transverse_series(inst, cls.i, cls.j))


def rearranged_value(inst: ProblemInstance, cls: EdgeClass) -> Fraction:
    validate_class(inst, cls)
    if cls.is_aligned:
        return _oriented(cls, p_aligned_rearranged(inst, cls.i))
    return _oriented(cls, p_transverse_closed(inst, cls.i, cls.j))


def evaluate_routes(inst: ProblemInstance, cls: EdgeClass) -> List[TransformValue]:
    """The transform at cls through every route, in Route order"""
    return [
        TransformValue(series_value(inst, cls), Route.SERIES),
        TransformValue(rearranged_value(inst, cls), Route.REARRANGED),
        TransformValue(oracle_transform(inst, cls), Route.ORACLE),
    ]


def agreed_value(inst: ProblemInstance, cls: EdgeClass) -> Fraction:
    """Common value of all routes; raises RouteMismatchError when they differ"""
    values = evaluate_routes(inst, cls)
    if len({v.value for v in values}) != 1:
        detail = ", ".join(f"{v.route.value}={v.value}" for v in values)
        raise RouteMismatchError(f"routes disagree at {cls} (q={inst.q}, d={inst.d}): {detail}")
    return values[0].value


def edge_transform(inst: ProblemInstance, origin: Vertex, target: Vertex) -> Fraction:
    """Transform at a concrete oriented edge, any position in the tree"""
    return series_value(inst, classify_any_edge(inst, origin, target))


def per_edge_bound(inst: ProblemInstance, cls: EdgeClass) -> Fraction:
    """Envelope on |P| for the class (orientation does not matter)"""
    validate_class(inst, cls)
    q, d, i = inst.q, inst.d, cls.i
    inv = Fraction(1, q)
    scale = Fraction(2, q - 1)
    if cls.is_aligned:
        if i < 0:
            return scale * inv ** (-i - 1)
        if i < d:
            return Fraction(2 * (q + 1), q - 1)
        return scale * inv ** (i - d - 1)
    if 2 * i <= d:
        return scale * inv ** (i + cls.j - 1)
    return scale * inv ** (d - i + cls.j - 1)


# ============================================================
# Locally constant boundary functions
# ============================================================

def busemann_level(inst: ProblemInstance, u: Vertex) -> int:
    """B(x,y) on Omega_x(u) for u at distance >= d from x"""
    i = u.spine_index
    k = 0 if i < 0 else min(i, inst.d)
    return inst.d - 2 * k


def busemann_phi(inst: ProblemInstance, radius: int) -> Dict[Vertex, Fraction]:
    """B(x,y) sampled on the depth-radius shadows from x"""
    if radius < max(inst.d, 1):
        raise InvalidParametersError(f"radius must be >= max(d, 1) (got {radius}, d={inst.d})")
    return {u: Fraction(busemann_level(inst, u)) for u in sphere(inst, inst.x, radius)}


def _check_cover(inst: ProblemInstance, phi: Mapping[Vertex, Fraction], radius: int) -> List[Vertex]:
    if radius < 1:
        raise InvalidParametersError(f"radius must be >= 1 (got {radius})")
    cells = sphere(inst, inst.x, radius)
    missing = [u for u in cells if u not in phi]
    if missing:
        raise IncompleteCoverError(f"{len(missing)} sphere vertices lack a value, e.g. {missing[0]}")
    return cells


def _integrate(inst: ProblemInstance, phi: Mapping[Vertex, Fraction], cells: List[Vertex], edge: Edge) -> Fraction:
    x = inst.x
    return sum((Fraction(phi[u]) * edge_measure_shadow(inst, edge, Shadow(x, u)) for u in cells), Fraction(0))


def transform_locally_constant(inst: ProblemInstance, phi: Mapping[Vertex, Fraction],
                               cls: EdgeClass, radius: int) -> Fraction:
    """sum_u phi(u) nu_e(Omega_x(u)) over the sphere S_radius(x)"""
    cells = _check_cover(inst, phi, radius)
    return _integrate(inst, phi, cells, realize_edge(inst, cls))


def transform_locally_constant_edge(inst: ProblemInstance, phi: Mapping[Vertex, Fraction],
                                    edge: Edge, radius: int) -> Fraction:
    cells = _check_cover(inst, phi, radius)
    return _integrate(inst, phi, cells, edge)


def locally_constant_norm_squared(inst: ProblemInstance, phi: Mapping[Vertex, Fraction], radius: int) -> Fraction:
    """
    Exact squared l2 norm over oriented edges of the transform of phi

    Inside the ball B_radius(x) every geometric edge is evaluated. Beyond a
    sphere vertex u the transform depends only on the depth below u and
    shrinks by 1/q per level, so the subtree contributes q^2/(q-1) a^2 per
    orientation, where a is the value on an edge pointing into u.
    """
    cells = _check_cover(inst, phi, radius)
    q, x = inst.q, inst.x
    inner = Fraction(0)
    for edge in ball_edges(inst, x, radius):
        inner += _integrate(inst, phi, cells, edge) ** 2

    outer = Fraction(0)
    for u in cells:
        child = next(n for n in neighbors(inst, u) if n != step_toward(u, x))
        a = _integrate(inst, phi, cells, (child, u))
        outer += Fraction(q * q, q - 1) * a * a
    logger.debug(f"📐 ball part {inner}, subtree part {outer} at radius {radius}")
    return 2 * (inner + outer)


def harmonic_defect(inst: ProblemInstance, v: Vertex,
                    cache: Optional[Dict[EdgeClass, Fraction]] = None) -> Fraction:
    """Sum of the transform over the q+1 edges leaving v (0 for a harmonic function)"""
    total = Fraction(0)
    for n in neighbors(inst, v):
        cls = classify_any_edge(inst, v, n)
        key = cls.canonical()
        if cache is None:
            value = series_value(inst, key)
        else:
            if key not in cache:
                cache[key] = series_value(inst, key)
            value = cache[key]
        total += -value if cls.reversed else value
    return total
