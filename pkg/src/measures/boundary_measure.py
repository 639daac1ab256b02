#!/usr/bin/env python3
"""
Boundary Measures
Exact visual measures, signed edge measures and the partition-cell masses
used by the integration formulae. Every value is a finite shadow-algebra
computation in exact rationals.
"""

import logging
from fractions import Fraction
from typing import Iterable, List, Optional, Tuple

from ..geometry.tree_model import (
    ProblemInstance,
    Shadow,
    ShadowRelation,
    Vertex,
    distance,
    in_half_tree,
    neighbors,
    realize_edge,
    shadow_relation,
    sigma,
    EdgeClass,
)
from ..kernels.piecewise_kernel import KernelKind, make_kernel
from ..utils.errors import BaseMismatchError, InvalidLevelError

logger = logging.getLogger(__name__)

Edge = Tuple[Vertex, Vertex]


def _cone_mass(q: int, n: int) -> Fraction:
    """nu of a depth-n shadow seen from its own base: 1 / (q^(n-1) (q+1))"""
    return Fraction(1, (q + 1)) / Fraction(q) ** (n - 1)


def visual_measure(inst: ProblemInstance, base: Vertex, shadow: Shadow) -> Fraction:
    """nu_base of a shadow based at base"""
    if shadow.base != base:
        raise BaseMismatchError(f"{shadow} is not based at {base}")
    return _cone_mass(inst.q, distance(base, shadow.interior))


def visual_measure_general(inst: ProblemInstance, u: Vertex, shadow: Shadow) -> Fraction:
    """
    nu_u of a shadow seen from an arbitrary vertex u

    Outside the bounding half-tree the shadow is a cone of depth d(u, z);
    inside, it is the complement of the cone of depth d(u, w) behind the cut.
    """
    w, z = shadow.half_tree()
    if in_half_tree(u, w, z):
        return 1 - _cone_mass(inst.q, distance(u, w))
    return _cone_mass(inst.q, distance(u, z))


def total_visual_mass(inst: ProblemInstance, u: Vertex) -> Fraction:
    """nu_u of the whole boundary, summed over the depth-1 shadows at u"""
    return sum((visual_measure(inst, u, Shadow(u, n)) for n in neighbors(inst, u)), Fraction(0))


def intersection_measure(inst: ProblemInstance, u: Vertex, s1: Shadow, s2: Shadow) -> Fraction:
    """nu_u of the intersection of two shadows"""
    relation = shadow_relation(s1, s2)
    if relation is ShadowRelation.DISJOINT:
        return Fraction(0)
    if relation in (ShadowRelation.EQUAL, ShadowRelation.FIRST_INSIDE_SECOND):
        return visual_measure_general(inst, u, s1)
    if relation is ShadowRelation.SECOND_INSIDE_FIRST:
        return visual_measure_general(inst, u, s2)
    # the union is the whole boundary
    return visual_measure_general(inst, u, s1) + visual_measure_general(inst, u, s2) - 1


def edge_halves(origin: Vertex, target: Vertex) -> Tuple[Shadow, Shadow]:
    """(Omega_e^+, Omega_e^-): the boundary behind the origin and beyond the target"""
    return Shadow(target, origin), Shadow(origin, target)


def edge_measure_shadow(inst: ProblemInstance, edge: Edge, shadow: Shadow) -> Fraction:
    """
    nu_e of a shadow for the oriented edge e = (origin, target)

    nu_e = (q+1)/q * nu_o restricted to Omega_e^+  -  (q+1) * nu_o restricted to Omega_e^-
    """
    origin, target = edge
    plus, minus = edge_halves(origin, target)
    q = inst.q
    positive = Fraction(q + 1, q) * intersection_measure(inst, origin, shadow, plus)
    negative = (q + 1) * intersection_measure(inst, origin, shadow, minus)
    return positive - negative


def edge_measure_full(inst: ProblemInstance, edge: Edge) -> Fraction:
    """nu_e of the whole boundary (always 0)"""
    plus, minus = edge_halves(*edge)
    return edge_measure_shadow(inst, edge, plus) + edge_measure_shadow(inst, edge, minus)


def edge_measure_union(inst: ProblemInstance, edge: Edge, shadows: Iterable[Shadow]) -> Fraction:
    """nu_e of a disjoint union of shadows"""
    return sum((edge_measure_shadow(inst, edge, s) for s in shadows), Fraction(0))


def spine_cell_measure(inst: ProblemInstance, i: int, k: int) -> Fraction:
    """nu_e of the spine cell at sigma(k) for the aligned edge with parameter i"""
    q = inst.q
    return Fraction(q - 1, q) * make_kernel(KernelKind.G_HALF, inst)(k - i)


def cross_cell_measure(inst: ProblemInstance, i: int, j: int, k: int, l: int) -> Fraction:
    """nu_e of the cross cell (k, l) for the transverse edge with parameters (i, j)"""
    q = inst.q
    if k != i and l != j:
        return Fraction(0)
    g_half = make_kernel(KernelKind.G_HALF, inst)
    if k == i and l != j:
        return Fraction(q - 1, q) * g_half(l)
    if k != i:
        h = make_kernel(KernelKind.H, inst)
        return Fraction(q - 1, q) * g_half(j) * Fraction(1, q) * h(k - i)
    return Fraction(q - 3, q) * g_half(j)


def spine_cell_shadows(inst: ProblemInstance, k: int) -> List[Shadow]:
    """Shadows partitioning the ends that project onto sigma(k)"""
    return [Shadow(sigma(k), Vertex(k, (c,))) for c in range(inst.q - 1)]


def _cross_line(i: int, j: int, l: int) -> Vertex:
    """tau(l): tau(0) is the edge origin, tau(j) = sigma(i), then leaves through branch 1"""
    if l <= j:
        return Vertex(i, (0,) * (j - l))
    return Vertex(i, (1,) + (0,) * (l - j - 1))


def cross_cell_shadows(inst: ProblemInstance, i: int, j: int, k: int, l: int) -> Optional[List[Shadow]]:
    """
    Shadows partitioning the cross cell (k, l) of the transverse edge (i, j)

    Returns None when the cell needs the line tau to continue past sigma(i),
    which the tree cannot do when q = 2.
    """
    q = inst.q
    if k != i and l != j:
        return []
    if k != i:
        return spine_cell_shadows(inst, k)
    if q == 2 and l >= j:
        return None
    if l == j:
        center = sigma(i)
        return [Shadow(center, Vertex(i, (c,))) for c in range(2, q - 1)]
    node = _cross_line(i, j, l)
    return [Shadow(node, Vertex(i, node.branch_path + (c,))) for c in range(1, q)]


def spine_cell_oracle(inst: ProblemInstance, i: int, k: int) -> Fraction:
    """Spine cell mass computed from the shadows themselves"""
    edge = realize_edge(inst, EdgeClass.aligned(i))
    return edge_measure_union(inst, edge, spine_cell_shadows(inst, k))


def cross_cell_oracle(inst: ProblemInstance, i: int, j: int, k: int, l: int) -> Optional[Fraction]:
    shadows = cross_cell_shadows(inst, i, j, k, l)
    if shadows is None:
        return None
    edge = realize_edge(inst, EdgeClass.transverse(i, j))
    return edge_measure_union(inst, edge, shadows)


def radon_nikodym(inst: ProblemInstance, level_value: int) -> Fraction:
    """d nu_x / d nu_y on the level set where B(x,y) = level_value"""
    d = inst.d
    if not (-d <= level_value <= d and (d - level_value) % 2 == 0):
        raise InvalidLevelError(f"{level_value} is not of the form d-2k with 0 <= k <= {d}")
    return Fraction(inst.q) ** level_value


def level_shadow(inst: ProblemInstance, k: int) -> Optional[Shadow]:
    """Omega_x(sigma(k)); None stands for the whole boundary (k = 0)"""
    if k <= 0:
        return None
    return Shadow(inst.x, sigma(k))


def measure_within(inst: ProblemInstance, u: Vertex, shadow: Shadow, region: Optional[Shadow]) -> Fraction:
    """nu_u of shadow intersected with region (None = whole boundary)"""
    if region is None:
        return visual_measure_general(inst, u, shadow)
    return intersection_measure(inst, u, shadow, region)


def radon_nikodym_check(inst: ProblemInstance, shadow: Shadow) -> Tuple[Fraction, Fraction]:
    """
    Return (nu_x(S), sum over levels of q^B * nu_y(S within the level set))

    The two sides agree exactly for every shadow S.
    """
    x, y, d = inst.x, inst.y, inst.d
    direct = visual_measure_general(inst, x, shadow)
    weighted = Fraction(0)
    for k in range(d + 1):
        upper = measure_within(inst, y, shadow, level_shadow(inst, k))
        lower = measure_within(inst, y, shadow, level_shadow(inst, k + 1)) if k < d else Fraction(0)
        weighted += radon_nikodym(inst, d - 2 * k) * (upper - lower)
    logger.debug(f"🔁 Radon-Nikodym check on {shadow}: {direct} vs {weighted}")
    return direct, weighted
