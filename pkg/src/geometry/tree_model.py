#!/usr/bin/env python3
"""
Tree Model
Lazy geometry of the (q+1)-regular tree anchored on the geodesic [x, y].

Vertices are addressed by a spine index i (the vertex sigma(i) on the
bi-infinite geodesic through x = sigma(0) and y = sigma(d)) plus a branch path
leading away from the spine. The first branch step at a spine vertex picks one
of the q-1 off-spine neighbours (0..q-2); every later step picks one of q
children (0..q-1). The tree is never materialized; only finite windows around
[x, y] are enumerated on request.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Iterator, List, Optional, Tuple

from ..utils.errors import (
    InvalidInstanceError,
    InvalidParametersError,
    NotAnEdgeError,
    ProjectionAtEndpointError,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ProblemInstance:
    """Tree valency parameter q and the distance d between x and y"""
    q: int
    d: int

    def __post_init__(self):
        if self.q < 2:
            raise InvalidInstanceError(f"q must be >= 2 (got {self.q})")
        if self.d < 0:
            raise InvalidInstanceError(f"d must be >= 0 (got {self.d})")

    @property
    def x(self) -> 'Vertex':
        return sigma(0)

    @property
    def y(self) -> 'Vertex':
        return sigma(self.d)


@dataclass(frozen=True, order=True)
class Vertex:
    spine_index: int
    branch_path: Tuple[int, ...] = ()

    @property
    def on_spine(self) -> bool:
        return not self.branch_path

    @property
    def depth(self) -> int:
        """Distance to the spine"""
        return len(self.branch_path)

    def __str__(self):
        if not self.branch_path:
            return f"σ({self.spine_index})"
        return f"σ({self.spine_index})+{list(self.branch_path)}"


def sigma(i: int) -> Vertex:
    """Spine vertex sigma(i)"""
    return Vertex(i, ())


class EdgeKind(Enum):
    ALIGNED = 'aligned'
    TRANSVERSE = 'transverse'


@dataclass(frozen=True)
class EdgeClass:
    """
    Parametrization of an oriented edge relative to [x, y]

    Aligned(i): convention orientation sigma(i) -> sigma(i+1).
    Transverse(i, j): the edge sits at distance j from its projection sigma(i),
    convention orientation points toward [x, y].
    """
    kind: EdgeKind
    i: int
    j: Optional[int] = None
    reversed: bool = False

    @classmethod
    def aligned(cls, i: int, reversed: bool = False) -> 'EdgeClass':
        return cls(EdgeKind.ALIGNED, i, None, reversed)

    @classmethod
    def transverse(cls, i: int, j: int, reversed: bool = False) -> 'EdgeClass':
        return cls(EdgeKind.TRANSVERSE, i, j, reversed)

    @property
    def is_aligned(self) -> bool:
        return self.kind is EdgeKind.ALIGNED

    def reverse(self) -> 'EdgeClass':
        return EdgeClass(self.kind, self.i, self.j, not self.reversed)

    def canonical(self) -> 'EdgeClass':
        """Same class with the convention orientation"""
        return EdgeClass(self.kind, self.i, self.j, False)

    def __str__(self):
        flag = "~" if self.reversed else ""
        if self.is_aligned:
            return f"{flag}Aligned({self.i})"
        return f"{flag}Transverse({self.i},{self.j})"


@dataclass(frozen=True)
class Shadow:
    """
    Boundary set Omega_base(interior): the ends whose geodesic ray from base
    passes through interior.
    """
    base: Vertex
    interior: Vertex

    def __post_init__(self):
        if self.base == self.interior:
            raise InvalidParametersError(f"shadow needs base != interior (both {self.base})")

    def half_tree(self) -> Tuple[Vertex, Vertex]:
        """
        Oriented edge (w, z) whose far side bounds this shadow

        z is the interior vertex and w its neighbour toward the base, so the
        shadow is the boundary of the component of z once the edge is cut.
        """
        return step_toward(self.interior, self.base), self.interior

    def __str__(self):
        return f"Ω_{self.base}({self.interior})"


class ShadowRelation(Enum):
    EQUAL = 'Equal'
    FIRST_INSIDE_SECOND = 'FirstInsideSecond'
    SECOND_INSIDE_FIRST = 'SecondInsideFirst'
    DISJOINT = 'Disjoint'
    COMPLEMENT_OVERLAP = 'ComplementOverlap'


def validate_vertex(inst: ProblemInstance, v: Vertex) -> Vertex:
    """Check the branch path uses admissible child indices for this q"""
    for step, c in enumerate(v.branch_path):
        upper = inst.q - 2 if step == 0 else inst.q - 1
        if not 0 <= c <= upper:
            raise InvalidParametersError(
                f"branch index {c} at step {step} of {v} outside 0..{upper} for q={inst.q}")
    return v


def _common_prefix(a: Tuple[int, ...], b: Tuple[int, ...]) -> int:
    n = 0
    for u, v in zip(a, b):
        if u != v:
            break
        n += 1
    return n


def distance(u: Vertex, v: Vertex) -> int:
    """Graph distance between two vertices"""
    if u.spine_index != v.spine_index:
        return abs(u.spine_index - v.spine_index) + u.depth + v.depth
    return u.depth + v.depth - 2 * _common_prefix(u.branch_path, v.branch_path)


def distance_to_segment(inst: ProblemInstance, v: Vertex) -> int:
    """Distance from v to the geodesic segment [x, y]"""
    i = v.spine_index
    if i < 0:
        return -i + v.depth
    if i > inst.d:
        return i - inst.d + v.depth
    return v.depth


def step_toward(u: Vertex, v: Vertex) -> Vertex:
    """Neighbour of u on the geodesic from u to v"""
    if u == v:
        raise InvalidParametersError(f"no step from {u} toward itself")
    if u.spine_index != v.spine_index:
        if u.branch_path:
            return Vertex(u.spine_index, u.branch_path[:-1])
        step = 1 if v.spine_index > u.spine_index else -1
        return sigma(u.spine_index + step)
    n = len(u.branch_path)
    if v.branch_path[:n] == u.branch_path:
        return Vertex(u.spine_index, v.branch_path[:n + 1])
    return Vertex(u.spine_index, u.branch_path[:-1])


def neighbors(inst: ProblemInstance, v: Vertex) -> List[Vertex]:
    """The q+1 neighbours of v"""
    i, path = v.spine_index, v.branch_path
    if not path:
        result = [sigma(i - 1), sigma(i + 1)]
        result.extend(Vertex(i, (c,)) for c in range(inst.q - 1))
        return result
    result = [Vertex(i, path[:-1])]
    result.extend(Vertex(i, path + (c,)) for c in range(inst.q))
    return result


def in_half_tree(v: Vertex, w: Vertex, z: Vertex) -> bool:
    """True when v lies on the z side of the edge (w, z)"""
    return distance(v, z) < distance(v, w)


def classify_edge(inst: ProblemInstance, origin: Vertex, target: Vertex) -> EdgeClass:
    """
    Classify an oriented edge relative to [x, y]

    Raises:
        InvalidParametersError: a branch index outside the admissible range for q
        NotAnEdgeError: origin and target are not adjacent
        ProjectionAtEndpointError: an off-spine edge projecting onto x or y
    """
    validate_vertex(inst, origin)
    validate_vertex(inst, target)
    if distance(origin, target) != 1:
        raise NotAnEdgeError(f"{origin} and {target} are not adjacent")

    if origin.on_spine and target.on_spine:
        i = min(origin.spine_index, target.spine_index)
        return EdgeClass.aligned(i, reversed=origin.spine_index > target.spine_index)

    i = origin.spine_index
    if not 1 <= i <= inst.d - 1:
        raise ProjectionAtEndpointError(
            f"edge {origin}->{target} projects to σ({i}), not strictly inside [x,y] with d={inst.d}")
    far, near = (origin, target) if origin.depth > target.depth else (target, origin)
    return EdgeClass.transverse(i, far.depth, reversed=far != origin)


def classify_any_edge(inst: ProblemInstance, origin: Vertex, target: Vertex) -> EdgeClass:
    """
    Classify any oriented edge, realigning edges that project onto x or y

    An off-spine edge hanging beyond x (or beyond y) lies on another geodesic
    line through [x, y] and is aligned with respect to that line. On the x side
    the nearer endpoint at distance m from x gives parameter -(m+1) and the
    convention origin is the farther endpoint; on the y side distance m from y
    gives parameter d+m and the convention origin is the nearer endpoint.
    """
    validate_vertex(inst, origin)
    validate_vertex(inst, target)
    if distance(origin, target) != 1:
        raise NotAnEdgeError(f"{origin} and {target} are not adjacent")
    i = origin.spine_index
    if (origin.on_spine and target.on_spine) or 1 <= i <= inst.d - 1:
        return classify_edge(inst, origin, target)

    far, near = (origin, target) if origin.depth > target.depth else (target, origin)
    m = distance_to_segment(inst, near)
    if i <= 0:
        return EdgeClass.aligned(-(m + 1), reversed=origin != far)
    return EdgeClass.aligned(inst.d + m, reversed=origin != near)


def validate_class(inst: ProblemInstance, cls: EdgeClass) -> EdgeClass:
    if cls.is_aligned:
        return cls
    if cls.j is None or cls.j < 1 or not 1 <= cls.i <= inst.d - 1:
        raise InvalidParametersError(
            f"transverse parameters need 1 <= i <= d-1 and j >= 1 (got i={cls.i}, j={cls.j}, d={inst.d})")
    return cls


def realize_edge(inst: ProblemInstance, cls: EdgeClass) -> Tuple[Vertex, Vertex]:
    """A concrete (origin, target) pair carrying the given class"""
    validate_class(inst, cls)
    if cls.is_aligned:
        edge = (sigma(cls.i), sigma(cls.i + 1))
    else:
        edge = (Vertex(cls.i, (0,) * cls.j), Vertex(cls.i, (0,) * (cls.j - 1)))
    return (edge[1], edge[0]) if cls.reversed else edge


def count_edges(inst: ProblemInstance, cls: EdgeClass) -> int:
    """
    Number of geometric edges carrying the parameter(s) of cls

    Aligned: q^|i| for i < 0, 1 for 0 <= i < d, q^(i-d+1) for i >= d.
    Transverse: (q-1) q^(j-1).
    """
    q, d = inst.q, inst.d
    if cls.is_aligned:
        if cls.i < 0:
            return q ** (-cls.i)
        if cls.i < d:
            return 1
        return q ** (cls.i - d + 1)
    validate_class(inst, cls)
    return (q - 1) * q ** (cls.j - 1)


def shadow_relation(s1: Shadow, s2: Shadow) -> ShadowRelation:
    """Set relation between two shadows, read off their bounding half-trees"""
    w1, z1 = s1.half_tree()
    w2, z2 = s2.half_tree()
    if (w1, z1) == (w2, z2):
        return ShadowRelation.EQUAL

    z1_in_2 = in_half_tree(z1, w2, z2)
    z2_in_1 = in_half_tree(z2, w1, z1)
    if not z1_in_2 and not z2_in_1:
        return ShadowRelation.DISJOINT
    if z1_in_2 and not in_half_tree(w2, w1, z1):
        return ShadowRelation.FIRST_INSIDE_SECOND
    if z2_in_1 and not in_half_tree(w1, w2, z2):
        return ShadowRelation.SECOND_INSIDE_FIRST
    return ShadowRelation.COMPLEMENT_OVERLAP


def vertices_within(inst: ProblemInstance, radius: int) -> Iterator[Vertex]:
    """All vertices at distance <= radius from [x, y], spine order then depth-first"""
    for i in range(-radius, inst.d + radius + 1):
        remaining = radius - distance_to_segment(inst, sigma(i))
        yield sigma(i)
        if remaining < 1:
            continue
        for first in range(inst.q - 1):
            yield from _subtree(inst, Vertex(i, (first,)), remaining - 1)


def _subtree(inst: ProblemInstance, root: Vertex, depth: int) -> Iterator[Vertex]:
    yield root
    if depth < 1:
        return
    for c in range(inst.q):
        yield from _subtree(inst, Vertex(root.spine_index, root.branch_path + (c,)), depth - 1)


def oriented_edges_within(inst: ProblemInstance, radius: int) -> Iterator[Tuple[Vertex, Vertex]]:
    """Oriented edges whose two endpoints are both within radius of [x, y]"""
    for v in vertices_within(inst, radius):
        for n in neighbors(inst, v):
            if distance_to_segment(inst, n) <= radius:
                yield v, n


def sphere(inst: ProblemInstance, center: Vertex, radius: int) -> List[Vertex]:
    """Vertices at exact distance radius from center, (q+1) q^(radius-1) of them"""
    if radius == 0:
        return [center]
    layer = [(center, None)]
    for _ in range(radius):
        layer = [(n, v) for v, prev in layer for n in neighbors(inst, v) if n != prev]
    return [v for v, _ in layer]


def ball_edges(inst: ProblemInstance, center: Vertex, radius: int) -> List[Tuple[Vertex, Vertex]]:
    """Geometric edges of the ball B_radius(center), each oriented away from center"""
    edges = []
    layer = [(center, None)]
    for _ in range(radius):
        nxt = []
        for v, prev in layer:
            for n in neighbors(inst, v):
                if n != prev:
                    edges.append((v, n))
                    nxt.append((n, v))
        layer = nxt
    return edges
