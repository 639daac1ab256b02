#!/usr/bin/env python3
"""
Piecewise Kernels
Exact functions Z -> Q built from finitely many pieces. On each integer
interval (possibly unbounded) the function is a sum of terms p(k) * r^k with p
a rational polynomial and r a non-zero rational base. The class is closed
under translation, reflection, linear combination and pointwise product, and
tails with |r| < 1 are summed in closed form, so every series used by the
transform is an exact finite computation.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from math import comb
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

from ..geometry.tree_model import ProblemInstance
from ..utils.errors import InvalidParametersError, KernelError, NotSummableError

logger = logging.getLogger(__name__)

Scalar = Union[int, Fraction]
Poly = Tuple[Fraction, ...]


# ============================================================
# Polynomial helpers (coefficients low degree first)
# ============================================================

def _poly(coeffs: Iterable[Scalar]) -> Poly:
    result = [Fraction(c) for c in coeffs]
    while result and result[-1] == 0:
        result.pop()
    return tuple(result)


def _poly_eval(p: Poly, k: int) -> Fraction:
    acc = Fraction(0)
    for c in reversed(p):
        acc = acc * k + c
    return acc


def _poly_add(a: Poly, b: Poly) -> Poly:
    n = max(len(a), len(b))
    return _poly((a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n))


def _poly_mul(a: Poly, b: Poly) -> Poly:
    if not a or not b:
        return ()
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return _poly(out)


def _poly_scale(p: Poly, c: Scalar) -> Poly:
    return _poly(x * c for x in p)


def _poly_shift(p: Poly, t: int) -> Poly:
    """Coefficients of k -> p(k + t)"""
    out = [Fraction(0)] * len(p)
    for n, c in enumerate(p):
        for m in range(n + 1):
            out[m] += c * comb(n, m) * Fraction(t) ** (n - m)
    return _poly(out)


def _poly_reflect(p: Poly) -> Poly:
    """Coefficients of k -> p(-k)"""
    return _poly(c if n % 2 == 0 else -c for n, c in enumerate(p))


def _poly_difference(p: Poly) -> Poly:
    """Forward difference p(k+1) - p(k)"""
    return _poly_add(_poly_shift(p, 1), _poly_scale(p, -1))


# ============================================================
# Terms and pieces
# ============================================================

@dataclass(frozen=True)
class Term:
    """k -> poly(k) * base^k"""
    coeffs: Poly
    base: Fraction = Fraction(1)

    def __post_init__(self):
        if self.base == 0:
            raise KernelError("term base must be non-zero")

    def __call__(self, k: int) -> Fraction:
        return _poly_eval(self.coeffs, k) * self.base ** k

    @property
    def is_zero(self) -> bool:
        return not self.coeffs


def _merge_terms(terms: Iterable[Term]) -> Tuple[Term, ...]:
    by_base: Dict[Fraction, Poly] = {}
    for t in terms:
        by_base[t.base] = _poly_add(by_base.get(t.base, ()), t.coeffs)
    return tuple(Term(p, b) for b, p in sorted(by_base.items()) if p)


@dataclass(frozen=True)
class Piece:
    """Integer interval [lo, hi]; None marks an unbounded side"""
    lo: Optional[int]
    hi: Optional[int]
    terms: Tuple[Term, ...]

    def contains(self, k: int) -> bool:
        return (self.lo is None or self.lo <= k) and (self.hi is None or k <= self.hi)

    def contains_bounded(self, k: int) -> bool:
        return self.lo is not None and self.hi is not None and self.contains(k)

    def __call__(self, k: int) -> Fraction:
        return sum((t(k) for t in self.terms), Fraction(0))


def _geometric_moment(p: Poly, r: Fraction) -> Fraction:
    """
    Exact value of sum_{m >= 0} p(m) r^m for |r| < 1

    Uses S[p] (1 - r) = p(0) + r S[p(.+1) - p], recursing on the degree.
    """
    if not p:
        return Fraction(0)
    return (p[0] + r * _geometric_moment(_poly_difference(p), r)) / (1 - r)


def _term_sum(term: Term, lo: Optional[int], hi: Optional[int]) -> Fraction:
    if term.is_zero:
        return Fraction(0)
    if lo is not None and hi is not None:
        if hi < lo:
            return Fraction(0)
        if abs(term.base) == 1:
            return sum((term(k) for k in range(lo, hi + 1)), Fraction(0))
        # difference of two tails on the decaying side
        if abs(term.base) < 1:
            return _term_sum(term, lo, None) - _term_sum(term, hi + 1, None)
        return _term_sum(term, None, hi) - _term_sum(term, None, lo - 1)
    if lo is None and hi is None:
        raise NotSummableError("non-zero term on all of Z")
    if hi is None:
        if abs(term.base) >= 1:
            raise NotSummableError(f"right tail with base {term.base} does not decay")
        # k = lo + m
        return term.base ** lo * _geometric_moment(_poly_shift(term.coeffs, lo), term.base)
    if abs(term.base) <= 1:
        raise NotSummableError(f"left tail with base {term.base} does not decay")
    # k = hi - m
    reflected = _poly_reflect(_poly_shift(term.coeffs, hi))
    return term.base ** hi * _geometric_moment(reflected, 1 / term.base)


# ============================================================
# Kernels
# ============================================================

@dataclass(frozen=True, eq=False)
class PiecewiseKernel:
    """
    A function Z -> Q given by disjoint pieces covering Z plus finitely many
    point overrides (values that replace the piece value at a single integer).
    """
    pieces: Tuple[Piece, ...]
    point_overrides: Tuple[Tuple[int, Fraction], ...] = field(default=())

    def __post_init__(self):
        pieces = self.pieces
        if not pieces or pieces[0].lo is not None or pieces[-1].hi is not None:
            raise KernelError("pieces must cover Z")
        for left, right in zip(pieces, pieces[1:]):
            if left.hi is None or right.lo != left.hi + 1:
                raise KernelError(f"pieces [{left.lo},{left.hi}] and [{right.lo},{right.hi}] do not tile Z")
        for p in pieces[1:-1]:
            if p.lo > p.hi:
                raise KernelError(f"empty piece [{p.lo},{p.hi}]")

    # -------------------------------------------------- construction

    @classmethod
    def from_pieces(cls, pieces: Sequence[Tuple[Optional[int], Optional[int], Sequence[Term]]],
                    overrides: Optional[Dict[int, Scalar]] = None) -> 'PiecewiseKernel':
        built = tuple(Piece(lo, hi, _merge_terms(terms)) for lo, hi, terms in pieces)
        items = tuple(sorted((k, Fraction(v)) for k, v in (overrides or {}).items()))
        return cls(built, items)

    @property
    def overrides(self) -> Dict[int, Fraction]:
        return dict(self.point_overrides)

    def breakpoints(self) -> List[int]:
        """Left ends of every bounded-below piece"""
        return [p.lo for p in self.pieces if p.lo is not None]

    # -------------------------------------------------- evaluation

    def piece_at(self, k: int) -> Piece:
        for p in self.pieces:
            if p.contains(k):
                return p
        raise KernelError(f"no piece contains {k}")

    def base_value(self, k: int) -> Fraction:
        """Value ignoring point overrides"""
        return self.piece_at(k)(k)

    def __call__(self, k: int) -> Fraction:
        overrides = self.overrides
        if k in overrides:
            return overrides[k]
        return self.base_value(k)

    # -------------------------------------------------- structural operators

    def translate(self, t: int) -> 'PiecewiseKernel':
        """tau_t F(k) = F(k - t)"""
        pieces = []
        for p in self.pieces:
            lo = None if p.lo is None else p.lo + t
            hi = None if p.hi is None else p.hi + t
            # p(k - t) r^(k - t) = [r^-t p(k - t)] r^k
            terms = [Term(_poly_scale(_poly_shift(term.coeffs, -t), term.base ** (-t)), term.base)
                     for term in p.terms]
            pieces.append((lo, hi, terms))
        overrides = {k + t: v for k, v in self.point_overrides}
        return PiecewiseKernel.from_pieces(pieces, overrides)

    def reflect(self) -> 'PiecewiseKernel':
        """F(-k)"""
        pieces = []
        for p in reversed(self.pieces):
            lo = None if p.hi is None else -p.hi
            hi = None if p.lo is None else -p.lo
            terms = [Term(_poly_reflect(term.coeffs), 1 / term.base) for term in p.terms]
            pieces.append((lo, hi, terms))
        overrides = {-k: v for k, v in self.point_overrides}
        return PiecewiseKernel.from_pieces(pieces, overrides)

    # -------------------------------------------------- algebra

    def _combine(self, other: 'PiecewiseKernel', op: str) -> 'PiecewiseKernel':
        cuts = sorted(set(self.breakpoints()) | set(other.breakpoints()))
        bounds: List[Tuple[Optional[int], Optional[int]]] = []
        lo: Optional[int] = None
        for c in cuts:
            bounds.append((lo, c - 1))
            lo = c
        bounds.append((lo, None))

        pieces = []
        for lo, hi in bounds:
            probe = lo if lo is not None else (hi if hi is not None else 0)
            a = self.piece_at(probe).terms
            b = other.piece_at(probe).terms
            if op == 'add':
                terms = list(a) + list(b)
            else:
                terms = [Term(_poly_mul(s.coeffs, t.coeffs), s.base * t.base) for s in a for t in b]
            pieces.append((lo, hi, terms))

        points = set(self.overrides) | set(other.overrides)
        if op == 'add':
            overrides = {k: self(k) + other(k) for k in points}
        else:
            overrides = {k: self(k) * other(k) for k in points}
        return PiecewiseKernel.from_pieces(pieces, overrides)

    def __add__(self, other: 'PiecewiseKernel') -> 'PiecewiseKernel':
        return self._combine(other, 'add')

    def __mul__(self, other: Union['PiecewiseKernel', Scalar]) -> 'PiecewiseKernel':
        if isinstance(other, PiecewiseKernel):
            return self._combine(other, 'mul')
        return self.scale(other)

    __rmul__ = __mul__

    def scale(self, c: Scalar) -> 'PiecewiseKernel':
        pieces = [(p.lo, p.hi, [Term(_poly_scale(t.coeffs, c), t.base) for t in p.terms])
                  for p in self.pieces]
        overrides = {k: v * c for k, v in self.point_overrides}
        return PiecewiseKernel.from_pieces(pieces, overrides)

    def __neg__(self) -> 'PiecewiseKernel':
        return self.scale(-1)

    def __sub__(self, other: 'PiecewiseKernel') -> 'PiecewiseKernel':
        return self + (-other)

    # -------------------------------------------------- comparison

    def is_zero(self) -> bool:
        """
        Exact test for the zero function

        Distinct exponential-polynomials are independent on infinite intervals,
        so unbounded pieces are checked structurally and bounded ones pointwise.
        """
        for p in self.pieces:
            if p.lo is None or p.hi is None:
                if p.terms:
                    return False
            elif any(self(k) != 0 for k in range(p.lo, p.hi + 1)):
                return False
        return all(v == 0 for k, v in self.point_overrides
                   if not self.piece_at(k).contains_bounded(k))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PiecewiseKernel):
            return NotImplemented
        return (self - other).is_zero()

    __hash__ = None

    # -------------------------------------------------- summation

    def total(self) -> Fraction:
        """Exact sum over all of Z"""
        result = Fraction(0)
        for p in self.pieces:
            for term in p.terms:
                result += _term_sum(term, p.lo, p.hi)
        for k, v in self.point_overrides:
            result += v - self.base_value(k)
        return result


# ============================================================
# Named kernels
# ============================================================

class KernelKind(Enum):
    F = 'f'
    G = 'g'
    G_HALF = 'g_half'
    H = 'h'


def _const(c: Scalar) -> List[Term]:
    return [Term(_poly([c]))]


def zero() -> PiecewiseKernel:
    return PiecewiseKernel.from_pieces([(None, None, [])])


def constant(c: Scalar) -> PiecewiseKernel:
    return PiecewiseKernel.from_pieces([(None, None, _const(c))])


def indicator(points: Iterable[int]) -> PiecewiseKernel:
    """1 on the given integers, 0 elsewhere"""
    return PiecewiseKernel.from_pieces([(None, None, [])], {k: 1 for k in points})


def step(start: int) -> PiecewiseKernel:
    """1 on [start, oo), 0 below"""
    return PiecewiseKernel.from_pieces([(None, start - 1, []), (start, None, _const(1))])


def make_kernel(kind: KernelKind, inst: ProblemInstance) -> PiecewiseKernel:
    """
    Restriction to Z of the kernel functions

    f: d for k <= 0, d - 2k on [1, d-1], -d for k >= d
    g: q^-|k|
    g_half: q^k for k <= 0, -q^-(k-1) for k >= 1
    h: q^(k+1) for k <= -1, 0 at 0, q^-(k-1) for k >= 1
    """
    q, d = inst.q, inst.d
    inv = Fraction(1, q)
    if kind is KernelKind.F:
        if d == 0:
            return zero()
        pieces = [(None, 0, _const(d))]
        if d >= 2:
            pieces.append((1, d - 1, [Term(_poly([d, -2]))]))
        pieces.append((d, None, _const(-d)))
        return PiecewiseKernel.from_pieces(pieces)
    if kind is KernelKind.G:
        return PiecewiseKernel.from_pieces([
            (None, 0, [Term(_poly([1]), Fraction(q))]),
            (1, None, [Term(_poly([1]), inv)]),
        ])
    if kind is KernelKind.G_HALF:
        return PiecewiseKernel.from_pieces([
            (None, 0, [Term(_poly([1]), Fraction(q))]),
            (1, None, [Term(_poly([-q]), inv)]),
        ])
    if kind is KernelKind.H:
        return PiecewiseKernel.from_pieces([
            (None, -1, [Term(_poly([q]), Fraction(q))]),
            (0, 0, _const(1)),
            (1, None, [Term(_poly([q]), inv)]),
        ], {0: 0})
    raise KernelError(f"unknown kernel kind {kind}")


def pair(k1: PiecewiseKernel, k2: PiecewiseKernel) -> Fraction:
    """Exact l2(Z) pairing sum_k k1(k) k2(k)"""
    return (k1 * k2).total()


def average_T(inst: ProblemInstance, i: int) -> PiecewiseKernel:
    """T_i f = (f(k + i) + f(k + d - i - 1)) / 2"""
    if inst.d < 1:
        raise InvalidParametersError(f"T_i needs d >= 1 (got d={inst.d})")
    f = make_kernel(KernelKind.F, inst)
    return (f.translate(-i) + f.translate(-inst.d + i + 1)).scale(Fraction(1, 2))


def average_Ttilde(inst: ProblemInstance, i: int) -> PiecewiseKernel:
    """T~_i f = (f(k + i) - f(k + d - i)) / 2"""
    if not 1 <= i <= inst.d - 1:
        raise InvalidParametersError(f"T~_i needs 1 <= i <= d-1 (got i={i}, d={inst.d})")
    f = make_kernel(KernelKind.F, inst)
    return (f.translate(-i) - f.translate(i - inst.d)).scale(Fraction(1, 2))


def _root_bound(p: Poly) -> int:
    """Integer beyond which p has no real root (Cauchy bound)"""
    if len(p) <= 1:
        return 0
    lead = abs(p[-1])
    return int(1 + max(abs(c) / lead for c in p[:-1])) + 1


def l1_norm_positives(kernel: PiecewiseKernel) -> Fraction:
    """
    Exact sum_{k >= 1} |kernel(k)|

    The final unbounded piece must carry a single term with a positive base,
    so its sign is eventually constant. Single-term pieces are summed pointwise
    only up to the root bound of their polynomial and in closed form beyond it.
    """
    tail = kernel.pieces[-1]
    if len(tail.terms) > 1:
        raise KernelError("l1 norm needs a single-base tail")
    if tail.terms and tail.terms[0].base <= 0:
        raise KernelError(f"l1 norm needs a positive tail base (got {tail.terms[0].base})")

    result = Fraction(0)
    for p in kernel.pieces:
        if p.hi is not None and p.hi < 1:
            continue
        result += _abs_piece_sum(p, max(1, p.lo if p.lo is not None else 1), p.hi)
    for k, v in kernel.point_overrides:
        if k >= 1:
            result += abs(v) - abs(kernel.base_value(k))
    return result


def _abs_piece_sum(p: Piece, lo: int, hi: Optional[int]) -> Fraction:
    """sum of |p(k)| over [lo, hi], hi None for a right tail"""
    if not p.terms:
        return Fraction(0)
    if len(p.terms) > 1 or p.terms[0].base <= 0:
        return sum((abs(p(k)) for k in range(lo, hi + 1)), Fraction(0))
    term = p.terms[0]
    split = max(lo, _root_bound(term.coeffs))
    near_hi = split - 1 if hi is None else min(hi, split - 1)
    result = sum((abs(term(k)) for k in range(lo, near_hi + 1)), Fraction(0))
    if hi is None or split <= hi:
        result += abs(_term_sum(term, split, hi))
    return result
