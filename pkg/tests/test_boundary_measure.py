from fractions import Fraction

import pytest

from src.geometry.tree_model import EdgeClass, ProblemInstance, Shadow, Vertex, realize_edge, sigma
from src.kernels.piecewise_kernel import KernelKind, make_kernel, step
from src.measures.boundary_measure import (
    cross_cell_measure,
    cross_cell_oracle,
    edge_halves,
    edge_measure_full,
    edge_measure_shadow,
    edge_measure_union,
    intersection_measure,
    radon_nikodym,
    radon_nikodym_check,
    spine_cell_measure,
    spine_cell_oracle,
    spine_cell_shadows,
    total_visual_mass,
    visual_measure,
    visual_measure_general,
)
from src.utils.errors import BaseMismatchError, InvalidLevelError


def _sample_edges(inst):
    classes = [EdgeClass.aligned(i) for i in range(-3, inst.d + 3)]
    classes += [EdgeClass.transverse(i, j) for i in range(1, inst.d) for j in range(1, 3)]
    return [realize_edge(inst, c) for c in classes + [c.reverse() for c in classes]]


class TestVisualMeasure:
    def test_cone_masses(self):
        assert visual_measure(ProblemInstance(2, 2), sigma(0), Shadow(sigma(0), sigma(1))) == Fraction(1, 3)
        assert visual_measure(ProblemInstance(3, 2), sigma(0), Shadow(sigma(0), sigma(2))) == Fraction(1, 12)

    def test_base_mismatch(self):
        with pytest.raises(BaseMismatchError):
            visual_measure(ProblemInstance(2, 2), sigma(1), Shadow(sigma(0), sigma(2)))

    def test_probability_measure(self):
        for q in (2, 3, 5):
            inst = ProblemInstance(q, 3)
            for u in (sigma(0), Vertex(1, (0, 1)), sigma(-4)):
                assert total_visual_mass(inst, u) == 1

    def test_from_other_base(self):
        inst = ProblemInstance(2, 3)
        shadow = Shadow(sigma(0), sigma(1))
        assert visual_measure_general(inst, sigma(0), shadow) == visual_measure(inst, sigma(0), shadow)
        assert visual_measure_general(inst, sigma(2), shadow) == Fraction(5, 6)
        assert visual_measure_general(inst, sigma(-1), shadow) == Fraction(1, 6)

    def test_complementary_halves_sum_to_one(self):
        inst = ProblemInstance(3, 3)
        for u in (sigma(0), Vertex(2, (1, 2)), sigma(7)):
            assert visual_measure_general(inst, u, Shadow(sigma(1), sigma(2))) \
                + visual_measure_general(inst, u, Shadow(sigma(2), sigma(1))) == 1

    def test_intersection_of_overlapping_shadows(self):
        inst = ProblemInstance(2, 6)
        x, y = sigma(0), sigma(6)
        a, b = Shadow(x, sigma(2)), Shadow(y, sigma(4))
        # the overlap is the set of ends projecting onto sigma(2), sigma(3) or sigma(4)
        cells = [s for k in (2, 3, 4) for s in spine_cell_shadows(inst, k)]
        expected = sum(visual_measure_general(inst, x, s) for s in cells)
        assert intersection_measure(inst, x, a, b) == expected


class TestEdgeMeasure:
    @pytest.mark.parametrize("q", [2, 3, 5])
    def test_total_masses(self, q):
        inst = ProblemInstance(q, 4)
        for edge in _sample_edges(inst):
            plus, minus = edge_halves(*edge)
            assert edge_measure_shadow(inst, edge, plus) == 1
            assert edge_measure_shadow(inst, edge, minus) == -1
            assert edge_measure_full(inst, edge) == 0

    def test_values_stay_in_unit_interval(self):
        inst = ProblemInstance(3, 3)
        shadows = [Shadow(sigma(0), sigma(k)) for k in range(1, 5)] + [Shadow(sigma(2), Vertex(2, (1,)))]
        for edge in _sample_edges(inst):
            for s in shadows:
                assert -1 <= edge_measure_shadow(inst, edge, s) <= 1

    def test_nested_additivity(self):
        inst = ProblemInstance(3, 4)
        x = inst.x
        for k in range(1, 4):
            outer, inner = Shadow(x, sigma(k)), Shadow(x, sigma(k + 1))
            ring = spine_cell_shadows(inst, k)
            for edge in _sample_edges(inst):
                assert edge_measure_shadow(inst, edge, outer) == \
                    edge_measure_shadow(inst, edge, inner) + edge_measure_union(inst, edge, ring)


class TestSpineCells:
    def test_lemma_values(self):
        assert spine_cell_measure(ProblemInstance(2, 4), 1, 1) == Fraction(1, 2)
        assert spine_cell_measure(ProblemInstance(2, 4), 1, 2) == Fraction(-1, 2)
        assert spine_cell_measure(ProblemInstance(3, 4), 3, 1) == Fraction(2, 27)

    @pytest.mark.parametrize("q", [2, 3, 5])
    def test_positive_and_negative_mass(self, q):
        inst = ProblemInstance(q, 4)
        n = 30
        for i in (-2, 0, 3, 6):
            behind = sum(spine_cell_measure(inst, i, k) for k in range(i - n, i + 1))
            ahead = sum(spine_cell_measure(inst, i, k) for k in range(i + 1, i + n + 1))
            assert behind == 1 - Fraction(1, q) ** (n + 1)
            assert ahead == -(1 - Fraction(1, q) ** n)

    @pytest.mark.parametrize("q", [2, 3, 5])
    def test_oracle_matches_lemma(self, q):
        inst = ProblemInstance(q, 4)
        for i in (-2, 0, 1, 3, 5):
            for k in range(i - 8, i + 9):
                assert spine_cell_oracle(inst, i, k) == spine_cell_measure(inst, i, k)


class TestCrossCells:
    def test_lemma_values(self):
        assert cross_cell_measure(ProblemInstance(3, 4), 2, 1, 2, 1) == 0
        assert cross_cell_measure(ProblemInstance(5, 4), 1, 1, 2, 1) == Fraction(-4, 25)
        assert cross_cell_measure(ProblemInstance(5, 4), 1, 1, 3, 3) == 0

    @pytest.mark.parametrize("q", [3, 5])
    def test_oracle_matches_lemma(self, q):
        inst = ProblemInstance(q, 4)
        for i in range(1, 4):
            for j in range(1, 4):
                for k in range(i - 8, i + 9):
                    for l in range(j - 6, j + 7):
                        assert cross_cell_oracle(inst, i, j, k, l) == cross_cell_measure(inst, i, j, k, l), (i, j, k, l)

    def test_q2_realizable_cells(self):
        inst = ProblemInstance(2, 4)
        for i in range(1, 4):
            for j in range(1, 4):
                for k in range(i - 8, i + 9):
                    for l in range(j - 6, j + 7):
                        oracle = cross_cell_oracle(inst, i, j, k, l)
                        if oracle is None:
                            assert k == i and l >= j
                            continue
                        assert oracle == cross_cell_measure(inst, i, j, k, l)

    def test_q2_missing_cells_carry_no_mass(self):
        inst = ProblemInstance(2, 4)
        g_half = make_kernel(KernelKind.G_HALF, inst)
        for j in range(1, 6):
            beyond = Fraction(1, 2) * (step(j + 1) * g_half).total()
            assert beyond + cross_cell_measure(inst, 2, j, 2, j) == 0

    @pytest.mark.parametrize("q", [2, 3, 5])
    def test_partition_total_is_zero(self, q):
        inst = ProblemInstance(q, 4)
        g_half = make_kernel(KernelKind.G_HALF, inst)
        h = make_kernel(KernelKind.H, inst)
        for j in range(1, 5):
            column = Fraction(q - 1, q) * (g_half.total() - g_half(j))
            row = Fraction(q - 1, q * q) * g_half(j) * (h.total() - h(0))
            assert column + row + cross_cell_measure(inst, 2, j, 2, j) == 0


class TestRadonNikodym:
    def test_levels(self):
        assert radon_nikodym(ProblemInstance(2, 3), 3) == 8
        assert radon_nikodym(ProblemInstance(5, 0), 0) == 1
        assert radon_nikodym(ProblemInstance(2, 2), -2) == Fraction(1, 4)

    def test_invalid_level(self):
        with pytest.raises(InvalidLevelError):
            radon_nikodym(ProblemInstance(2, 2), 1)
        with pytest.raises(InvalidLevelError):
            radon_nikodym(ProblemInstance(2, 2), 4)

    @pytest.mark.parametrize("d", [0, 1, 2, 3, 4])
    def test_change_of_base(self, d):
        inst = ProblemInstance(3, d)
        shadows = [Shadow(sigma(0), sigma(k)) for k in range(1, d + 2)]
        shadows += [Shadow(sigma(d), sigma(k)) for k in range(-1, d)]
        shadows += [Shadow(sigma(1), Vertex(1, (1, 0))), Shadow(sigma(-2), sigma(-3))]
        for s in shadows:
            direct, weighted = radon_nikodym_check(inst, s)
            assert direct == weighted, s
