"""Tests for block supermatrices, pseudo-units and graded inversion."""

from __future__ import annotations

import random

import pytest
import sympy

try:
    from core.algebra import AssumptionSet, GeneratorContext, SuperElement
    from core.nu import NU_UNIT, NuInvolution, Ring
    from core.parser import parse_entry
    from core.supermatrix import (
        MultiIndex,
        SuperMatrix,
        delete_columns,
        identity,
        invert,
        matrices_equal,
        minor,
        pseudo_unit,
        reduced_determinant,
        select_rows,
        smul,
        zeros,
    )
    from utils.exceptions import DimensionMismatch, ParityViolation, Singular
except ImportError:
    from src.core.algebra import AssumptionSet, GeneratorContext, SuperElement
    from src.core.nu import NU_UNIT, NuInvolution, Ring
    from src.core.parser import parse_entry
    from src.core.supermatrix import (
        MultiIndex,
        SuperMatrix,
        delete_columns,
        identity,
        invert,
        matrices_equal,
        minor,
        pseudo_unit,
        reduced_determinant,
        select_rows,
        smul,
        zeros,
    )
    from src.utils.exceptions import DimensionMismatch, ParityViolation, Singular


CONTEXT = GeneratorContext(["x"], ["e1", "e2", "e3"])
NU = NuInvolution.for_context(CONTEXT)


def matrix(split, rows, context=CONTEXT):
    return SuperMatrix(split, split, [[parse_entry(x, context) for x in row] for row in rows], context)


def _random_even(rng: random.Random) -> SuperElement:
    pairs = [((), rng.randint(-3, 3))]
    for monomial in ((0, 1), (0, 2), (1, 2)):
        if rng.random() < 0.5:
            pairs.append((monomial, rng.randint(-2, 2)))
    return SuperElement.from_terms(CONTEXT, pairs)


def _random_odd(rng: random.Random) -> SuperElement:
    pairs = [((i,), rng.randint(-2, 2)) for i in range(3) if rng.random() < 0.6]
    if rng.random() < 0.3:
        pairs.append(((0, 1, 2), rng.randint(-2, 2)))
    return SuperElement.from_terms(CONTEXT, pairs)


def random_invertible(rng: random.Random, k: int, l: int) -> SuperMatrix:
    """Random k|l matrix whose diagonal blocks have an invertible constant body"""
    while True:
        rows = []
        for i in range(k + l):
            row = []
            for j in range(k + l):
                odd = (i < k) != (j < k)
                row.append(Ring(_random_odd(rng) if odd else _random_even(rng)))
            rows.append(row)
        candidate = SuperMatrix((k, l), (k, l), rows, CONTEXT)
        even = sympy.Matrix(k, k, lambda i, j: candidate.entries[i][j].value.body())
        odd = sympy.Matrix(l, l, lambda i, j: candidate.entries[k + i][k + j].value.body())
        if even.det() != 0 and odd.det() != 0:
            return candidate


# ===========================================================================
# Multi-indices
# ===========================================================================


class TestMultiIndex:
    def test_counts_and_label(self):
        index = MultiIndex([1, 3], 2, 2)
        assert index.even_count == 1
        assert index.odd_count == 1
        assert index.is_balanced(1, 1)
        assert index.label == "{1,3}"
        assert index.complement() == (2, 4)

    def test_must_increase(self):
        with pytest.raises(DimensionMismatch):
            MultiIndex([3, 1], 2, 2)

    def test_out_of_range(self):
        with pytest.raises(DimensionMismatch):
            MultiIndex([1, 5], 2, 2)


# ===========================================================================
# Construction and slicing
# ===========================================================================


class TestConstruction:
    def test_parity_violation_is_reported(self):
        bad = matrix((1, 1), [["1", "x"], ["0", "1"]])
        assert bad.parity_violations() == [(0, 1)]
        with pytest.raises(ParityViolation):
            bad.validate()

    def test_pseudo_unit_places_nu_on_mismatched_slots(self):
        unit = pseudo_unit(MultiIndex([1, 2, 3, 6], 3, 3), CONTEXT, 2, 2)
        diagonal = [unit.entries[a][a] for a in range(4)]
        assert [d is NU_UNIT for d in diagonal] == [False, False, True, False]
        assert unit.row_split == (3, 1)
        assert unit.col_split == (2, 2)

    def test_minor_and_rows(self):
        a = SuperMatrix((1, 1), (2, 2), [[parse_entry(x, CONTEXT) for x in row] for row in (["1", "x", "e1", "0"], ["e2", "e3", "1", "x"])], CONTEXT)
        index = MultiIndex([2, 3], 2, 2)
        assert minor(a, index).to_text() == [["x", "e1"], ["e3", "1"]]
        assert delete_columns(a, index).to_text() == [["1", "0"], ["e2", "x"]]
        stacked = SuperMatrix((2, 2), (1, 1), [[parse_entry(x, CONTEXT) for x in row] for row in (["1", "e1"], ["x", "e2"], ["e3", "1"], ["e1", "x"])], CONTEXT)
        assert select_rows(stacked, MultiIndex([1, 4], 2, 2)).to_text() == [["1", "e1"], ["e1", "x"]]

    def test_multiplication_needs_matching_splits(self):
        with pytest.raises(DimensionMismatch):
            smul(identity(CONTEXT, 1, 1), zeros(CONTEXT, (2, 0), (1, 1)), NU)


# ===========================================================================
# Inversion
# ===========================================================================


class TestInvert:
    def test_one_one_example(self):
        b = matrix((1, 1), [["1", "e1"], ["e2", "1"]])
        expected = matrix((1, 1), [["1 + e1*e2", "-e1"], ["-e2", "1 - e1*e2"]])
        assert matrices_equal(invert(b, NU), expected, NU)

    def test_function_pivot_records_assumption(self):
        assumptions = AssumptionSet()
        inverse = invert(matrix((1, 0), [["x"]]), NU, assumptions)
        assert inverse.entries[0][0].value * SuperElement.generator(CONTEXT, "x") == 1
        assert assumptions.as_strings() == ["x"]

    def test_zero_matrix_is_singular(self):
        with pytest.raises(Singular) as info:
            invert(zeros(CONTEXT, (1, 1), (1, 1)), NU)
        assert "Reduced determinant" in str(info.value)

    def test_nilpotent_pivot_is_singular(self):
        with pytest.raises(Singular):
            invert(matrix((1, 0), [["e1*e2"]]), NU)

    def test_pseudo_unit_is_its_own_inverse(self):
        unit = pseudo_unit(MultiIndex([1, 2], 2, 0), CONTEXT, 1, 1)
        inverse = invert(unit, NU)
        assert matrices_equal(smul(unit, inverse, NU), identity(CONTEXT, 1, 1), NU)
        assert inverse.entries[1][1] is NU_UNIT

    def test_reduced_determinant_of_the_blocks(self):
        b = matrix((1, 1), [["x", "e1"], ["e2", "1nu"]])
        assert reduced_determinant(b) == sympy.Symbol("x")
        assert reduced_determinant(matrix((1, 1), [["e1*e2", "e1"], ["e2", "1"]])) == 0

    def test_function_pivot_before_formal_unit(self):
        assumptions = AssumptionSet()
        inverse = invert(matrix((1, 1), [["x", "e2"], ["1nu", "x"]]), NU, assumptions)
        assert inverse.rows == 2
        assert "x" in assumptions

    @pytest.mark.parametrize("k,l", [(1, 1), (2, 1), (1, 2)])
    def test_seeded_random_inverses(self, k, l):
        rng = random.Random(20 + 3 * k + l)
        for _ in range(100 // 3 + 1):
            b = random_invertible(rng, k, l)
            inverse = invert(b, NU)
            assert matrices_equal(smul(b, inverse, NU), identity(CONTEXT, k, l), NU)
            assert matrices_equal(smul(inverse, b, NU), identity(CONTEXT, k, l), NU)
