"""Tests for index doubling, induced chart maps, linear homotopies and the retraction."""

from __future__ import annotations

from pathlib import Path

import pytest
import sympy

try:
    from core.algebra import SuperElement
    from geometry.gauss import gauss_morphism
    from geometry.grassmannian import NuGrassmannianSpec
    from geometry.homotopy import (
        EVEN,
        ODD,
        PLAIN,
        SHIFT,
        HomotopyFamily,
        column_map,
        index_map,
        induced_chart_hom,
        inclusion_on_trivial,
        linear_homotopy,
        retraction_check,
        shift_column,
        verify_homotopy,
    )
    from utils.exceptions import DimensionMismatch
    from utils.persistence import load_bundle_file
except ImportError:
    from src.core.algebra import SuperElement
    from src.geometry.gauss import gauss_morphism
    from src.geometry.grassmannian import NuGrassmannianSpec
    from src.geometry.homotopy import (
        EVEN,
        ODD,
        PLAIN,
        SHIFT,
        HomotopyFamily,
        column_map,
        index_map,
        induced_chart_hom,
        inclusion_on_trivial,
        linear_homotopy,
        retraction_check,
        shift_column,
        verify_homotopy,
    )
    from src.utils.exceptions import DimensionMismatch
    from src.utils.persistence import load_bundle_file


FIXTURES = Path(__file__).parent / "fixtures"


def gauss(name: str):
    return gauss_morphism(load_bundle_file(FIXTURES / name))


# ===========================================================================
# Index maps
# ===========================================================================


class TestIndexMaps:
    def test_even_and_odd_doubling(self):
        spec = NuGrassmannianSpec(1, 1, 2, 2)
        target, index = index_map(EVEN, spec, (1, 3))
        assert target.label == "(1,1,4,4)"
        assert index.indices == (2, 6)
        _, index = index_map(ODD, spec, (1, 3))
        assert index.indices == (1, 5)

    def test_shift_keeps_even_columns(self):
        assert shift_column(2, 2, 5) == 2
        assert shift_column(3, 2, 5) == 6
        mapping, m, n = column_map(SHIFT, 3, 2, k=1, l=1)
        assert (m, n) == (5, 3)
        assert [mapping(c) for c in range(1, 6)] == [1, 2, 3, 6, 7]

    def test_doubling_preserves_balance(self):
        spec = NuGrassmannianSpec(2, 1, 3, 2)
        for index in spec.balanced_indices():
            for kind in (EVEN, ODD):
                target, image = index_map(kind, spec, index)
                assert image.is_balanced(target.k, target.l)

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            column_map("sideways", 2, 2)


class TestTrivialInclusion:
    def test_even_inclusion(self):
        assert inclusion_on_trivial(EVEN, 3, 2).basis_images()["e3"] == "e6"

    def test_odd_inclusion(self):
        assert inclusion_on_trivial(ODD, 3, 2).basis_images()["f2"] == "f3"

    def test_plain_inclusion_fixes_the_basis(self):
        images = inclusion_on_trivial(PLAIN, 2, 2).basis_images()
        assert images == {"e1": "e1", "e2": "e2", "f1": "f1", "f2": "f2"}
        assert inclusion_on_trivial(PLAIN, 2, 2).target == (4, 4)

    def test_shift_is_not_a_trivial_inclusion(self):
        with pytest.raises(ValueError):
            inclusion_on_trivial(SHIFT, 2, 2)


# ===========================================================================
# Induced chart homomorphisms
# ===========================================================================


class TestInducedChartHom:
    def test_even_doubling_of_the_projective_line(self):
        spec = NuGrassmannianSpec(1, 0, 2, 0)
        hom = induced_chart_hom(EVEN, spec, (1,))
        context = spec.context()
        x1 = SuperElement.generator(context, "x1")
        assert hom.source[1].indices == (2,)
        assert hom.images["x3"] == x1
        assert hom.images["x1"].is_zero()
        assert hom.images["x2"].is_zero()

    def test_odd_doubling_keeps_odd_coordinates(self):
        spec = NuGrassmannianSpec(1, 1, 2, 2)
        hom = induced_chart_hom(ODD, spec, (1, 3))
        context = spec.context()
        assert all(v.context == context for v in hom.images.values())
        nonzero = {name for name, v in hom.images.items() if not v.is_zero()}
        assert len(nonzero) == 4


# ===========================================================================
# Linear homotopy of Gauss morphisms
# ===========================================================================


class TestHomotopy:
    def test_endpoints_and_kernel(self):
        family = linear_homotopy(gauss("rank10_two_chart.json"), gauss("rank10_two_chart.json"))
        report = verify_homotopy(family)
        assert report.passed, report.witnesses
        assert report.counts["endpoints"] == 4
        assert report.counts["kernel_certificates"] == 6
        assert family.split == (4, 0)

    def test_two_presentations_with_odd_generators(self):
        family = linear_homotopy(gauss("trivial_t2.json"), gauss("rank11_two_chart.json"))
        report = verify_homotopy(family, samples=(sympy.Rational(1, 3),))
        assert report.passed, report.witnesses

    def test_classifying_commutes_with_specialisation(self):
        family = HomotopyFamily(gauss("rank10_two_chart.json"), gauss("rank10_two_chart.json"))
        general = family.classifying((2,))
        for value in (0, sympy.Rational(1, 2)):
            specialised = family.classifying((2,), value=value)
            for name, image in family.specialize_images(general, value).items():
                assert image == specialised[name], (value, name)

    def test_family_needs_matching_charts(self):
        with pytest.raises(DimensionMismatch):
            HomotopyFamily(gauss("trivial_t2.json"), gauss("trivial_t3.json"))


# ===========================================================================
# Deformation retraction of projective superspace
# ===========================================================================


class TestRetraction:
    @pytest.mark.parametrize("m,n,charts", [(1, 1, 2), (2, 2, 3)])
    def test_retraction(self, m, n, charts):
        report = retraction_check(m, n)
        assert report.passed, report.witnesses
        assert report.counts["endpoints"] == 2 * charts
        assert report.counts["pairs"] == charts * (charts - 1)

    def test_corrupted_retraction(self):
        report = retraction_check(1, 1, corrupt=True)
        assert not report.passed
        assert report.witnesses[0].location.startswith("j1")
