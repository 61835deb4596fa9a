"""Tests for tower truncations, their sections and universality."""

from __future__ import annotations

from pathlib import Path

import pytest

try:
    from core.algebra import SuperElement
    from geometry.gauss import gauss_morphism
    from geometry.grassmannian import NuGrassmannianSpec
    from geometry.limits import (
        NestedOpen,
        Tower,
        TowerSection,
        constant_section,
        corrupt_inclusion,
        inclusion_hom,
        lift_index,
        pull_down,
        reduced_embedding_check,
        restrict,
        restrict_index,
        standard_tower,
        tower_section_check,
        universality_check,
        verify_bundle_square,
        verify_inclusion_square,
        verify_transitivity,
        verify_tower,
    )
    from utils.exceptions import ContextMismatch, DimensionMismatch
    from utils.persistence import load_bundle_file
except ImportError:
    from src.core.algebra import SuperElement
    from src.geometry.gauss import gauss_morphism
    from src.geometry.grassmannian import NuGrassmannianSpec
    from src.geometry.limits import (
        NestedOpen,
        Tower,
        TowerSection,
        constant_section,
        corrupt_inclusion,
        inclusion_hom,
        lift_index,
        pull_down,
        reduced_embedding_check,
        restrict,
        restrict_index,
        standard_tower,
        tower_section_check,
        universality_check,
        verify_bundle_square,
        verify_inclusion_square,
        verify_transitivity,
        verify_tower,
    )
    from src.utils.exceptions import ContextMismatch, DimensionMismatch
    from src.utils.persistence import load_bundle_file


FIXTURES = Path(__file__).parent / "fixtures"
SMALL = NuGrassmannianSpec(1, 1, 2, 2)
BIG = NuGrassmannianSpec(1, 1, 3, 3)


@pytest.fixture(scope="module")
def rank10():
    return gauss_morphism(load_bundle_file(FIXTURES / "rank10_two_chart.json"))


# ===========================================================================
# Inclusion homomorphisms between two levels
# ===========================================================================


class TestInclusion:
    def test_index_lifting(self):
        assert lift_index(SMALL, BIG, (1, 3)).indices == (1, 4)
        assert restrict_index(SMALL, BIG, (1, 4)).indices == (1, 3)
        assert restrict_index(SMALL, BIG, (3, 4)) is None

    def test_shared_generators_are_fixed(self):
        hom = inclusion_hom(SMALL, BIG, (1, 4))
        context = SMALL.context()
        g = {name: SuperElement.generator(context, name) for name in ("x1", "x2", "e1", "e2")}
        assert hom.small_index.indices == (1, 3)
        assert hom.images["x1"] == g["x1"]
        assert hom.images["e1"] == g["e1"]
        assert hom.images["e3"] == g["e2"]
        assert hom.images["x3"] == g["x2"]
        for name in ("x2", "e2", "e4", "x4"):
            assert hom.images[name].is_zero(), name

    def test_odd_columns_read_through_nu(self):
        hom = inclusion_hom(SMALL, BIG, (4, 5))
        context = SMALL.context()
        g = {name: SuperElement.generator(context, name) for name in ("x1", "x2", "e1", "e2")}
        assert hom.small_index.indices == (3, 4)
        assert hom.images["x1"] == g["x1"]
        assert hom.images["e1"] == g["e1"]
        assert hom.images["x2"] == g["e1"] * g["e2"]
        assert hom.images["e2"] == g["x2"] * g["e1"]
        for name in ("e3", "x3", "e4", "x4"):
            assert hom.images[name].is_zero(), name

    def test_new_columns_give_the_zero_map(self):
        assert inclusion_hom(SMALL, BIG, (3, 4)).is_zero

    def test_rank_must_match(self):
        with pytest.raises(DimensionMismatch):
            inclusion_hom(NuGrassmannianSpec(1, 0, 2, 2), BIG, (1, 4))
        with pytest.raises(DimensionMismatch):
            inclusion_hom(BIG, SMALL, (1, 3))


class TestSquares:
    def test_inclusion_square(self):
        report = verify_inclusion_square(SMALL, BIG, (1, 4), (2, 4))
        assert report.passed, report.witnesses
        assert report.counts["squares"] == 1

    def test_bundle_square(self):
        report = verify_bundle_square(SMALL, BIG, (1, 4), (2, 4))
        assert report.passed, report.witnesses
        assert report.counts["bundle_squares"] == 1

    def test_square_outside_the_small_level_is_skipped(self):
        report = verify_inclusion_square(SMALL, BIG, (1, 4), (3, 4))
        assert report.passed
        assert "squares" not in report.counts
        assert report.skipped

    def test_corrupted_inclusion_is_caught(self):
        source = BIG.index((1, 4))
        broken = corrupt_inclusion(inclusion_hom(SMALL, BIG, source), "x1")
        report = verify_inclusion_square(SMALL, BIG, source, (2, 4), inclusions={source: broken})
        assert not report.passed
        assert any(w.location.endswith("x1") for w in report.witnesses)


# ===========================================================================
# Towers and sections
# ===========================================================================


class TestTower:
    def test_standard_levels(self):
        assert standard_tower(1, 1, 3).levels == [(2, 2), (3, 3), (4, 4)]
        assert standard_tower(1, 1, 2, reduced=True).levels == [(2, 0), (3, 0)]

    def test_levels_must_increase(self):
        with pytest.raises(DimensionMismatch):
            Tower(1, 1, [(2, 2), (2, 3)])

    def test_transitivity(self):
        report = verify_transitivity(standard_tower(1, 1, 3), index=(1, 3))
        assert report.passed, report.witnesses
        assert report.counts["chains"] == 1

    def test_small_tower(self):
        report = verify_tower(standard_tower(1, 0, 2, reduced=True))
        assert report.passed, report.witnesses
        assert report.counts["level 0: squares"] == 4
        assert report.details["levels"] == ["(1,0,2,0)", "(1,0,3,0)"]


class TestSections:
    TOWER = standard_tower(1, 1, 3)

    def test_shared_generator_is_a_section(self):
        report = tower_section_check(constant_section(self.TOWER, (1, 3), "x1"))
        assert report.passed, report.witnesses
        assert report.counts["levels"] == 2
        assert report.details["chart"] == "{1,3}"

    def test_four_levels(self):
        report = tower_section_check(constant_section(standard_tower(1, 1, 4), (1, 3), "x1"))
        assert report.passed, report.witnesses
        assert report.counts["levels"] == 3

    def test_generator_of_a_new_column_is_not(self):
        report = tower_section_check(constant_section(self.TOWER, (1, 3), "x2"))
        assert not report.passed
        assert report.witnesses[0].location == "level 1->0"

    def test_pulled_down_sections_are_compatible(self):
        top = SuperElement.generator(self.TOWER.spec(2).context(), "x1")
        section = pull_down(self.TOWER, (1, 3), top)
        assert section.sections[0] == SuperElement.generator(self.TOWER.spec(0).context(), "x1")
        assert tower_section_check(section).passed

    def test_section_needs_two_levels(self):
        index = self.TOWER.spec(0).index((1, 3))
        lonely = TowerSection(self.TOWER, index, [SuperElement.generator(self.TOWER.spec(0).context(), "x1")])
        with pytest.raises(DimensionMismatch):
            tower_section_check(lonely)

    def test_restriction_to_a_larger_open(self):
        value = SuperElement.generator(self.TOWER.spec(0).context(), "x1")
        with pytest.raises(ContextMismatch):
            restrict(value, NestedOpen("V", ("x1",)), NestedOpen("U"))

    def test_nested_opens(self):
        section = constant_section(self.TOWER, (1, 3), "x1")
        section.opens = [NestedOpen("U"), NestedOpen("V", ("x1",)), NestedOpen("W", ("x1", "x2"))]
        report = tower_section_check(section)
        assert report.passed, report.witnesses
        assert "x1" in report.assumptions


# ===========================================================================
# Universality and the reduced embedding
# ===========================================================================


class TestUniversality:
    def test_rank_one_bundle(self, rank10):
        report = universality_check(rank10, (2, 0), depth=3)
        assert report.passed, report.witnesses
        assert report.details["levels"] == ["(1,0,2,0)", "(1,0,3,1)", "(1,0,4,2)"]
        assert report.counts["kernels"] == 6
        assert report.counts["charts"] == 6

    def test_dropping_a_block_breaks_injectivity(self, rank10):
        report = universality_check(rank10, (2, 0), depth=2, corrupt=True)
        assert not report.passed
        assert any(w.location.startswith("kernel") for w in report.witnesses)

    def test_level_below_the_gauss_level(self, rank10):
        with pytest.raises(DimensionMismatch):
            universality_check(rank10, (1, 0))


class TestReducedEmbedding:
    def test_two_levels(self):
        report = reduced_embedding_check(1, [(2, 1), (3, 2)])
        assert report.passed, report.witnesses
        assert report.counts["frames"] == 5
        assert report.counts["across"] == 2
        assert report.counts["isomorphisms"] == 5

    def test_collapsed_frame_has_no_comparison_map(self):
        report = reduced_embedding_check(1, [(2, 1)], corrupt=True)
        assert not report.passed
        witness = report.witnesses[0]
        assert witness.location.startswith("T (2|1)")
        assert witness.expected == "invertible"
        assert "isomorphisms" not in report.counts

    def test_no_levels_is_vacuous(self):
        report = reduced_embedding_check(1, [])
        assert report.passed
        assert report.counts == {}
