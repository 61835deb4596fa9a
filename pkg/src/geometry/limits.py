"""Finite truncations of Grassmannian towers.

Each level of a tower is a ν-Grassmannian of the same k|l with larger
m|n. Consecutive levels are joined by the inclusion homomorphisms that
fix shared chart generators and send the others to zero; every check
here is made level-wise up to a declared depth.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from itertools import permutations
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple

try:
    from config.settings import DEFAULT_SEED, DEFAULT_TOWER_DEPTH, SAMPLE_THRESHOLD
    from core.algebra import AssumptionSet, GeneratorContext, SuperElement, equals, format_element, substitute
    from core.nu import NuInvolution
    from core.parser import parse_expression
    from core.supermatrix import (
        MultiIndex,
        SuperMatrix,
        first_difference,
        identity,
        invert,
        minor,
        smul,
        substitute_matrix,
        scalar_entry,
    )
    from geometry.bundle import canonical_cocycle
    from geometry.gauss import GaussMorphism, target_spec, verify_pullback_iso
    from geometry.grassmannian import NuGrassmannianSpec, check_coordinate_image, coordinate_matrix, read_cell, transition
    from geometry.homotopy import classify_stack, embed_columns, embed_rows, shift_column
    from utils.exceptions import ContextMismatch, DimensionMismatch, EmptyOverlap, NuGrassError, Singular
    from utils.log import get_logger
    from utils.report import Report
    from utils.workers import run_tasks
except ImportError:
    from src.config.settings import DEFAULT_SEED, DEFAULT_TOWER_DEPTH, SAMPLE_THRESHOLD
    from src.core.algebra import AssumptionSet, GeneratorContext, SuperElement, equals, format_element, substitute
    from src.core.nu import NuInvolution
    from src.core.parser import parse_expression
    from src.core.supermatrix import (
        MultiIndex,
        SuperMatrix,
        first_difference,
        identity,
        invert,
        minor,
        smul,
        substitute_matrix,
        scalar_entry,
    )
    from src.geometry.bundle import canonical_cocycle
    from src.geometry.gauss import GaussMorphism, target_spec, verify_pullback_iso
    from src.geometry.grassmannian import NuGrassmannianSpec, check_coordinate_image, coordinate_matrix, read_cell, transition
    from src.geometry.homotopy import classify_stack, embed_columns, embed_rows, shift_column
    from src.utils.exceptions import ContextMismatch, DimensionMismatch, EmptyOverlap, NuGrassError, Singular
    from src.utils.log import get_logger
    from src.utils.report import Report
    from src.utils.workers import run_tasks

logger = get_logger("limits")


def level_column_map(small: NuGrassmannianSpec, big: NuGrassmannianSpec) -> Callable[[int], int]:
    """Column c of the small level sits at column c (even) or c + m' - m (odd) of the big one"""
    return lambda c: shift_column(c, small.m, big.m)


def _require_same_rank(small: NuGrassmannianSpec, big: NuGrassmannianSpec) -> None:
    if (small.k, small.l) != (big.k, big.l):
        raise DimensionMismatch(f"Levels {small.label} and {big.label} have different rank")
    if small.m > big.m or small.n > big.n:
        raise DimensionMismatch(f"Level {small.label} does not sit inside {big.label}")


def restrict_index(small: NuGrassmannianSpec, big: NuGrassmannianSpec, index) -> Optional[MultiIndex]:
    """The small-level index whose image is ``index``, or None when there is none"""
    if not isinstance(index, MultiIndex):
        index = big.index(index)
    mapping = level_column_map(small, big)
    inverse = {mapping(c): c for c in range(1, small.m + small.n + 1)}
    if any(c not in inverse for c in index):
        return None
    return small.index([inverse[c] for c in index])


def lift_index(small: NuGrassmannianSpec, big: NuGrassmannianSpec, index) -> MultiIndex:
    if not isinstance(index, MultiIndex):
        index = small.index(index)
    mapping = level_column_map(small, big)
    return big.index([mapping(c) for c in index])


@dataclass
class InclusionHom:
    """Big-level chart generators written over the matching small-level chart.

    ``images`` is None for the zero map, used when the big chart has no
    small-level counterpart.
    """

    small: NuGrassmannianSpec
    big: NuGrassmannianSpec
    index: MultiIndex
    small_index: Optional[MultiIndex]
    images: Optional[Dict[str, SuperElement]]

    @property
    def is_zero(self) -> bool:
        return self.images is None

    @property
    def context(self) -> GeneratorContext:
        return self.small.context()


def inclusion_hom(small: NuGrassmannianSpec, big: NuGrassmannianSpec, index) -> InclusionHom:
    """Shared generators are fixed and generators of new columns go to zero.

    A big-level generator in an old column reads the small chart's entry at
    the same place, through nu when only one of the two cells is wrapped.
    """
    _require_same_rank(small, big)
    if not isinstance(index, MultiIndex):
        index = big.index(index)
    small_index = restrict_index(small, big, index)
    if small_index is None:
        return InclusionHom(small, big, index, None, None)

    big_chart = coordinate_matrix(big, index)
    small_chart = coordinate_matrix(small, small_index)
    mapping = level_column_map(small, big)
    old_columns = {mapping(c) - 1: c - 1 for c in range(1, small.m + small.n + 1)}
    zero = SuperElement.zero(small_chart.context)

    images: Dict[str, SuperElement] = {}
    for name, cell in big_chart.cells.items():
        column = old_columns.get(cell.col)
        if column is None:
            images[name] = zero
            continue
        value = read_cell(small_chart, small_chart.matrix.entries[cell.row][column], cell)
        check_coordinate_image(big_chart.context, name, value)
        images[name] = value
    return InclusionHom(small, big, index, small_index, images)


def corrupt_inclusion(original: InclusionHom, name: str) -> InclusionHom:
    """Perturb one image; used as a negative control"""
    images = dict(original.images or {})
    if original.big.context().is_even(name):
        images[name] = images[name] + SuperElement.one(original.context)
    else:
        images[name] = -images[name]
    return InclusionHom(original.small, original.big, original.index, original.small_index, images)


def permissible_indices(small: NuGrassmannianSpec, big: NuGrassmannianSpec) -> List[MultiIndex]:
    return [lift_index(small, big, index) for index in small.multi_indices()]


# ----------------------------------------------------------------------
# Commuting squares between two levels
# ----------------------------------------------------------------------


def verify_inclusion_square(
    small: NuGrassmannianSpec,
    big: NuGrassmannianSpec,
    source,
    target,
    inclusions: Optional[Mapping[MultiIndex, InclusionHom]] = None,
) -> Report:
    """iota_I(phi'_IJ(g)) = phi_IJ(iota_J(g)) for every generator g of big chart J"""
    report = Report(check="tower-inclusion-square")
    source = source if isinstance(source, MultiIndex) else big.index(source)
    target = target if isinstance(target, MultiIndex) else big.index(target)
    inclusions = inclusions or {}
    iota_i = inclusions.get(source) or inclusion_hom(small, big, source)
    iota_j = inclusions.get(target) or inclusion_hom(small, big, target)
    location = f"{small.label}<-{big.label} {source.label}->{target.label}"
    if iota_i.is_zero or iota_j.is_zero:
        report.skip(f"square {location}: not permissible")
        return report
    try:
        big_step = transition(big, source, target)
        small_step = transition(small, iota_i.small_index, iota_j.small_index)
    except EmptyOverlap as exc:
        report.skip(f"square {location}: {exc}")
        return report
    except NuGrassError as exc:
        report.fail(f"square {location}", expected="verifiable overlap", actual=f"{type(exc).__name__}: {exc}")
        return report

    context = iota_i.context
    assumptions = AssumptionSet()
    for name, image in big_step.images.items():
        left = substitute(image, iota_i.images, context, assumptions)
        right = substitute(iota_j.images[name], small_step.images, context, assumptions)
        if left != right:
            report.fail(f"square {location} {name}", expected=format_element(right), actual=format_element(left))
    report.count("squares")
    report.assume(assumptions)
    return report


def verify_bundle_square(small: NuGrassmannianSpec, big: NuGrassmannianSpec, source, target) -> Report:
    """iota_I pulls the big canonical cocycle G'_IJ back to G_IJ"""
    _require_same_rank(small, big)
    report = Report(check="tower-bundle-square")
    source = source if isinstance(source, MultiIndex) else big.index(source)
    target = target if isinstance(target, MultiIndex) else big.index(target)
    iota_i = inclusion_hom(small, big, source)
    small_target = restrict_index(small, big, target)
    location = f"{small.label}<-{big.label} {source.label}->{target.label}"
    if iota_i.is_zero or small_target is None:
        report.skip(f"bundle square {location}: not permissible")
        return report
    assumptions = AssumptionSet()
    try:
        big_cocycle = canonical_cocycle(big, source, target, assumptions)
        small_cocycle = canonical_cocycle(small, iota_i.small_index, small_target, assumptions)
    except EmptyOverlap as exc:
        report.skip(f"bundle square {location}: {exc}")
        return report
    except NuGrassError as exc:
        report.fail(f"bundle square {location}", expected="verifiable overlap", actual=f"{type(exc).__name__}: {exc}")
        return report
    chart = coordinate_matrix(small, iota_i.small_index)
    pulled = substitute_matrix(big_cocycle, iota_i.images, iota_i.context, assumptions)
    where = first_difference(small_cocycle, pulled, chart.involution)
    if where is not None:
        i, j = where
        report.fail(f"bundle square {location} entry ({i + 1},{j + 1})", expected=small_cocycle.to_text()[i][j], actual=pulled.to_text()[i][j])
    report.count("bundle_squares")
    report.assume(assumptions)
    return report


def _square_task(task) -> Report:
    small, big, source, target = task
    report = verify_inclusion_square(small, big, source, target)
    report.absorb(verify_bundle_square(small, big, source, target))
    return report


def verify_level_squares(
    small: NuGrassmannianSpec,
    big: NuGrassmannianSpec,
    workers: int = 1,
    sample: Optional[int] = None,
    seed: int = DEFAULT_SEED,
    threshold: int = SAMPLE_THRESHOLD,
) -> Report:
    """Inclusion and bundle squares over every ordered pair of permissible big charts"""
    report = Report(check="tower-squares")
    indices = permissible_indices(small, big)
    pairs = list(permutations(indices, 2)) + [(index, index) for index in indices]
    report.counts["pairs_available"] = len(pairs)
    limit = sample if sample is not None else threshold
    if len(pairs) > limit or sample is not None:
        pairs = sorted(random.Random(seed).sample(pairs, min(limit, len(pairs))))
        report.details["sampled"] = True
        report.details["seed"] = seed
    logger.debug("checking %d squares between %s and %s", len(pairs), small.label, big.label)
    for result in run_tasks(_square_task, [(small, big, a, b) for a, b in pairs], workers):
        report.absorb(result)
    return report


# ----------------------------------------------------------------------
# Towers and their sections
# ----------------------------------------------------------------------


@dataclass
class Tower:
    k: int
    l: int
    levels: List[Tuple[int, int]]

    def __post_init__(self) -> None:
        reduced = all(n == 0 for _, n in self.levels)
        for (m, n), (m2, n2) in zip(self.levels, self.levels[1:]):
            if m2 <= m or (not reduced and n2 <= n):
                raise DimensionMismatch(f"Tower levels must increase: {(m, n)} then {(m2, n2)}")

    @property
    def depth(self) -> int:
        return len(self.levels)

    def spec(self, level: int) -> NuGrassmannianSpec:
        m, n = self.levels[level]
        return NuGrassmannianSpec(self.k, self.l, m, n)

    def inclusion(self, level: int, index) -> InclusionHom:
        """From level + 1 down to ``level``"""
        return inclusion_hom(self.spec(level), self.spec(level + 1), index)

    def lift(self, index, start: int, stop: int) -> MultiIndex:
        for level in range(start, stop):
            index = lift_index(self.spec(level), self.spec(level + 1), index)
        return index


def standard_tower(k: int, l: int, depth: int = DEFAULT_TOWER_DEPTH, reduced: bool = False) -> Tower:
    """Levels (k+1+i | l+1+i), or (k+1+i | 0) for the reduced tower"""
    levels = [(k + 1 + i, 0 if reduced else l + 1 + i) for i in range(depth)]
    return Tower(k, l, levels)


def verify_transitivity(tower: Tower, index=None, depth: Optional[int] = None) -> Report:
    """Going down two or more levels at once agrees with going down one level at a time"""
    report = Report(check="tower-transitivity")
    depth = min(depth or tower.depth, tower.depth)
    bottom = tower.spec(0)
    indices = [index if isinstance(index, MultiIndex) else bottom.index(index)] if index is not None else bottom.multi_indices()
    for start in indices:
        for top in range(2, depth):
            big_index = tower.lift(start, 0, top)
            direct = inclusion_hom(bottom, tower.spec(top), big_index)
            steps = [tower.inclusion(level, tower.lift(start, 0, level + 1)) for level in range(top - 1, -1, -1)]
            if direct.is_zero or any(step.is_zero for step in steps):
                report.skip(f"chain {start.label} level {top}: not permissible")
                continue
            for name, image in direct.images.items():
                value = SuperElement.generator(tower.spec(top).context(), name)
                for step in steps:
                    value = substitute(value, step.images, step.context)
                if value != image:
                    report.fail(f"transitivity {start.label} level {top} {name}", expected=format_element(image), actual=format_element(value))
            report.count("chains")
    report.details["depth"] = depth
    return report


@dataclass
class NestedOpen:
    """A chart localised at extra nonvanishing polynomials"""

    name: str
    conditions: Tuple[str, ...] = ()


def restrict(value: SuperElement, source: NestedOpen, target: NestedOpen, assumptions: Optional[AssumptionSet] = None) -> SuperElement:
    """Restriction of a section from ``source`` to the smaller open ``target``"""
    if not set(source.conditions) <= set(target.conditions):
        raise ContextMismatch(f"{target.name} is not contained in {source.name}")
    if assumptions is not None:
        for condition in target.conditions:
            assumptions.add(_condition(value.context, condition))
    return value


def _condition(context: GeneratorContext, text: str):
    return parse_expression(text, context).body()


@dataclass
class TowerSection:
    tower: Tower
    index: MultiIndex
    sections: List[SuperElement]
    opens: List[NestedOpen] = field(default_factory=lambda: [NestedOpen("U")])

    @property
    def depth(self) -> int:
        return len(self.sections)

    def chart(self, level: int) -> MultiIndex:
        return self.tower.lift(self.index, 0, level)


def constant_section(tower: Tower, index, name: str) -> TowerSection:
    """The generator ``name`` at every level"""
    index = index if isinstance(index, MultiIndex) else tower.spec(0).index(index)
    sections = [SuperElement.generator(tower.spec(level).context(), name) for level in range(tower.depth)]
    return TowerSection(tower, index, sections)


def pull_down(tower: Tower, index, top: SuperElement) -> TowerSection:
    """Sections obtained from a top-level section by the inclusions"""
    index = index if isinstance(index, MultiIndex) else tower.spec(0).index(index)
    sections = [top]
    for level in range(tower.depth - 2, -1, -1):
        step = tower.inclusion(level, tower.lift(index, 0, level + 1))
        sections.insert(0, substitute(sections[0], step.images, step.context))
    return TowerSection(tower, index, sections)


def tower_section_check(section: TowerSection) -> Report:
    """iota(f_{i+1}) = f_i at each consecutive pair plus the restriction axioms"""
    report = Report(check="tower-section")
    tower = section.tower
    if section.depth < 2:
        raise DimensionMismatch("A tower section needs at least two levels")
    assumptions = AssumptionSet()
    for level in range(section.depth - 1):
        step = tower.inclusion(level, section.chart(level + 1))
        if step.is_zero:
            report.fail(f"level {level + 1}", expected="permissible chart", actual=section.chart(level + 1).label)
            continue
        pulled = substitute(section.sections[level + 1], step.images, step.context, assumptions)
        if pulled != section.sections[level]:
            report.fail(
                f"level {level + 1}->{level}",
                expected=format_element(section.sections[level]),
                actual=format_element(pulled),
            )
        report.count("levels")

    for level, value in enumerate(section.sections):
        for open_ in section.opens:
            if restrict(value, open_, open_) != value:
                report.fail(f"restriction {open_.name} level {level}", expected="identity")
        for outer, middle, inner in zip(section.opens, section.opens[1:], section.opens[2:]):
            direct = restrict(value, outer, inner, assumptions)
            stepwise = restrict(restrict(value, outer, middle), middle, inner, assumptions)
            if direct != stepwise:
                report.fail(f"restriction {outer.name}>{middle.name}>{inner.name} level {level}", expected=format_element(direct), actual=format_element(stepwise))
        report.count("restrictions")
    report.assume(assumptions)
    report.details["chart"] = section.index.label
    return report


def verify_tower(
    tower: Tower,
    workers: int = 1,
    sample: Optional[int] = None,
    seed: int = DEFAULT_SEED,
    threshold: int = SAMPLE_THRESHOLD,
) -> Report:
    """Squares between consecutive levels, transitivity and the shared-generator sections"""
    report = Report(check="tower-verify")
    report.details["levels"] = [tower.spec(level).label for level in range(tower.depth)]
    for level in range(tower.depth - 1):
        squares = verify_level_squares(tower.spec(level), tower.spec(level + 1), workers, sample, seed, threshold)
        report.absorb(squares, prefix=f"level {level}: ")
    report.absorb(verify_transitivity(tower))
    if tower.depth >= 2:
        bottom = tower.spec(0)
        for index in bottom.balanced_indices():
            chart = coordinate_matrix(bottom, index)
            if not chart.coordinates:
                continue
            name = chart.coordinates[0]
            report.absorb(tower_section_check(constant_section(tower, index, name)), prefix=f"section {index.label}: ")
            break
    return report


# ----------------------------------------------------------------------
# Universality of the tower and the reduced embedding
# ----------------------------------------------------------------------


def _drop_last_block(gauss: GaussMorphism, matrix: SuperMatrix) -> SuperMatrix:
    k, l = gauss.bundle.rank
    last = gauss.charts.index(gauss.members[-1])
    columns = {gauss.layout.column(last, i) for i in range(k + l)}
    zero = scalar_entry(gauss.base, 0)
    rows = [[zero if c in columns else x for c, x in enumerate(row)] for row in matrix.entries]
    return SuperMatrix(matrix.row_split, matrix.col_split, rows, matrix.context)


def universality_check(
    gauss: GaussMorphism,
    level: Tuple[int, int],
    depth: int = DEFAULT_TOWER_DEPTH,
    corrupt: bool = False,
) -> Report:
    """The Gauss morphism pushed up the tower stays injective and keeps its classifying maps.

    At each level (i + s | j + s), s < depth, the stacked frames are
    embedded by the plain column inclusion. Each embedded frame times the
    embedded left inverse must be the identity, and classifying on the
    lifted chart followed by the inclusion down must agree with
    classifying at the Gauss level. The pullback isomorphism is re-run
    once since every level pulls back the same cocycle.
    """
    report = Report(check="universality")
    base = target_spec(gauss)
    k, l = gauss.bundle.rank
    i, j = level
    if i < base.m or j < base.n:
        raise DimensionMismatch(f"Level ({i}|{j}) is below the Gauss level ({base.m}|{base.n})")
    involution = gauss.involution
    stacks = {b: gauss.stacked[b] for b in gauss.members}
    if corrupt:
        stacks = {b: _drop_last_block(gauss, m) for b, m in stacks.items()}
    reference = stacks[gauss.reference]

    classified = {}
    for index in base.balanced_indices():
        try:
            classified[index] = classify_stack(reference, base, index, involution)
        except Singular:
            report.skip(f"chart {index.label}: empty")

    report.details["levels"] = []
    for step in range(depth):
        spec = NuGrassmannianSpec(k, l, i + step, j + step)
        report.details["levels"].append(spec.label)
        mapping = level_column_map(base, spec)
        split = (spec.m, spec.n)
        for chart in gauss.members:
            frame = embed_columns(stacks[chart], mapping, split)
            inverse = embed_rows(gauss.left_inverse[chart], mapping, split)
            product = smul(frame, inverse, involution)
            where = first_difference(identity(gauss.base, k, l), product, involution, gauss.relation)
            if where is not None:
                r, c = where
                report.fail(f"kernel {spec.label} chart {chart} entry ({r + 1},{c + 1})", expected="1" if r == c else "0", actual=product.to_text()[r][c])
            report.count("kernels")
        report.counts["rank"] = k + l

        embedded = embed_columns(reference, mapping, split)
        for index, images in classified.items():
            lifted = lift_index(base, spec, index)
            down = inclusion_hom(base, spec, lifted)
            try:
                above = classify_stack(embedded, spec, lifted, involution)
            except Singular as exc:
                report.fail(f"classify {spec.label} {lifted.label}", expected="invertible minor", actual=str(exc))
                continue
            for name, value in above.items():
                expected = substitute(down.images[name], images, gauss.base)
                if not equals(value, expected, gauss.relation):
                    report.fail(f"classify {spec.label} {lifted.label} {name}", expected=format_element(expected), actual=format_element(value))
            report.count("charts")

    if not corrupt:
        report.absorb(verify_pullback_iso(gauss), prefix="pullback ")
    report.assume(gauss.assumptions)
    return report


def _drop_last_row(matrix: SuperMatrix) -> SuperMatrix:
    zero = scalar_entry(matrix.context, 0)
    rows = [list(row) for row in matrix.entries]
    rows[-1] = [zero] * len(rows[-1])
    return SuperMatrix(matrix.row_split, matrix.col_split, rows, matrix.context)


def comparison_map(pulled: SuperMatrix, reduced: SuperMatrix, index: MultiIndex, assumptions: Optional[AssumptionSet] = None) -> SuperMatrix:
    """T with pulled = T . reduced, read off the columns of ``index``.

    Raises Singular when the reduced frame is not invertible on ``index``.
    """
    involution = NuInvolution.for_context(reduced.context)
    return smul(minor(pulled, index), invert(minor(reduced, index), involution, assumptions), involution)


def reduced_embedding_check(k: int, levels: Sequence[Tuple[int, int]], corrupt: bool = False) -> Report:
    """Each reduced Grassmannian (k|0, m|0) sits in the super one (k|0, m|n) with odd generators sent to zero.

    Per level and reduced chart I the frame A^I is pulled back along the
    embedding and compared with the reduced frame through the map T sending
    1 (x) A^I_t to the t-th pulled row; T must be invertible and carry the
    reduced rows onto the pulled ones. Inclusion and bundle squares are run
    per level, and across consecutive levels the reduced and super
    inclusions must commute. ``corrupt`` zeroes the last pulled row.
    """
    report = Report(check="reduced-embedding")
    report.details["levels"] = [f"({m}|{n})" for m, n in levels]
    assumptions = AssumptionSet()
    for m, n in levels:
        reduced = NuGrassmannianSpec(k, 0, m, 0)
        super_ = NuGrassmannianSpec(k, 0, m, n)
        for index in permissible_indices(reduced, super_):
            iota = inclusion_hom(reduced, super_, index)
            chart = coordinate_matrix(super_, index)
            small_chart = coordinate_matrix(reduced, iota.small_index)
            pulled = substitute_matrix(chart.matrix, iota.images, iota.context, assumptions)
            if corrupt:
                pulled = _drop_last_row(pulled)
            expected = embed_columns(small_chart.matrix, level_column_map(reduced, super_), (m, n))
            location = f"({m}|{n}) {index.label}"
            report.count("frames")
            try:
                transfer = comparison_map(pulled, expected, index, assumptions)
                invert(transfer, small_chart.involution, assumptions)
            except Singular as exc:
                report.fail(f"T {location}", expected="invertible", actual=str(exc))
                continue
            carried = smul(transfer, expected, small_chart.involution)
            where = first_difference(carried, pulled, small_chart.involution)
            if where is not None:
                r, c = where
                report.fail(f"T {location} entry ({r + 1},{c + 1})", expected=pulled.to_text()[r][c], actual=carried.to_text()[r][c])
            report.count("isomorphisms")
        report.absorb(verify_level_squares(reduced, super_), prefix=f"({m}|{n}) ")

    for (m, n), (m2, n2) in zip(levels, levels[1:]):
        low_reduced, high_reduced = NuGrassmannianSpec(k, 0, m, 0), NuGrassmannianSpec(k, 0, m2, 0)
        low_super, high_super = NuGrassmannianSpec(k, 0, m, n), NuGrassmannianSpec(k, 0, m2, n2)
        for start in low_reduced.multi_indices():
            top = lift_index(low_super, high_super, lift_index(low_reduced, low_super, start))
            via_super = inclusion_hom(low_super, high_super, top)
            via_reduced = inclusion_hom(high_reduced, high_super, top)
            if via_super.is_zero or via_reduced.is_zero:
                report.skip(f"across ({m}|{n})->({m2}|{n2}) {top.label}: not permissible")
                continue
            down_super = inclusion_hom(low_reduced, low_super, via_super.small_index)
            down_reduced = inclusion_hom(low_reduced, high_reduced, via_reduced.small_index)
            for name in via_super.images:
                left = substitute(via_super.images[name], down_super.images, down_super.context)
                right = substitute(via_reduced.images[name], down_reduced.images, down_reduced.context)
                if left != right:
                    report.fail(f"across ({m}|{n})->({m2}|{n2}) {top.label} {name}", expected=format_element(left), actual=format_element(right))
            report.count("across")
    report.assume(assumptions)
    return report

