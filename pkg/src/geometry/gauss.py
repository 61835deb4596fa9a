"""Gauss supermatrices and classifying maps into nu-Grassmannians.

The Gauss data is written over each chart c of the base in turn, extended
by the partition symbols r_1..r_t. With

    a^{ab} = phi_{c a}(g_ab)

for charts a, b meeting c, the stacked matrix of chart b has block a equal
to r_a**2 * a^{ab}; its left inverse stacks a^{ba}. The Gauss supermatrix
G over c has row (b, j) equal to r_b times row j of the stack of chart b.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import permutations
from typing import Dict, List, Mapping, Optional, Tuple

try:
    from config.settings import PARTITION_PREFIX, SECOND_PARTITION_PREFIX
    from core.algebra import (
        AssumptionSet,
        GeneratorContext,
        PartitionRelation,
        SuperElement,
        add,
        equals,
        format_element,
        mul,
        substitute,
    )
    from core.nu import FormalEntry, NuInvolution, Ring, entry_mul
    from core.supermatrix import (
        MultiIndex,
        SuperMatrix,
        delete_columns,
        embed_matrix,
        first_difference,
        identity,
        invert,
        minor,
        pseudo_unit,
        select_rows,
        smul,
        substitute_matrix,
        zeros,
    )
    from geometry.bundle import BundleCocycle, canonical_cocycle
    from geometry.grassmannian import NuGrassmannianSpec, coordinate_matrix, transition
    from utils.exceptions import BadIndexBalance, DimensionMismatch, KernelNotTrivial, NuGrassError, ParityViolation, Singular
    from utils.log import get_logger
    from utils.report import Report
except ImportError:
    from src.config.settings import PARTITION_PREFIX, SECOND_PARTITION_PREFIX
    from src.core.algebra import (
        AssumptionSet,
        GeneratorContext,
        PartitionRelation,
        SuperElement,
        add,
        equals,
        format_element,
        mul,
        substitute,
    )
    from src.core.nu import FormalEntry, NuInvolution, Ring, entry_mul
    from src.core.supermatrix import (
        MultiIndex,
        SuperMatrix,
        delete_columns,
        embed_matrix,
        first_difference,
        identity,
        invert,
        minor,
        pseudo_unit,
        select_rows,
        smul,
        substitute_matrix,
        zeros,
    )
    from src.geometry.bundle import BundleCocycle, canonical_cocycle
    from src.geometry.grassmannian import NuGrassmannianSpec, coordinate_matrix, transition
    from src.utils.exceptions import BadIndexBalance, DimensionMismatch, KernelNotTrivial, NuGrassError, ParityViolation, Singular
    from src.utils.log import get_logger
    from src.utils.report import Report

logger = get_logger("gauss")


class PartitionOfUnity:
    """Square roots r_1..r_t of a partition of unity; a single chart uses the constant 1"""

    def __init__(self, count: int, prefix: str = PARTITION_PREFIX) -> None:
        if count < 1:
            raise DimensionMismatch("A partition of unity needs at least one chart")
        self.count = count
        self.names: Tuple[str, ...] = tuple(f"{prefix}{i}" for i in range(1, count + 1)) if count > 1 else ()

    @property
    def relation(self) -> PartitionRelation:
        return PartitionRelation(self.names)

    def root(self, position: int, context: GeneratorContext) -> SuperElement:
        if not self.names:
            return SuperElement.one(context)
        return SuperElement.generator(context, self.names[position])

    def weight(self, position: int, context: GeneratorContext) -> SuperElement:
        root = self.root(position, context)
        return mul(root, root)


@dataclass
class GaussLayout:
    """Column order of the trivial target: even (a, i) first, then odd (a, j)"""

    charts: int
    k: int
    l: int

    def column(self, block: int, position: int) -> int:
        if position < self.k:
            return block * self.k + position
        return self.charts * self.k + block * self.l + (position - self.k)

    def locate(self, column: int) -> Tuple[int, int]:
        """Inverse of ``column``: (block, position) with 0-based values"""
        even = self.charts * self.k
        if column < even:
            return column // self.k, column % self.k
        offset = column - even
        return offset // self.l, self.k + offset % self.l

    @property
    def split(self) -> Tuple[int, int]:
        return (self.charts * self.k, self.charts * self.l)


@dataclass
class GaussView:
    """The Gauss data written over one chart c of the base.

    Only charts meeting c contribute; the partition functions of the other
    charts vanish on c, so the local relation runs over the members only.
    """

    chart: str
    base: GeneratorContext
    members: List[str]
    relation: PartitionRelation
    transported: Dict[Tuple[str, str], SuperMatrix]
    stacked: Dict[str, SuperMatrix]
    left_inverse: Dict[str, SuperMatrix]

    @property
    def involution(self) -> NuInvolution:
        return NuInvolution.for_context(self.base)


@dataclass
class GaussMorphism:
    bundle: BundleCocycle
    partition: PartitionOfUnity
    reference: str
    layout: GaussLayout
    views: Dict[str, GaussView]
    assumptions: AssumptionSet = field(default_factory=AssumptionSet)

    def view(self, chart: Optional[str] = None) -> GaussView:
        return self.views[chart or self.reference]

    @property
    def base(self) -> GeneratorContext:
        return self.view().base

    @property
    def members(self) -> List[str]:
        return self.view().members

    @property
    def transported(self) -> Dict[Tuple[str, str], SuperMatrix]:
        return self.view().transported

    @property
    def stacked(self) -> Dict[str, SuperMatrix]:
        return self.view().stacked

    @property
    def left_inverse(self) -> Dict[str, SuperMatrix]:
        return self.view().left_inverse

    @property
    def involution(self) -> NuInvolution:
        return self.view().involution

    @property
    def relation(self) -> PartitionRelation:
        return self.view().relation

    @property
    def charts(self) -> List[str]:
        return self.bundle.atlas.names


def _transport(bundle: BundleCocycle, chart: str, source: str, matrix: SuperMatrix, base: GeneratorContext, assumptions: AssumptionSet) -> SuperMatrix:
    """Rewrite a matrix over chart ``source`` in the coordinates of ``chart``"""
    if source == chart:
        return embed_matrix(matrix, base)
    overlap = bundle.atlas.overlap(chart, source)
    images = {name: value.embed(base) for name, value in overlap.images.items()}
    return substitute_matrix(matrix, images, base, assumptions)


def _scale(weight: SuperElement, x: FormalEntry, involution: NuInvolution) -> FormalEntry:
    return entry_mul(Ring(weight), x, involution)


def _view(bundle: BundleCocycle, partition: PartitionOfUnity, layout: GaussLayout, chart: str, assumptions: AssumptionSet) -> GaussView:
    """Stack the pairwise cocycles g_ab of the charts meeting ``chart``.

    Block a of chart b's stack is r_a**2 * g_ab and block a of its left
    inverse is g_ba, both moved into ``chart``; g_ab . g_ba = id makes the
    product sum(r_a**2) = 1.
    """
    names = bundle.atlas.names
    k, l = bundle.rank
    members = [a for a in names if bundle.atlas.intersects(chart, a)]
    base = bundle.atlas.charts[chart].extend(even=partition.names)
    involution = NuInvolution.for_context(base)
    roots = tuple(partition.names[names.index(a)] for a in members) if partition.names else ()

    transported = {}
    for a in members:
        for b in members:
            if a == b or (a, b) in bundle.cocycle:
                transported[(a, b)] = _transport(bundle, chart, a, bundle.g(a, b), base, assumptions)

    stacked, left_inverse = {}, {}
    for b in members:
        rows = [list(row) for row in zeros(base, (k, l), layout.split).entries]
        inverse_rows = [list(row) for row in zeros(base, layout.split, (k, l)).entries]
        for a in members:
            a_pos = names.index(a)
            if (a, b) in transported:
                weight = partition.weight(a_pos, base)
                block = transported[(a, b)]
                for j in range(k + l):
                    for i in range(k + l):
                        rows[j][layout.column(a_pos, i)] = _scale(weight, block.entries[j][i], involution)
            if (b, a) in transported:
                block = transported[(b, a)]
                for i in range(k + l):
                    for j in range(k + l):
                        inverse_rows[layout.column(a_pos, i)][j] = block.entries[i][j]
        stacked[b] = SuperMatrix((k, l), layout.split, rows, base)
        left_inverse[b] = SuperMatrix(layout.split, (k, l), inverse_rows, base)
    return GaussView(chart, base, members, PartitionRelation(roots), transported, stacked, left_inverse)


def gauss_morphism(
    bundle: BundleCocycle,
    partition: Optional[PartitionOfUnity] = None,
    reference: Optional[str] = None,
    check: bool = True,
) -> GaussMorphism:
    """Assemble the Gauss data chart by chart; ``reference`` picks the default view"""
    names = bundle.atlas.names
    partition = partition or PartitionOfUnity(len(names))
    if partition.count != len(names):
        raise DimensionMismatch(f"Partition has {partition.count} functions for {len(names)} charts")
    reference = reference or names[0]
    if reference not in bundle.atlas.charts:
        raise DimensionMismatch(f"Unknown reference chart {reference}")
    k, l = bundle.rank
    layout = GaussLayout(len(names), k, l)
    assumptions = AssumptionSet()
    views = {chart: _view(bundle, partition, layout, chart, assumptions) for chart in names}

    gauss = GaussMorphism(bundle, partition, reference, layout, views, assumptions)
    if check:
        report = certify_left_inverse(gauss)
        if not report.passed:
            witness = report.witnesses[0]
            raise KernelNotTrivial(f"{witness.location}: expected {witness.expected}, got {witness.actual}")
    return gauss


def certify_left_inverse(gauss: GaussMorphism) -> Report:
    """Over each chart b, b's stack times its left inverse is the identity modulo the local relation"""
    report = Report(check="gauss-build")
    k, l = gauss.bundle.rank
    for b in gauss.charts:
        view = gauss.view(b)
        product = smul(view.stacked[b], view.left_inverse[b], view.involution)
        where = first_difference(identity(view.base, k, l), product, view.involution, view.relation)
        if where is not None:
            i, j = where
            report.fail(f"h.g chart {b} entry ({i + 1},{j + 1})", expected="1" if i == j else "0", actual=product.to_text()[i][j])
        report.count("charts")
    report.assume(gauss.assumptions)
    report.details["reference"] = gauss.reference
    report.details["partition"] = list(gauss.partition.names)
    return report


def gauss_supermatrix(gauss: GaussMorphism, chart: Optional[str] = None) -> SuperMatrix:
    """G over one chart: row (b, j) is r_b times row j of b's stack, zero for charts not meeting it"""
    k, l = gauss.bundle.rank
    layout = gauss.layout
    view = gauss.view(chart)
    zero_row = list(zeros(view.base, (1, 0), layout.split).entries[0])
    rows: List[List[FormalEntry]] = [list(zero_row) for _ in range(layout.charts * (k + l))]
    for b_pos, b in enumerate(gauss.charts):
        if b not in view.stacked:
            continue
        root = gauss.partition.root(b_pos, view.base)
        for j in range(k + l):
            rows[layout.column(b_pos, j)] = [_scale(root, x, view.involution) for x in view.stacked[b].entries[j]]
    return SuperMatrix(layout.split, layout.split, rows, view.base)


def target_spec(gauss: GaussMorphism) -> NuGrassmannianSpec:
    k, l = gauss.bundle.rank
    t = gauss.layout.charts
    return NuGrassmannianSpec(k, l, t * k, t * l)


# ----------------------------------------------------------------------
# Classifying substitutions
# ----------------------------------------------------------------------


@dataclass
class ChartSubstitution:
    index: MultiIndex
    images: Dict[str, SuperElement]
    normalizer: SuperMatrix
    normalized: SuperMatrix
    unnormalized: SuperMatrix
    assumptions: AssumptionSet

    @property
    def label(self) -> str:
        return self.index.label


def classifying_substitutions(
    gauss: GaussMorphism, index, matrix: Optional[SuperMatrix] = None, chart: Optional[str] = None
) -> ChartSubstitution:
    """Normalise the rows I of G on the columns I and read off chart I's generators.

    Raises BadIndexBalance unless I picks k even and l odd rows, and
    Singular when the minor is not invertible.
    """
    spec = target_spec(gauss)
    if not isinstance(index, MultiIndex):
        index = MultiIndex(index, spec.m, spec.n)
    if not index.is_balanced(spec.k, spec.l):
        raise BadIndexBalance(f"{index.label} picks {index.even_count}|{index.odd_count} rows, need {spec.k}|{spec.l}")
    view = gauss.view(chart)
    g = matrix if matrix is not None else gauss_supermatrix(gauss, view.chart)
    involution = view.involution
    assumptions = AssumptionSet()
    rows = select_rows(g, index)
    unit = pseudo_unit(index, view.base, spec.k, spec.l)
    normalizer = invert(smul(minor(rows, index), unit, involution), involution, assumptions)
    normalized = smul(normalizer, rows, involution)

    target = coordinate_matrix(spec, index)
    images = {}
    for name, cell in target.cells.items():
        if cell.wrapped:
            raise ParityViolation(f"Balanced chart {index.label} has a nu cell at {name}")
        entry = normalized.entries[cell.row][cell.col]
        if not isinstance(entry, Ring):
            raise ParityViolation(f"Cell of {name} holds 1nu")
        images[name] = entry.value
    unnormalized = delete_columns(smul(unit, rows, involution), index)
    return ChartSubstitution(index, images, normalizer, normalized, unnormalized, assumptions)


@dataclass
class ClassifyingMorphism:
    gauss: GaussMorphism
    spec: NuGrassmannianSpec
    substitutions: Dict[str, ChartSubstitution]
    empty: List[str]
    chart: str = ""

    @property
    def view(self) -> GaussView:
        return self.gauss.view(self.chart or None)

    def evaluate(self, sections: Mapping[str, SuperElement], prefix: str = SECOND_PARTITION_PREFIX) -> SuperElement:
        """sigma*(h) = sum_I s_I**2 phi_I(h_I) over the base extended by s_1..s_N"""
        labels = [label for label in self.substitutions if label in sections]
        weights = PartitionOfUnity(len(labels), prefix)
        context = self.view.base.extend(even=weights.names)
        total = SuperElement.zero(context)
        for position, label in enumerate(labels):
            images = {name: value.embed(context) for name, value in self.substitutions[label].images.items()}
            value = substitute(sections[label], images, context)
            total = add(total, mul(weights.weight(position, context), value))
        return total


def classifying_morphism(gauss: GaussMorphism, chart: Optional[str] = None) -> ClassifyingMorphism:
    """Classifying substitutions written over ``chart`` (the reference chart by default)"""
    spec = target_spec(gauss)
    view = gauss.view(chart)
    substitutions, empty = {}, []
    matrix = gauss_supermatrix(gauss, view.chart)
    for index in spec.balanced_indices():
        try:
            substitutions[index.label] = classifying_substitutions(gauss, index, matrix, view.chart)
        except Singular as exc:
            logger.info("chart %s is not met over %s: %s", index.label, view.chart, exc)
            empty.append(index.label)
    return ClassifyingMorphism(gauss, spec, substitutions, empty, view.chart)


def corrupt_substitution(morphism: ClassifyingMorphism, label: str, name: str) -> ClassifyingMorphism:
    """Negate one image of one chart; used as a negative control"""
    substitutions = dict(morphism.substitutions)
    original = substitutions[label]
    images = dict(original.images)
    images[name] = -images[name]
    substitutions[label] = ChartSubstitution(
        original.index, images, original.normalizer, original.normalized, original.unnormalized, original.assumptions
    )
    return ClassifyingMorphism(morphism.gauss, morphism.spec, substitutions, morphism.empty, morphism.chart)


def _compare(report: Report, location: str, expected: SuperMatrix, actual: SuperMatrix, view: GaussView) -> None:
    where = first_difference(expected, actual, view.involution, view.relation)
    if where is not None:
        i, j = where
        report.fail(f"{location} entry ({i + 1},{j + 1})", expected=expected.to_text()[i][j], actual=actual.to_text()[i][j])


def _overlapping_pairs(morphism: ClassifyingMorphism):
    for a, b in permutations(sorted(morphism.substitutions), 2):
        first, second = morphism.substitutions[a].index, morphism.substitutions[b].index
        try:
            yield a, b, transition(morphism.spec, first, second)
        except NuGrassError:
            continue


def verify_classifying_compatibility(morphism: ClassifyingMorphism) -> Report:
    """phi_I after the Grassmannian transition I->J agrees with phi_J"""
    report = Report(check="classify")
    view = morphism.view
    assumptions = AssumptionSet()
    for a, b, step in _overlapping_pairs(morphism):
        source = morphism.substitutions[a].images
        for name, expected in morphism.substitutions[b].images.items():
            actual = substitute(step.images[name], source, view.base, assumptions)
            if not equals(actual, expected, view.relation):
                report.fail(f"compatibility {a}->{b} {name}", expected=format_element(expected), actual=format_element(actual))
        report.count("pairs")
    report.counts["charts"] = len(morphism.substitutions)
    report.skipped.extend(f"chart {label}: empty" for label in morphism.empty)
    report.assume(assumptions)
    return report


def comparison_matrix(gauss: GaussMorphism, index: MultiIndex, chart: Optional[str] = None) -> SuperMatrix:
    """D^I over chart c: row (b, j) of I is r_b times row j of a^{c b}"""
    k, l = gauss.bundle.rank
    view = gauss.view(chart)
    rows = []
    for row in index:
        block, position = gauss.layout.locate(row - 1)
        other = gauss.charts[block]
        root = gauss.partition.root(block, view.base)
        matrix = view.transported.get((view.chart, other))
        if matrix is None:
            rows.append(list(zeros(view.base, (1, 0), (k, l)).entries[0]))
            continue
        rows.append([_scale(root, x, view.involution) for x in matrix.entries[position]])
    return SuperMatrix((k, l), (k, l), rows, view.base)


def verify_pullback_iso(gauss: GaussMorphism, morphism: Optional[ClassifyingMorphism] = None) -> Report:
    """The pullback of the canonical bundle along the classifying map is the input bundle.

    Per chart I: delta_I = N_I . D^I is invertible and delta_I . Gamma^c
    equals phi_I(A^I); on overlaps delta_J = phi_I(G_IJ) . delta_I. Without
    an explicit morphism the reference chart is used.
    """
    report = _pullback_over(morphism or classifying_morphism(gauss))
    report.assume(gauss.assumptions)
    return report


def _pullback_over(morphism: ClassifyingMorphism) -> Report:
    gauss = morphism.gauss
    view = morphism.view
    report = Report(check="pullback-verify")
    spec = morphism.spec
    involution = view.involution
    own_stack = view.stacked[view.chart]
    assumptions = AssumptionSet()
    deltas: Dict[str, SuperMatrix] = {}

    for label, chart_sub in sorted(morphism.substitutions.items()):
        delta = smul(chart_sub.normalizer, comparison_matrix(gauss, chart_sub.index, view.chart), involution)
        deltas[label] = delta
        try:
            inverse = invert(delta, involution, assumptions)
            _compare(report, f"delta {label} inverse", identity(view.base, *gauss.bundle.rank), smul(delta, inverse, involution), view)
        except Singular as exc:
            report.fail(f"delta {label}", expected="invertible", actual=str(exc))
        chart = coordinate_matrix(spec, chart_sub.index)
        pulled = substitute_matrix(chart.matrix, chart_sub.images, view.base, assumptions)
        _compare(report, f"frame {label}", pulled, smul(delta, own_stack, involution), view)
        report.count("charts")

    for a, b, _ in _overlapping_pairs(morphism):
        first = morphism.substitutions[a]
        g_ab = canonical_cocycle(spec, first.index, morphism.substitutions[b].index)
        moved = substitute_matrix(g_ab, first.images, view.base, assumptions)
        _compare(report, f"naturality {a}->{b}", deltas[b], smul(moved, deltas[a], involution), view)
        report.count("overlaps")

    report.absorb(verify_classifying_compatibility(morphism), prefix="compatibility ")
    report.assume(assumptions)
    return report
