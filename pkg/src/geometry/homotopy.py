"""Index doubling, induced chart maps and linear homotopies of Gauss morphisms."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Dict, Optional, Tuple

import sympy

try:
    from config.settings import HOMOTOPY_PARAMETER
    from core.algebra import AssumptionSet, GeneratorContext, SuperElement, format_element, generators, substitute
    from core.nu import FormalEntry, NuInvolution, Ring, entry_mul, entry_value
    from core.supermatrix import (
        MultiIndex,
        SuperMatrix,
        add_matrices,
        embed_matrix,
        first_difference,
        identity,
        invert,
        matrices_equal,
        minor,
        pseudo_unit,
        smul,
        substitute_matrix,
        zeros,
    )
    from geometry.gauss import GaussMorphism
    from geometry.grassmannian import NuGrassmannianSpec, check_coordinate_image, coordinate_matrix, transition
    from utils.exceptions import DimensionMismatch, EmptyOverlap, EndpointMismatch, NuGrassError, ParityViolation
    from utils.log import get_logger
    from utils.report import Report
except ImportError:
    from src.config.settings import HOMOTOPY_PARAMETER
    from src.core.algebra import AssumptionSet, GeneratorContext, SuperElement, format_element, generators, substitute
    from src.core.nu import FormalEntry, NuInvolution, Ring, entry_mul, entry_value
    from src.core.supermatrix import (
        MultiIndex,
        SuperMatrix,
        add_matrices,
        embed_matrix,
        first_difference,
        identity,
        invert,
        matrices_equal,
        minor,
        pseudo_unit,
        smul,
        substitute_matrix,
        zeros,
    )
    from src.geometry.gauss import GaussMorphism
    from src.geometry.grassmannian import NuGrassmannianSpec, check_coordinate_image, coordinate_matrix, transition
    from src.utils.exceptions import DimensionMismatch, EmptyOverlap, EndpointMismatch, NuGrassError, ParityViolation
    from src.utils.log import get_logger
    from src.utils.report import Report

logger = get_logger("homotopy")

EVEN = "even"
ODD = "odd"
SHIFT = "shift"
PLAIN = "plain"
KINDS = (EVEN, ODD, SHIFT)


def shift_column(column: int, m: int, target_m: int) -> int:
    """Even columns stay; odd columns move past the target's extra even columns"""
    return column if column <= m else column + (target_m - m)


def column_map(kind: str, m: int, n: int, k: int = 0, l: int = 0) -> Tuple[Callable[[int], int], int, int]:
    """(1-based column map, target m, target n) for an index map"""
    if kind == EVEN:
        return (lambda c: 2 * c), 2 * m, 2 * n
    if kind == ODD:
        return (lambda c: 2 * c - 1), 2 * m, 2 * n
    if kind == SHIFT:
        target_m, target_n = 2 * m - k, 2 * n - l
        return (lambda c: shift_column(c, m, target_m)), target_m, target_n
    if kind == PLAIN:
        return (lambda c: shift_column(c, m, 2 * m)), 2 * m, 2 * n
    raise ValueError(f"Unknown index map {kind!r}")


def index_map(kind: str, spec: NuGrassmannianSpec, index) -> Tuple[NuGrassmannianSpec, MultiIndex]:
    """Image of a chart index under the even, odd or plain-shift doubling"""
    if not isinstance(index, MultiIndex):
        index = spec.index(index)
    mapping, target_m, target_n = column_map(kind, spec.m, spec.n, spec.k, spec.l)
    target = NuGrassmannianSpec(spec.k, spec.l, target_m, target_n)
    return target, target.index([mapping(c) for c in index])


@dataclass
class TrivialInclusion:
    """Basis map of a trivial bundle R^{m|n} into R^{2m|2n}"""

    kind: str
    m: int
    n: int

    def column(self, column: int) -> int:
        mapping, _, _ = column_map(self.kind, self.m, self.n)
        return mapping(column)

    @property
    def target(self) -> Tuple[int, int]:
        return (2 * self.m, 2 * self.n)

    def basis_images(self) -> Dict[str, str]:
        """e_i and f_j names of the source mapped to names of the target"""
        images = {}
        for i in range(1, self.m + 1):
            images[f"e{i}"] = f"e{self.column(i)}"
        for j in range(1, self.n + 1):
            images[f"f{j}"] = f"f{self.column(self.m + j) - 2 * self.m}"
        return images


def inclusion_on_trivial(kind: str, m: int, n: int) -> TrivialInclusion:
    if kind not in (EVEN, ODD, PLAIN):
        raise ValueError(f"Unknown inclusion {kind!r}")
    return TrivialInclusion(kind, m, n)


def embed_columns(matrix: SuperMatrix, mapping: Callable[[int], int], split: Tuple[int, int]) -> SuperMatrix:
    """Place column c of ``matrix`` at column mapping(c); other columns are zero"""
    out = [list(row) for row in zeros(matrix.context, matrix.row_split, split).entries]
    for c in range(matrix.cols):
        target = mapping(c + 1) - 1
        for r in range(matrix.rows):
            out[r][target] = matrix.entries[r][c]
    return SuperMatrix(matrix.row_split, split, out, matrix.context)


def embed_rows(matrix: SuperMatrix, mapping: Callable[[int], int], split: Tuple[int, int]) -> SuperMatrix:
    out = [list(row) for row in zeros(matrix.context, split, matrix.col_split).entries]
    for r in range(matrix.rows):
        out[mapping(r + 1) - 1] = list(matrix.entries[r])
    return SuperMatrix(split, matrix.col_split, out, matrix.context)


@dataclass
class ChartHom:
    """Generators of a chart of the doubled Grassmannian expressed on the original chart"""

    kind: str
    source: Tuple[NuGrassmannianSpec, MultiIndex]
    target: Tuple[NuGrassmannianSpec, MultiIndex]
    images: Dict[str, SuperElement]


def induced_chart_hom(kind: str, spec: NuGrassmannianSpec, index) -> ChartHom:
    """Send each generator of the doubled chart to the matching cell of the embedded A^I.

    Cells outside the embedded columns go to zero. Raises ParityViolation
    when a cell of the embedded matrix cannot carry the doubled chart's
    generator.
    """
    chart = coordinate_matrix(spec, index)
    doubled_spec, doubled_index = index_map(kind, spec, chart.index)
    doubled = coordinate_matrix(doubled_spec, doubled_index)
    mapping, _, _ = column_map(kind, spec.m, spec.n, spec.k, spec.l)
    embedded = embed_columns(chart.matrix, mapping, (doubled_spec.m, doubled_spec.n))

    unit = pseudo_unit(doubled_index, chart.context, spec.k, spec.l)
    if not matrices_equal(minor(embedded, doubled_index), unit, chart.involution):
        raise ParityViolation(f"Pseudo-unit of {chart.index.label} does not match that of {doubled_index.label}")

    images: Dict[str, SuperElement] = {}
    for name, cell in doubled.cells.items():
        value = entry_value(embedded.entries[cell.row][cell.col], chart.involution)
        if cell.wrapped:
            value = chart.involution.apply(value)
        check_coordinate_image(doubled.context, name, value)
        images[name] = value
    return ChartHom(kind, (doubled_spec, doubled_index), (spec, chart.index), images)


# ----------------------------------------------------------------------
# Linear homotopy
# ----------------------------------------------------------------------


def _scalar(context: GeneratorContext, value) -> Ring:
    return Ring(SuperElement.scalar(context, value))


def _combine(left: SuperMatrix, right: SuperMatrix, a: FormalEntry, b: FormalEntry, involution: NuInvolution) -> SuperMatrix:
    scaled_left = left.map_entries(lambda x: entry_mul(a, x, involution))
    scaled_right = right.map_entries(lambda y: entry_mul(b, y, involution))
    return add_matrices(scaled_left, scaled_right, involution)


class HomotopyFamily:
    """F_t = (1 - t) J^e(stack_A) + t J^o(stack_B), per chart"""

    def __init__(self, first: GaussMorphism, second: GaussMorphism, parameter: str = HOMOTOPY_PARAMETER) -> None:
        if first.charts != second.charts or first.members != second.members or first.bundle.rank != second.bundle.rank:
            raise DimensionMismatch("Gauss morphisms must share charts and rank")
        if first.base != second.base:
            raise DimensionMismatch("Gauss morphisms must share their base context")
        self.first = first
        self.second = second
        self.parameter = parameter
        self.context = first.base.extend(even=(parameter,))
        self.involution = NuInvolution.for_context(self.context)
        m, n = first.layout.split
        self.source_split = (m, n)
        self.split = (2 * m, 2 * n)
        self.even_map, _, _ = column_map(EVEN, m, n)
        self.odd_map, _, _ = column_map(ODD, m, n)

        t = SuperElement.generator(self.context, parameter)
        one = SuperElement.one(self.context)
        self.family: Dict[str, SuperMatrix] = {}
        for chart in first.members:
            left = embed_columns(embed_matrix(first.stacked[chart], self.context), self.even_map, self.split)
            right = embed_columns(embed_matrix(second.stacked[chart], self.context), self.odd_map, self.split)
            self.family[chart] = _combine(left, right, Ring(one - t), Ring(t), self.involution)

    @property
    def relation(self):
        return self.first.relation

    def _specialisation(self, value) -> Dict[str, SuperElement]:
        images = {name: SuperElement.generator(self.first.base, name) for name in self.first.base.names}
        images[self.parameter] = SuperElement.scalar(self.first.base, value)
        return images

    def specialize(self, value) -> Dict[str, SuperMatrix]:
        images = self._specialisation(value)
        return {chart: substitute_matrix(matrix, images, self.first.base) for chart, matrix in self.family.items()}

    def endpoint(self, value: int) -> Dict[str, SuperMatrix]:
        """What the family must specialise to at t = 0 and t = 1"""
        gauss, mapping = (self.first, self.even_map) if value == 0 else (self.second, self.odd_map)
        return {chart: embed_columns(gauss.stacked[chart], mapping, self.split) for chart in gauss.members}

    def left_inverse(self, value) -> Dict[str, SuperMatrix]:
        """A left inverse of the family at t = value"""
        value = sympy.Rational(value)
        base = self.first.base
        if value == 1:
            return {chart: embed_rows(self.second.left_inverse[chart], self.odd_map, self.split) for chart in self.first.members}
        factor = _scalar(base, 1 / (1 - value))
        out = {}
        for chart in self.first.members:
            embedded = embed_rows(self.first.left_inverse[chart], self.even_map, self.split)
            out[chart] = embedded.map_entries(lambda x: entry_mul(factor, x, self.first.involution))
        return out

    def classifying(self, index, value=None, chart: Optional[str] = None) -> Dict[str, SuperElement]:
        """Chart images of the classifying map along the family, normalised on ``index``.

        With ``value`` the family is specialised first; the result agrees with
        specialising the unspecialised images.
        """
        chart = chart or self.first.reference
        k, l = self.first.bundle.rank
        spec = NuGrassmannianSpec(k, l, *self.split)
        if value is None:
            return classify_stack(self.family[chart], spec, index, self.involution)
        return classify_stack(self.specialize(value)[chart], spec, index, self.first.involution)

    def specialize_images(self, images: Dict[str, SuperElement], value) -> Dict[str, SuperElement]:
        substitution = self._specialisation(value)
        return {name: substitute(image, substitution, self.first.base) for name, image in images.items()}


def classify_stack(stack: SuperMatrix, spec: NuGrassmannianSpec, index, involution: NuInvolution) -> Dict[str, SuperElement]:
    if not isinstance(index, MultiIndex):
        index = spec.index(index)
    unit = pseudo_unit(index, stack.context, spec.k, spec.l)
    normalized = smul(invert(smul(minor(stack, index), unit, involution), involution), stack, involution)
    chart = coordinate_matrix(spec, index)
    images = {}
    for name, cell in chart.cells.items():
        value = entry_value(normalized.entries[cell.row][cell.col], involution)
        if cell.wrapped:
            raise ParityViolation(f"Chart {index.label} needs nu cells; classify balanced charts only")
        images[name] = value
    return images


def linear_homotopy(first: GaussMorphism, second: GaussMorphism) -> HomotopyFamily:
    family = HomotopyFamily(first, second)
    logger.debug("Checking endpoints of the linear homotopy over %d charts", len(first.members))
    for value in (0, 1):
        expected = family.endpoint(value)
        for chart, matrix in family.specialize(value).items():
            where = first_difference(expected[chart], matrix, first.involution)
            if where is not None:
                raise EndpointMismatch(f"F_{value} differs at chart {chart} entry {where}")
    return family


def verify_homotopy(family: HomotopyFamily, samples=(0, sympy.Rational(1, 2), 1)) -> Report:
    report = Report(check="homotopy-endpoints")
    base = family.first.base
    k, l = family.first.bundle.rank
    involution = family.first.involution
    for value in (0, 1):
        expected = family.endpoint(value)
        for chart, matrix in family.specialize(value).items():
            where = first_difference(expected[chart], matrix, involution)
            if where is not None:
                i, j = where
                report.fail(f"F_{value} chart {chart} entry ({i + 1},{j + 1})", expected=expected[chart].to_text()[i][j], actual=matrix.to_text()[i][j])
            report.count("endpoints")
    for value in samples:
        specialised = family.specialize(value)
        inverses = family.left_inverse(value)
        for chart, matrix in specialised.items():
            product = smul(matrix, inverses[chart], involution)
            where = first_difference(identity(base, k, l), product, involution, family.relation)
            if where is not None:
                i, j = where
                report.fail(f"kernel t={value} chart {chart} entry ({i + 1},{j + 1})", expected="identity", actual=product.to_text()[i][j])
            report.count("kernel_certificates")
    report.details["samples"] = [str(v) for v in samples]
    return report


# ----------------------------------------------------------------------
# Retraction of projective superspace onto its body
# ----------------------------------------------------------------------


def retraction_images(context: GeneratorContext, family: GeneratorContext, parameter: str, corrupt: bool = False) -> Dict[str, SuperElement]:
    """x -> x, e -> (1 - t) e (or (1 + t) e as a negative control)"""
    t = SuperElement.generator(family, parameter)
    scale = SuperElement.one(family) + t if corrupt else SuperElement.one(family) - t
    images = {}
    for name in context.names:
        value = SuperElement.generator(family, name)
        if name in context.odd_names:
            value = scale * value
        images[name] = value
    return images


def retraction_check(m: int, n: int, corrupt: bool = False, parameter: str = HOMOTOPY_PARAMETER) -> Report:
    """The deformation retraction of projective m|n superspace onto its body.

    Checks j0*H* = id and j1*H* = (x -> x, e -> 0) on every standard chart
    and that H* commutes with the transitions.
    """
    report = Report(check="retraction")
    spec = NuGrassmannianSpec(1, 0, m + 1, n)
    report.details["spec"] = spec.label
    charts = [spec.index((i,)) for i in range(1, m + 2)]
    context = spec.context()
    family = context.extend(even=(parameter,))
    images = retraction_images(context, family, parameter, corrupt)
    assumptions = AssumptionSet()

    def specialise(value) -> Dict[str, SuperElement]:
        out = {name: SuperElement.generator(context, name) for name in context.names}
        out[parameter] = SuperElement.scalar(context, value)
        return out

    collapsed = {name: SuperElement.generator(context, name) for name in context.names}
    for name in context.odd_names:
        collapsed[name] = SuperElement.zero(context)

    for index in charts:
        for value, expected_images in ((0, generators(context)), (1, collapsed)):
            for name in context.names:
                actual = substitute(images[name], specialise(value), context)
                if actual != expected_images[name]:
                    report.fail(f"j{value} chart {index.label} {name}", expected=format_element(expected_images[name]), actual=format_element(actual))
            report.count("endpoints")

    def lifted(step_images: Dict[str, SuperElement]) -> Dict[str, SuperElement]:
        out = {name: value.embed(family) for name, value in step_images.items()}
        out[parameter] = SuperElement.generator(family, parameter)
        return out

    for source in charts:
        for target in charts:
            if source == target:
                continue
            try:
                step = transition(spec, source, target)
            except EmptyOverlap:
                report.skip(f"pair {source.label}->{target.label}: empty")
                continue
            except NuGrassError as exc:
                report.fail(f"pair {source.label}->{target.label}", expected="verifiable overlap", actual=f"{type(exc).__name__}: {exc}")
                continue
            for name in context.names:
                left = substitute(step.images[name].embed(family), {**images, parameter: SuperElement.generator(family, parameter)}, family, assumptions)
                right = substitute(images[name], lifted(step.images), family, assumptions)
                if left != right:
                    report.fail(f"commute {source.label}->{target.label} {name}", expected=format_element(left), actual=format_element(right))
            report.count("pairs")
    report.assume(assumptions)
    return report
