"""Charts, transitions and gluing checks for nu-Grassmannians.

A chart I of the (k|l, m|n) nu-Grassmannian is a (k|l) x (m|n) matrix A^I
whose I-columns form the pseudo-unit id_I and whose other cells hold the
p|q chart generators (wrapped in nu where the block parity requires it).
The transition to chart J normalises A^I on the J-columns:

    L = (M_J(A^I) . id_J)^-1 . A^I

and reads chart J's generators off the cells of L. The overlap is empty
exactly when the reduced determinant of M_J(A^I) . id_J vanishes.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations, permutations
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

try:
    from config.settings import DEFAULT_SEED, EVEN_PREFIX, ODD_PREFIX, SAMPLE_THRESHOLD
    from core.algebra import AssumptionSet, GeneratorContext, SuperElement, format_element, substitute
    from core.nu import FormalEntry, NuInvolution, Ring, entry_value, format_entry
    from core.supermatrix import (
        MultiIndex,
        SuperMatrix,
        first_difference,
        invert,
        minor,
        pseudo_unit,
        reduced_determinant,
        smul,
    )
    from utils.exceptions import DimensionMismatch, EmptyOverlap, NuGrassError, ParityViolation
    from utils.log import get_logger
    from utils.report import Report
    from utils.workers import run_tasks
except ImportError:
    from src.config.settings import DEFAULT_SEED, EVEN_PREFIX, ODD_PREFIX, SAMPLE_THRESHOLD
    from src.core.algebra import AssumptionSet, GeneratorContext, SuperElement, format_element, substitute
    from src.core.nu import FormalEntry, NuInvolution, Ring, entry_value, format_entry
    from src.core.supermatrix import (
        MultiIndex,
        SuperMatrix,
        first_difference,
        invert,
        minor,
        pseudo_unit,
        reduced_determinant,
        smul,
    )
    from src.utils.exceptions import DimensionMismatch, EmptyOverlap, NuGrassError, ParityViolation
    from src.utils.log import get_logger
    from src.utils.report import Report
    from src.utils.workers import run_tasks

logger = get_logger("grassmannian")

NONEMPTY = "nonempty"
EMPTY = "empty"
FAILED = "failed"


@dataclass(frozen=True)
class NuGrassmannianSpec:
    k: int
    l: int
    m: int
    n: int

    def __post_init__(self) -> None:
        if min(self.k, self.l, self.m, self.n) < 0:
            raise DimensionMismatch(f"Negative dimension in {self.label}")
        if self.k + self.l == 0:
            raise DimensionMismatch("Rank k|l must be nonzero")
        if self.k > self.m or self.l > self.n:
            raise DimensionMismatch(f"Rank {self.k}|{self.l} exceeds {self.m}|{self.n}")

    @property
    def p(self) -> int:
        return self.k * (self.m - self.k) + self.l * (self.n - self.l)

    @property
    def q(self) -> int:
        return self.l * (self.m - self.k) + self.k * (self.n - self.l)

    @property
    def label(self) -> str:
        return f"({self.k},{self.l},{self.m},{self.n})"

    def index(self, indices: Sequence[int]) -> MultiIndex:
        index = MultiIndex(indices, self.m, self.n)
        if len(index) != self.k + self.l:
            raise DimensionMismatch(f"{index} needs {self.k + self.l} entries for {self.label}")
        return index

    def multi_indices(self) -> List[MultiIndex]:
        return [MultiIndex(c, self.m, self.n) for c in combinations(range(1, self.m + self.n + 1), self.k + self.l)]

    def balanced_indices(self) -> List[MultiIndex]:
        return [i for i in self.multi_indices() if i.is_balanced(self.k, self.l)]

    def context(self) -> GeneratorContext:
        even = tuple(f"{EVEN_PREFIX}{i}" for i in range(1, self.p + 1))
        odd = tuple(f"{ODD_PREFIX}{i}" for i in range(1, self.q + 1))
        return GeneratorContext(even, odd)


@dataclass(frozen=True)
class Cell:
    row: int
    col: int
    wrapped: bool


@dataclass
class Chart:
    spec: NuGrassmannianSpec
    index: MultiIndex
    context: GeneratorContext
    involution: NuInvolution
    matrix: SuperMatrix
    cells: Dict[str, Cell]

    @property
    def coordinates(self) -> Tuple[str, ...]:
        return self.context.names


def column_labels(spec: NuGrassmannianSpec, index: MultiIndex) -> Tuple[int, ...]:
    """0 for columns whose top k entries are even content, 1 otherwise.

    The first k columns of I and the first m-k other columns get 0.
    Charts with equal labels share their reduced point set.
    """
    labels = [1] * (spec.m + spec.n)
    for a, column in enumerate(index):
        labels[column - 1] = 0 if a < spec.k else 1
    for position, column in enumerate(index.complement()):
        labels[column - 1] = 0 if position < spec.m - spec.k else 1
    return tuple(labels)


@lru_cache(maxsize=None)
def _coordinate_matrix(spec: NuGrassmannianSpec, indices: Tuple[int, ...]) -> Chart:
    index = spec.index(indices)
    context = spec.context()
    involution = NuInvolution.for_context(context)
    k, l = spec.k, spec.l
    zero = Ring(SuperElement.zero(context))
    rows: List[List[FormalEntry]] = [[zero] * (spec.m + spec.n) for _ in range(k + l)]
    unit = pseudo_unit(index, context, k, l)
    for a, column in enumerate(index):
        rows[a][column - 1] = unit.entries[a][a]

    cells: Dict[str, Cell] = {}
    next_even, next_odd = 1, 1
    for position, column in enumerate(index.complement()):
        even_first = position < spec.m - spec.k
        col_parity = index.column_parity(column)
        for r in range(k + l):
            row_parity = 0 if r < k else 1
            content_even = (row_parity == 0) == even_first
            if content_even:
                name = f"{EVEN_PREFIX}{next_even}"
                next_even += 1
            else:
                name = f"{ODD_PREFIX}{next_odd}"
                next_odd += 1
            value = SuperElement.generator(context, name)
            wrapped = (0 if content_even else 1) != (row_parity + col_parity) % 2
            if wrapped:
                value = involution.apply(value)
            rows[r][column - 1] = Ring(value)
            cells[name] = Cell(r, column - 1, wrapped)

    matrix = SuperMatrix((k, l), (spec.m, spec.n), rows, context).validate()
    return Chart(spec, index, context, involution, matrix, cells)


def coordinate_matrix(spec: NuGrassmannianSpec, index) -> Chart:
    indices = tuple(index) if not isinstance(index, MultiIndex) else index.indices
    return _coordinate_matrix(spec, indices)


def read_cell(chart: Chart, entry: FormalEntry, cell: Cell) -> SuperElement:
    """Recover a generator's image from the entry sitting in its cell.

    A 1nu entry reads as nu(1), so a wrapped cell holding 1nu gives 1.
    """
    value = entry_value(entry, chart.involution)
    if cell.wrapped:
        value = chart.involution.apply(value)
    return value


def check_coordinate_image(context: GeneratorContext, name: str, value: SuperElement) -> None:
    expected = 0 if context.is_even(name) else 1
    if not value.has_parity(expected):
        raise ParityViolation(f"Image of {name} has the wrong parity: {format_element(value)}")


@dataclass
class Transition:
    source: MultiIndex
    target: MultiIndex
    images: Dict[str, SuperElement]
    assumptions: AssumptionSet = field(default_factory=AssumptionSet)
    normalized: Optional[SuperMatrix] = None
    normal_form_defect: Optional[str] = None

    @property
    def label(self) -> str:
        return f"{self.source.label}->{self.target.label}"


def overlap_matrix(spec: NuGrassmannianSpec, source, target) -> SuperMatrix:
    """M_J(A^I) . id_J, the matrix inverted by the transition from I to J"""
    chart_i = coordinate_matrix(spec, source)
    chart_j = coordinate_matrix(spec, target)
    unit_j = pseudo_unit(chart_j.index, chart_i.context, spec.k, spec.l)
    return smul(minor(chart_i.matrix, chart_j.index), unit_j, chart_i.involution)


def transition(spec: NuGrassmannianSpec, source, target) -> Transition:
    """Images of chart ``target``'s generators over chart ``source``.

    Raises EmptyOverlap when the reduced determinant of the overlap matrix
    vanishes. A normalised minor that differs from id_J is kept on the
    result as ``normal_form_defect``.
    """
    chart_i = coordinate_matrix(spec, source)
    chart_j = coordinate_matrix(spec, target)
    involution = chart_i.involution
    context = chart_i.context
    assumptions = AssumptionSet()

    b = overlap_matrix(spec, source, target)
    determinant = reduced_determinant(b)
    if determinant == 0:
        raise EmptyOverlap(f"{chart_i.index.label} and {chart_j.index.label} do not meet")
    normalized = smul(invert(b, involution, assumptions), chart_i.matrix, involution)

    unit_j = pseudo_unit(chart_j.index, context, spec.k, spec.l)
    normal_minor = minor(normalized, chart_j.index)
    defect = None
    position = first_difference(normal_minor, unit_j, involution)
    if position is not None:
        i, j = position
        defect = (
            f"entry ({i + 1},{j + 1}): expected {format_entry(unit_j.entries[i][j])}, "
            f"found {format_entry(normal_minor.entries[i][j])}"
        )

    images: Dict[str, SuperElement] = {}
    for name, cell in chart_j.cells.items():
        value = read_cell(chart_i, normalized.entries[cell.row][cell.col], cell)
        check_coordinate_image(context, name, value)
        images[name] = value
    return Transition(chart_i.index, chart_j.index, images, assumptions, normalized, defect)


def corrupt_transition(original: Transition, name: str) -> Transition:
    """Negate one image; used as a negative control"""
    images = dict(original.images)
    images[name] = -images[name]
    return Transition(
        original.source, original.target, images, original.assumptions, original.normalized, original.normal_form_defect
    )


# ----------------------------------------------------------------------
# Atlas
# ----------------------------------------------------------------------


@dataclass
class GrassmannianAtlas:
    spec: NuGrassmannianSpec
    charts: Dict[Tuple[int, ...], Chart]
    transitions: Dict[Tuple[Tuple[int, ...], Tuple[int, ...]], Transition]
    status: Dict[Tuple[Tuple[int, ...], Tuple[int, ...]], str]
    reasons: Dict[Tuple[Tuple[int, ...], Tuple[int, ...]], str] = field(default_factory=dict)

    def is_nonempty(self, source: Tuple[int, ...], target: Tuple[int, ...]) -> bool:
        return self.status.get((source, target)) == NONEMPTY

    def with_transition(self, replacement: Transition) -> "GrassmannianAtlas":
        transitions = dict(self.transitions)
        transitions[(replacement.source.indices, replacement.target.indices)] = replacement
        return GrassmannianAtlas(self.spec, self.charts, transitions, self.status, self.reasons)


def _transition_task(task):
    spec, source, target = task
    try:
        return NONEMPTY, transition(spec, source, target)
    except EmptyOverlap as exc:
        return EMPTY, str(exc)
    except NuGrassError as exc:
        return FAILED, f"{type(exc).__name__}: {exc}"


def build_atlas(spec: NuGrassmannianSpec, workers: int = 1, charts: Optional[Iterable[Sequence[int]]] = None) -> GrassmannianAtlas:
    """Charts and transitions of ``spec``, optionally restricted to some charts"""
    if charts is None:
        keys = [index.indices for index in spec.multi_indices()]
    else:
        keys = sorted(spec.index(c).indices for c in charts)
    chart_map = {key: coordinate_matrix(spec, key) for key in keys}
    pairs = [(a, b) for a in keys for b in keys]
    results = run_tasks(_transition_task, [(spec, a, b) for a, b in pairs], workers)
    transitions, status, reasons = {}, {}, {}
    for pair, (kind, payload) in zip(pairs, results):
        status[pair] = kind
        if kind == NONEMPTY:
            transitions[pair] = payload
        else:
            reasons[pair] = payload
            logger.info("overlap %s -> %s is %s: %s", pair[0], pair[1], kind, payload)
    return GrassmannianAtlas(spec, chart_map, transitions, status, reasons)


def compose_images(element: SuperElement, chain: Sequence[Transition], context: GeneratorContext, assumptions: AssumptionSet) -> SuperElement:
    for step in chain:
        element = substitute(element, step.images, context, assumptions)
    return element


def _label(key: Tuple[int, ...]) -> str:
    return "{" + ",".join(map(str, key)) + "}"


def _check_round_trip(
    report: Report,
    kind: str,
    start: Tuple[int, ...],
    chain: Sequence[Transition],
    atlas: GrassmannianAtlas,
) -> None:
    """Each generator of chart ``start``, pushed through ``chain``, must come back to itself"""
    chart = atlas.charts[start]
    assumptions = AssumptionSet()
    route = "->".join([_label(start)] + [_label(step.source.indices) for step in chain])
    for name in chart.coordinates:
        value = SuperElement.generator(chart.context, name)
        first, rest = chain[0], chain[1:]
        result = compose_images(first.images[name], rest, chart.context, assumptions)
        if result != value:
            report.fail(f"{kind} {route} {name}", expected=name, actual=format_element(result))
    report.assume(assumptions)
    report.count(kind)


def _unverifiable(atlas: GrassmannianAtlas, legs: Sequence[Tuple[Tuple[int, ...], Tuple[int, ...]]]) -> Optional[str]:
    """Why a chain of overlaps cannot be checked, or None when every leg has a transition"""
    for leg in legs:
        if atlas.status.get(leg) == FAILED:
            return f"{_label(leg[0])}->{_label(leg[1])} failed: {atlas.reasons.get(leg, '')}"
    return None


def verify_gluing(
    atlas: GrassmannianAtlas,
    sample: Optional[int] = None,
    seed: int = DEFAULT_SEED,
    threshold: int = SAMPLE_THRESHOLD,
) -> Report:
    """Identity, pair and triple gluing over all overlaps.

    Only overlaps whose reduced determinant vanishes in both directions are
    skipped. A nonempty overlap that cannot be checked (one-sided, stalled
    elimination, parity failure or a normalised minor that misses id_J) is
    a failure. Triples are checked exhaustively up to ``threshold``;
    beyond that (or when ``sample`` is given) a seeded sample is drawn.
    """
    report = Report(check="atlas-verify")
    report.details["spec"] = atlas.spec.label
    keys = sorted(atlas.charts)
    report.counts["charts"] = len(keys)

    for key in keys:
        identity = atlas.transitions.get((key, key))
        if identity is None:
            status = atlas.status.get((key, key), "missing")
            report.fail(f"identity {_label(key)}", expected=NONEMPTY, actual=status, note=atlas.reasons.get((key, key), ""))
            continue
        chart = atlas.charts[key]
        for name in chart.coordinates:
            if identity.images[name] != SuperElement.generator(chart.context, name):
                report.fail(f"identity {_label(key)} {name}", expected=name, actual=format_element(identity.images[name]))
        report.count("identities")

    for step in sorted(atlas.transitions.values(), key=lambda t: (t.source.indices, t.target.indices)):
        if step.normal_form_defect is not None:
            report.fail(f"normal form {step.label}", expected="id_J", actual=step.normal_form_defect)

    for a, b in combinations(keys, 2):
        forward, backward = atlas.status.get((a, b)), atlas.status.get((b, a))
        if forward == EMPTY and backward == EMPTY:
            report.skip(f"pair {_label(a)}<->{_label(b)}: empty")
            continue
        reason = _unverifiable(atlas, [(a, b), (b, a)])
        if reason is None and EMPTY in (forward, backward):
            reason = f"one-sided overlap ({forward}/{backward})"
        if reason is not None:
            report.fail(f"pair {_label(a)}<->{_label(b)}", expected="verifiable overlap", actual=reason)
            continue
        # phi_ab(phi_ba(g)) for g of chart a, then the same from b
        _check_round_trip(report, "pairs", a, [atlas.transitions[(b, a)], atlas.transitions[(a, b)]], atlas)
        _check_round_trip(report, "pairs", b, [atlas.transitions[(a, b)], atlas.transitions[(b, a)]], atlas)

    triples, unverifiable = [], 0
    for a, b, c in permutations(keys, 3):
        legs = [(b, a), (c, b), (a, c)]
        if any(atlas.status.get(leg) == EMPTY for leg in legs):
            continue
        if _unverifiable(atlas, legs) is not None:
            unverifiable += 1
            continue
        triples.append((a, b, c))
    report.counts["triples_available"] = len(triples)
    if unverifiable:
        report.counts["triples_unverifiable"] = unverifiable
    limit = sample if sample is not None else threshold
    if len(triples) > limit or sample is not None:
        triples = sorted(random.Random(seed).sample(triples, min(limit, len(triples))))
        report.details["sampled"] = True
        report.details["seed"] = seed
    for a, b, c in triples:
        chain = [atlas.transitions[(b, a)], atlas.transitions[(c, b)], atlas.transitions[(a, c)]]
        _check_round_trip(report, "triples", a, chain, atlas)

    for pair, kind in atlas.status.items():
        if kind != NONEMPTY:
            report.count(f"overlaps_{kind}")
    for transition_ in atlas.transitions.values():
        report.assume(transition_.assumptions)
    return report


def describe_chart(chart: Chart) -> Dict[str, object]:
    return {
        "index": chart.index.label,
        "labels": "".join(map(str, column_labels(chart.spec, chart.index))),
        "matrix": chart.matrix.to_text(),
    }
