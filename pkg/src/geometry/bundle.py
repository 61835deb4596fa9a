"""Super vector bundles given by transition cocycles.

Conventions: the overlap map phi_ab sends chart b's generators into chart
a's algebra. Frames are rows and s^b_i = sum_t (g_ab)_it s^a_t, so the
cocycle condition reads

    g_ac = phi_ab(g_bc) . g_ab,    g_aa = id.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import permutations
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

try:
    from core.algebra import AssumptionSet, GeneratorContext, SuperElement, generators, mul, substitute
    from core.nu import NuInvolution
    from core.supermatrix import (
        SuperMatrix,
        first_difference,
        identity,
        invert,
        minor,
        pseudo_unit,
        smul,
        substitute_matrix,
    )
    from geometry.grassmannian import NuGrassmannianSpec, build_atlas, coordinate_matrix
    from utils.exceptions import ContextMismatch, DimensionMismatch, MissingImage, NuGrassError, ParityViolation, Singular
    from utils.log import get_logger
    from utils.report import Report
except ImportError:
    from src.core.algebra import AssumptionSet, GeneratorContext, SuperElement, generators, mul, substitute
    from src.core.nu import NuInvolution
    from src.core.supermatrix import (
        SuperMatrix,
        first_difference,
        identity,
        invert,
        minor,
        pseudo_unit,
        smul,
        substitute_matrix,
    )
    from src.geometry.grassmannian import NuGrassmannianSpec, build_atlas, coordinate_matrix
    from src.utils.exceptions import ContextMismatch, DimensionMismatch, MissingImage, NuGrassError, ParityViolation, Singular
    from src.utils.log import get_logger
    from src.utils.report import Report

logger = get_logger("bundle")

Pair = Tuple[str, str]


@dataclass
class Overlap:
    source: str
    target: str
    images: Dict[str, SuperElement]
    assumptions: AssumptionSet = field(default_factory=AssumptionSet)


class SuperManifoldAtlas:
    """Named charts with partial overlap maps."""

    def __init__(self, charts: Mapping[str, GeneratorContext], overlaps: Mapping[Pair, Overlap]) -> None:
        self.charts: Dict[str, GeneratorContext] = dict(charts)
        self.overlaps: Dict[Pair, Overlap] = dict(overlaps)
        for (a, b), overlap in self.overlaps.items():
            if a not in self.charts or b not in self.charts:
                raise DimensionMismatch(f"Overlap {a}->{b} names an unknown chart")
            for name in self.charts[b].names:
                if name not in overlap.images:
                    raise MissingImage(f"Overlap {a}->{b} has no image for {name!r}")
            for name, image in overlap.images.items():
                if image.context != self.charts[a]:
                    raise ContextMismatch(f"Image of {name!r} in overlap {a}->{b} is not over chart {a}")
                expected = 0 if self.charts[b].is_even(name) else 1
                if not image.has_parity(expected):
                    raise ParityViolation(f"Image of {name!r} in overlap {a}->{b} has the wrong parity")

    @property
    def names(self) -> List[str]:
        return list(self.charts)

    def intersects(self, a: str, b: str) -> bool:
        return a == b or (a, b) in self.overlaps

    def overlap(self, a: str, b: str) -> Overlap:
        if a == b:
            return Overlap(a, a, generators(self.charts[a]))
        if (a, b) not in self.overlaps:
            raise DimensionMismatch(f"Charts {a} and {b} do not overlap")
        return self.overlaps[(a, b)]

    def involution(self, name: str) -> NuInvolution:
        return NuInvolution.for_context(self.charts[name])


class FreeModuleSignature:
    """Basis of a free k|l module: even e1..ek, then odd-flagged f1..fl."""

    def __init__(self, k: int, l: int) -> None:
        self.k = k
        self.l = l

    @property
    def basis(self) -> Tuple[str, ...]:
        return tuple(f"e{i}" for i in range(1, self.k + 1)) + tuple(f"f{j}" for j in range(1, self.l + 1))

    def is_odd_flagged(self, position: int) -> bool:
        return position >= self.k

    def vector(self, components: Sequence[SuperElement]) -> "ModuleVector":
        if len(components) != self.k + self.l:
            raise DimensionMismatch(f"Expected {self.k + self.l} components")
        return ModuleVector(self, tuple(components))


@dataclass(frozen=True, eq=False)
class ModuleVector:
    """sum_i w_i b_i where an odd-flagged b_i = pi(1), i.e. the component reads pi(w_i)"""

    signature: FreeModuleSignature
    components: Tuple[SuperElement, ...]

    def scale(self, z: SuperElement) -> "ModuleVector":
        """z * v, using z . pi(w) = (-1)^p(z) pi(z w)"""
        parity = z.parity()
        if parity == -1:
            raise ParityViolation("Scalars must be homogeneous")
        sign = -1 if parity == 1 else 1
        scaled = []
        for position, w in enumerate(self.components):
            product = mul(z, w)
            scaled.append(-product if sign < 0 and self.signature.is_odd_flagged(position) else product)
        return ModuleVector(self.signature, tuple(scaled))

    def parities(self) -> Tuple[Optional[int], ...]:
        out = []
        for position, w in enumerate(self.components):
            p = w.parity()
            if p is not None and p >= 0 and self.signature.is_odd_flagged(position):
                p = 1 - p
            out.append(p)
        return tuple(out)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ModuleVector):
            return NotImplemented
        return all(a == b for a, b in zip(self.components, other.components))

    __hash__ = None  # type: ignore[assignment]


class BundleCocycle:
    def __init__(self, atlas: SuperManifoldAtlas, rank: Tuple[int, int], cocycle: Mapping[Pair, SuperMatrix]) -> None:
        self.atlas = atlas
        self.rank = tuple(rank)
        self.cocycle: Dict[Pair, SuperMatrix] = dict(cocycle)
        self.signature = FreeModuleSignature(*self.rank)
        for (a, b), matrix in self.cocycle.items():
            if matrix.row_split != self.rank or matrix.col_split != self.rank:
                raise DimensionMismatch(f"g_{a}{b} is not a {self.rank[0]}|{self.rank[1]} square matrix")
            if matrix.context != atlas.charts[a]:
                raise ContextMismatch(f"g_{a}{b} must be written over chart {a}")
            matrix.validate()

    def g(self, a: str, b: str) -> SuperMatrix:
        if (a, b) in self.cocycle:
            return self.cocycle[(a, b)]
        if a == b:
            return identity(self.atlas.charts[a], *self.rank)
        raise DimensionMismatch(f"No transition matrix g_{a}{b}")


# ----------------------------------------------------------------------
# Cocycle verification
# ----------------------------------------------------------------------


def _compare(report: Report, location: str, expected: SuperMatrix, actual: SuperMatrix, involution: NuInvolution) -> None:
    where = first_difference(expected, actual, involution)
    if where is not None:
        i, j = where
        report.fail(
            f"{location} entry ({i + 1},{j + 1})",
            expected=expected.to_text()[i][j],
            actual=actual.to_text()[i][j],
        )


def verify_bundle_cocycle(bundle: BundleCocycle) -> Report:
    report = Report(check="bundle-verify")
    atlas = bundle.atlas
    names = atlas.names
    report.counts["charts"] = len(names)
    assumptions = AssumptionSet()

    for a in names:
        context = atlas.charts[a]
        _compare(report, f"g_{a}{a}", identity(context, *bundle.rank), bundle.g(a, a), atlas.involution(a))
        report.count("identities")

    for a, b in permutations(names, 2):
        if not (atlas.intersects(a, b) and atlas.intersects(b, a)):
            continue
        if (a, b) not in bundle.cocycle or (b, a) not in bundle.cocycle:
            report.fail(f"pair {a},{b}", expected="g in both directions", actual="missing")
            continue
        context = atlas.charts[a]
        involution = atlas.involution(a)
        back = substitute_matrix(bundle.g(b, a), atlas.overlap(a, b).images, context, assumptions)
        _compare(report, f"pair {a},{b}", identity(context, *bundle.rank), smul(back, bundle.g(a, b), involution), involution)
        report.count("pairs")

    for a, b, c in permutations(names, 3):
        if not (atlas.intersects(a, b) and atlas.intersects(b, c) and atlas.intersects(a, c)):
            continue
        if any(pair not in bundle.cocycle for pair in ((a, b), (b, c), (a, c))):
            continue
        context = atlas.charts[a]
        involution = atlas.involution(a)
        moved = substitute_matrix(bundle.g(b, c), atlas.overlap(a, b).images, context, assumptions)
        _compare(report, f"triple {a},{b},{c}", bundle.g(a, c), smul(moved, bundle.g(a, b), involution), involution)
        report.count("triples")

    for overlap in atlas.overlaps.values():
        assumptions.merge(overlap.assumptions)
    report.assume(assumptions)
    return report


# ----------------------------------------------------------------------
# The canonical bundle on a nu-Grassmannian
# ----------------------------------------------------------------------


def canonical_cocycle(spec: NuGrassmannianSpec, source, target, assumptions: Optional[AssumptionSet] = None) -> SuperMatrix:
    """g_IJ = (M_J(A^I) . id_J)^-1 over chart I"""
    chart_i = coordinate_matrix(spec, source)
    chart_j = coordinate_matrix(spec, target)
    b = smul(minor(chart_i.matrix, chart_j.index), pseudo_unit(chart_j.index, chart_i.context, spec.k, spec.l), chart_i.involution)
    return invert(b, chart_i.involution, assumptions)


def chart_name(index) -> str:
    return index.label


def grassmannian_atlas(spec: NuGrassmannianSpec, workers: int = 1, charts=None) -> SuperManifoldAtlas:
    built = build_atlas(spec, workers, charts)
    contexts = {chart_name(chart.index): chart.context for chart in built.charts.values()}
    overlaps = {}
    for (a, b), step in built.transitions.items():
        if a == b:
            continue
        overlaps[(chart_name(step.source), chart_name(step.target))] = Overlap(
            chart_name(step.source), chart_name(step.target), step.images, step.assumptions
        )
    return SuperManifoldAtlas(contexts, overlaps)


def canonical_bundle(spec: NuGrassmannianSpec, workers: int = 1, charts=None) -> BundleCocycle:
    """Gamma on the charts of ``spec`` (all of them unless ``charts`` is given)"""
    atlas = grassmannian_atlas(spec, workers, charts)
    by_name = {index.label: index for index in spec.multi_indices()}
    cocycle = {}
    for a, b in atlas.overlaps:
        cocycle[(a, b)] = canonical_cocycle(spec, by_name[a], by_name[b], atlas.overlaps[(a, b)].assumptions)
    logger.debug("canonical bundle on %s: %d charts, %d transition matrices", spec.label, len(atlas.names), len(cocycle))
    return BundleCocycle(atlas, (spec.k, spec.l), cocycle)


# ----------------------------------------------------------------------
# Morphisms and pullbacks
# ----------------------------------------------------------------------


@dataclass
class ChartMorphism:
    """Per source chart: a target chart and images of its generators over the source chart"""

    source: SuperManifoldAtlas
    target: SuperManifoldAtlas
    chart_map: Dict[str, str]
    images: Dict[str, Dict[str, SuperElement]]

    def __post_init__(self) -> None:
        for a in self.source.names:
            if a not in self.chart_map:
                raise MissingImage(f"Source chart {a} has no target chart")
            target = self.chart_map[a]
            if target not in self.target.charts:
                raise DimensionMismatch(f"Unknown target chart {target}")


def identity_morphism(atlas: SuperManifoldAtlas) -> ChartMorphism:
    return ChartMorphism(atlas, atlas, {a: a for a in atlas.names}, {a: generators(atlas.charts[a]) for a in atlas.names})


def compose_morphisms(first: ChartMorphism, second: ChartMorphism) -> ChartMorphism:
    """second after first: source(first) -> target(second)"""
    chart_map, images = {}, {}
    for a in first.source.names:
        middle = first.chart_map[a]
        chart_map[a] = second.chart_map[middle]
        context = first.source.charts[a]
        images[a] = {
            name: substitute(value, first.images[a], context)
            for name, value in second.images[middle].items()
        }
    return ChartMorphism(first.source, second.target, chart_map, images)


def pullback(bundle: BundleCocycle, morphism: ChartMorphism) -> BundleCocycle:
    if morphism.target is not bundle.atlas and morphism.target.charts != bundle.atlas.charts:
        raise DimensionMismatch("Morphism does not land in the bundle's base")
    source = morphism.source
    cocycle = {}
    for a, b in list(source.overlaps) + [(c, c) for c in source.names]:
        ta, tb = morphism.chart_map[a], morphism.chart_map[b]
        if ta != tb and (ta, tb) not in bundle.cocycle:
            raise NuGrassError(f"Charts {ta} and {tb} of the target have no transition for {a}->{b}")
        cocycle[(a, b)] = substitute_matrix(bundle.g(ta, tb), morphism.images[a], source.charts[a])
    return BundleCocycle(source, bundle.rank, cocycle)


def bundle_iso_check(first: BundleCocycle, second: BundleCocycle, frames: Mapping[str, SuperMatrix]) -> Report:
    """Check g1_ab . T_a = phi_ab(T_b) . g2_ab on every overlap and invertibility of each T_a"""
    if first.rank != second.rank:
        raise DimensionMismatch(f"Ranks {first.rank} and {second.rank} differ")
    if first.atlas.names != second.atlas.names:
        raise DimensionMismatch("Bundles live on different atlases")
    missing = [a for a in first.atlas.names if a not in frames]
    if missing:
        raise DimensionMismatch(f"No frame T_{missing[0]} for chart {missing[0]}")
    report = Report(check="bundle-iso")
    atlas = first.atlas
    assumptions = AssumptionSet()
    for a in atlas.names:
        try:
            invert(frames[a], atlas.involution(a), assumptions)
        except Singular as exc:
            report.fail(f"T_{a}", expected="invertible", actual=str(exc))
        report.count("frames")
    for a, b in list(atlas.overlaps):
        involution = atlas.involution(a)
        left = smul(first.g(a, b), frames[a], involution)
        moved = substitute_matrix(frames[b], atlas.overlap(a, b).images, atlas.charts[a], assumptions)
        right = smul(moved, second.g(a, b), involution)
        _compare(report, f"naturality {a},{b}", right, left, involution)
        report.count("overlaps")
    report.assume(assumptions)
    return report
