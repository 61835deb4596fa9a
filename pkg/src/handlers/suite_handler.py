"""Suite handler for nugrass: runs one named check and returns its report"""

import time
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

try:
    # When installed via pip/pipx (package_dir={"": "src"})
    from config.settings import CHECK_CONFIGS, DEFAULT_SEED, DEFAULT_TOWER_DEPTH, DEFAULT_WORKERS, SAMPLE_THRESHOLD
    from core.algebra import format_element
    from geometry.bundle import BundleCocycle, verify_bundle_cocycle
    from geometry.gauss import (
        certify_left_inverse,
        classifying_morphism,
        gauss_morphism,
        gauss_supermatrix,
        target_spec,
        verify_classifying_compatibility,
        verify_pullback_iso,
    )
    from geometry.grassmannian import NuGrassmannianSpec, build_atlas, describe_chart, verify_gluing
    from geometry.homotopy import linear_homotopy, retraction_check, verify_homotopy
    from geometry.limits import reduced_embedding_check, standard_tower, universality_check, verify_tower
    from utils.exceptions import DimensionMismatch
    from utils.log import get_logger
    from utils.persistence import load_bundle_file
    from utils.report import Report
except ImportError:
    # When running from source (development mode)
    from src.config.settings import CHECK_CONFIGS, DEFAULT_SEED, DEFAULT_TOWER_DEPTH, DEFAULT_WORKERS, SAMPLE_THRESHOLD
    from src.core.algebra import format_element
    from src.geometry.bundle import BundleCocycle, verify_bundle_cocycle
    from src.geometry.gauss import (
        certify_left_inverse,
        classifying_morphism,
        gauss_morphism,
        gauss_supermatrix,
        target_spec,
        verify_classifying_compatibility,
        verify_pullback_iso,
    )
    from src.geometry.grassmannian import NuGrassmannianSpec, build_atlas, describe_chart, verify_gluing
    from src.geometry.homotopy import linear_homotopy, retraction_check, verify_homotopy
    from src.geometry.limits import reduced_embedding_check, standard_tower, universality_check, verify_tower
    from src.utils.exceptions import DimensionMismatch
    from src.utils.log import get_logger
    from src.utils.persistence import load_bundle_file
    from src.utils.report import Report

logger = get_logger("suite")


class SuiteHandler:
    def __init__(
        self,
        workers: int = DEFAULT_WORKERS,
        seed: int = DEFAULT_SEED,
        sample_threshold: int = SAMPLE_THRESHOLD,
        timing: bool = False,
    ) -> None:
        self.workers = workers
        self.seed = seed
        self.sample_threshold = sample_threshold
        self.timing = timing

    def run(self, check: str, **options: Any) -> Report:
        """Dispatch to the check named in CHECK_CONFIGS and stamp timing when asked"""
        if check not in CHECK_CONFIGS:
            raise ValueError(f"Unknown check {check!r}")
        handler: Callable[..., Report] = getattr(self, check.replace("-", "_"))
        logger.info("running %s", check)
        started = time.perf_counter()
        report = handler(**options)
        if self.timing:
            report.timing = round(time.perf_counter() - started, 3)
        return report

    # ------------------------------------------------------------------
    # Grassmannian atlas

    def atlas_build(self, k: int, l: int, m: int, n: int) -> Report:
        spec = NuGrassmannianSpec(k, l, m, n)
        atlas = build_atlas(spec, self.workers)
        report = Report(check="atlas-build")
        report.details["spec"] = spec.label
        report.details["charts"] = [describe_chart(atlas.charts[key]) for key in sorted(atlas.charts)]
        report.counts["charts"] = len(atlas.charts)
        for status in atlas.status.values():
            report.count(f"overlaps_{status}")
        for transition in atlas.transitions.values():
            report.assume(transition.assumptions)
        return report

    def atlas_verify(self, k: int, l: int, m: int, n: int, sample: Optional[int] = None, seed: Optional[int] = None) -> Report:
        spec = NuGrassmannianSpec(k, l, m, n)
        atlas = build_atlas(spec, self.workers)
        return verify_gluing(atlas, sample=sample, seed=self.seed if seed is None else seed, threshold=self.sample_threshold)

    # ------------------------------------------------------------------
    # Bundles read from files

    def _bundle(self, path: str) -> BundleCocycle:
        bundle = load_bundle_file(path)
        logger.debug("loaded %s: rank %s, charts %s", path, bundle.rank, bundle.atlas.names)
        return bundle

    def bundle_verify(self, path: str) -> Report:
        report = verify_bundle_cocycle(self._bundle(path))
        report.details["file"] = Path(path).name
        return report

    def gauss_build(self, path: str, charts: Optional[int] = None) -> Report:
        bundle = self._bundle(path)
        if charts is not None and charts != len(bundle.atlas.names):
            raise DimensionMismatch(f"--charts {charts} but {Path(path).name} has {len(bundle.atlas.names)} charts")
        gauss = gauss_morphism(bundle, check=False)
        report = certify_left_inverse(gauss)
        report.details["target"] = target_spec(gauss).label
        report.details["gauss"] = gauss_supermatrix(gauss).to_text()
        return report

    def classify(self, path: str) -> Report:
        gauss = gauss_morphism(self._bundle(path))
        morphism = classifying_morphism(gauss)
        report = verify_classifying_compatibility(morphism)
        report.details["target"] = morphism.spec.label
        report.details["images"] = {
            label: {name: format_element(value) for name, value in sub.images.items()}
            for label, sub in sorted(morphism.substitutions.items())
        }
        return report

    def pullback_verify(self, path: str) -> Report:
        return verify_pullback_iso(gauss_morphism(self._bundle(path)))

    def homotopy_endpoints(self, first: str, second: str) -> Report:
        """Two presentations of the same bundle joined by the linear homotopy"""
        family = linear_homotopy(gauss_morphism(self._bundle(first)), gauss_morphism(self._bundle(second)))
        report = verify_homotopy(family)
        report.details["family_split"] = list(family.split)
        return report

    def universality(self, path: str, level: Tuple[int, int], depth: int = DEFAULT_TOWER_DEPTH) -> Report:
        return universality_check(gauss_morphism(self._bundle(path)), level, depth)

    # ------------------------------------------------------------------
    # Parametric checks

    def retraction(self, m: int, n: int) -> Report:
        return retraction_check(m, n)

    def tower_verify(self, k: int, l: int, depth: int = DEFAULT_TOWER_DEPTH, sample: Optional[int] = None) -> Report:
        tower = standard_tower(k, l, depth)
        return verify_tower(tower, self.workers, sample=sample, seed=self.seed, threshold=self.sample_threshold)

    def reduced_embedding(self, k: int, levels: Sequence[Tuple[int, int]]) -> Report:
        return reduced_embedding_check(k, list(levels))


def describe_checks() -> List[Dict[str, Any]]:
    return [{"check": name, **config} for name, config in CHECK_CONFIGS.items()]
