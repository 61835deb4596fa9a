"""Persistence utilities for nugrass: user settings, report archive and bundle files"""

import json
import os
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError

try:
    from config.settings import SCHEMA_VERSION, USER_SETTING_KEYS
    from core.algebra import AssumptionSet, GeneratorContext
    from core.nu import NuInvolution
    from core.parser import parse_entry, parse_expression
    from core.supermatrix import SuperMatrix
    from geometry.bundle import BundleCocycle, Overlap, SuperManifoldAtlas
    from utils.exceptions import SchemaError
    from utils.log import get_logger
    from utils.report import Report
except ImportError:
    from src.config.settings import SCHEMA_VERSION, USER_SETTING_KEYS
    from src.core.algebra import AssumptionSet, GeneratorContext
    from src.core.nu import NuInvolution
    from src.core.parser import parse_entry, parse_expression
    from src.core.supermatrix import SuperMatrix
    from src.geometry.bundle import BundleCocycle, Overlap, SuperManifoldAtlas
    from src.utils.exceptions import SchemaError
    from src.utils.log import get_logger
    from src.utils.report import Report

logger = get_logger("persistence")


def _xdg_config_home() -> Path:
    """Return $XDG_CONFIG_HOME if set, otherwise ~/.config"""
    xdg = os.environ.get("XDG_CONFIG_HOME", "").strip()
    return Path(xdg) if xdg else Path.home() / ".config"


def _xdg_data_home() -> Path:
    """Return $XDG_DATA_HOME if set, otherwise ~/.local/share"""
    xdg = os.environ.get("XDG_DATA_HOME", "").strip()
    return Path(xdg) if xdg else Path.home() / ".local" / "share"


class PersistenceManager:
    """Handles user settings and the archive of saved reports"""

    def __init__(self, config_dir: Optional[str] = None) -> None:
        """Initialize persistence manager

        Args:
            config_dir: Directory used for both settings and reports. When
                omitted, $XDG_CONFIG_HOME/nugrass and $XDG_DATA_HOME/nugrass
                are used.
        """
        if config_dir is not None:
            self.config_dir = Path(config_dir)
            self.data_dir = self.config_dir
        else:
            self.config_dir = _xdg_config_home() / "nugrass"
            self.data_dir = _xdg_data_home() / "nugrass"

        self.settings_file = self.config_dir / "settings.json"
        self.reports_dir = self.data_dir / "reports"

    def save_settings(self, settings: Dict[str, Any]) -> bool:
        """Save settings to disk

        Returns:
            True if successful, False otherwise
        """
        try:
            self.config_dir.mkdir(parents=True, exist_ok=True)
            settings_data = {
                "settings": {key: value for key, value in settings.items() if key in USER_SETTING_KEYS},
                "last_updated": datetime.now().isoformat(),
                "version": "1.0",
            }
            with open(self.settings_file, "w", encoding="utf-8") as f:
                json.dump(settings_data, f, indent=2, ensure_ascii=False)
            return True
        except Exception as e:
            logger.warning("Failed to save settings: %s", e)
            return False

    def load_settings(self) -> Optional[Dict[str, Any]]:
        """Load the recognised user settings, or None when there are none"""
        try:
            if not self.settings_file.exists():
                return None

            with open(self.settings_file, "r", encoding="utf-8") as f:
                settings_data = json.load(f)

            if not isinstance(settings_data, dict) or not isinstance(settings_data.get("settings"), dict):
                return None

            return {key: value for key, value in settings_data["settings"].items() if key in USER_SETTING_KEYS}
        except Exception as e:
            logger.warning("Failed to load settings: %s", e)
            return None

    def clear_settings(self) -> bool:
        try:
            if self.settings_file.exists():
                self.settings_file.unlink()
            return True
        except Exception as e:
            logger.warning("Failed to clear settings: %s", e)
            return False

    def save_report(self, report: Report) -> Optional[Path]:
        """Archive a report as <check>-<timestamp>.json

        Returns:
            The written path if successful, None otherwise
        """
        try:
            self.reports_dir.mkdir(parents=True, exist_ok=True)
            stamp = datetime.now().strftime("%Y%m%dT%H%M%S%f")
            path = self.reports_dir / f"{report.check}-{stamp}.json"
            path.write_text(report.to_json() + "\n", encoding="utf-8")
            return path
        except Exception as e:
            logger.warning("Failed to save report: %s", e)
            return None

    def list_reports(self) -> List[Path]:
        if not self.reports_dir.exists():
            return []
        return sorted(self.reports_dir.glob("*.json"))

    def get_config_dir(self) -> Path:
        return self.config_dir

    def get_data_dir(self) -> Path:
        return self.data_dir


# ----------------------------------------------------------------------
# Bundle files
# ----------------------------------------------------------------------


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", populate_by_name=True)


class RankModel(_Strict):
    k: int = Field(ge=0)
    l: int = Field(ge=0)


class ChartModel(_Strict):
    name: str
    even_gens: List[str] = Field(default_factory=list)
    odd_gens: List[str] = Field(default_factory=list)


class OverlapModel(_Strict):
    source: str = Field(alias="from")
    target: str = Field(alias="to")
    images: Dict[str, str]
    assume: List[str] = Field(default_factory=list)


class CocycleModel(_Strict):
    source: str = Field(alias="from")
    target: str = Field(alias="to")
    matrix: List[List[str]]


class BundleFile(_Strict):
    """The JSON presentation of a super vector bundle"""

    schema_version: int = Field(alias="schema")
    rank: RankModel
    charts: List[ChartModel]
    overlaps: List[OverlapModel] = Field(default_factory=list)
    cocycle: List[CocycleModel] = Field(default_factory=list)


def _context(chart: ChartModel) -> GeneratorContext:
    return GeneratorContext(chart.even_gens, chart.odd_gens)


def build_bundle(data: BundleFile) -> BundleCocycle:
    """Parse every expression of a validated bundle file in its owning chart"""
    if data.schema_version != SCHEMA_VERSION:
        raise SchemaError(f"Unsupported schema version {data.schema_version}, expected {SCHEMA_VERSION}")
    charts = {}
    for chart in data.charts:
        if chart.name in charts:
            raise SchemaError(f"Chart {chart.name!r} is declared twice")
        charts[chart.name] = _context(chart)

    def owner(name: str, where: str) -> GeneratorContext:
        if name not in charts:
            raise SchemaError(f"{where} names unknown chart {name!r}")
        return charts[name]

    overlaps = {}
    for item in data.overlaps:
        context = owner(item.source, "overlap")
        owner(item.target, "overlap")
        involution = NuInvolution.for_context(context)
        images = {name: parse_expression(text, context, involution) for name, text in item.images.items()}
        assumptions = AssumptionSet()
        for text in item.assume:
            assumptions.add(parse_expression(text, context, involution).body())
        overlaps[(item.source, item.target)] = Overlap(item.source, item.target, images, assumptions)
    atlas = SuperManifoldAtlas(charts, overlaps)

    k, l = data.rank.k, data.rank.l
    cocycle = {}
    for item in data.cocycle:
        context = owner(item.source, "cocycle")
        owner(item.target, "cocycle")
        if len(item.matrix) != k + l or any(len(row) != k + l for row in item.matrix):
            raise SchemaError(f"g_{item.source}{item.target} must be {k + l}x{k + l}")
        involution = NuInvolution.for_context(context)
        rows = [[parse_entry(text, context, involution) for text in row] for row in item.matrix]
        cocycle[(item.source, item.target)] = SuperMatrix((k, l), (k, l), rows, context)
    logger.debug("bundle with %d charts, %d overlaps, %d transition matrices", len(charts), len(overlaps), len(cocycle))
    return BundleCocycle(atlas, (k, l), cocycle)


def parse_bundle(payload: Union[str, Dict[str, Any]]) -> BundleCocycle:
    try:
        data = BundleFile.model_validate_json(payload) if isinstance(payload, str) else BundleFile.model_validate(payload)
    except ValidationError as exc:
        first = exc.errors()[0]
        where = ".".join(str(part) for part in first["loc"])
        raise SchemaError(f"Invalid bundle file at {where or 'top level'}: {first['msg']}") from exc
    return build_bundle(data)


def load_bundle_file(path: Union[str, Path]) -> BundleCocycle:
    """Read, validate and build a bundle file

    Raises:
        OSError: the file cannot be read
        SchemaError: the JSON does not follow the bundle schema
    """
    text = Path(path).read_text(encoding="utf-8")
    return parse_bundle(text)
