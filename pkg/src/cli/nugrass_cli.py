"""Main CLI class for nugrass"""

import argparse
import json
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

from rich.console import Console

# Simplified import handling with clear fallback chain
try:
    # When installed via pip/pipx (package_dir={"": "src"})
    from config.settings import (
        DEFAULT_SEED,
        DEFAULT_TOWER_DEPTH,
        DEFAULT_WORKERS,
        EXIT_FAIL,
        EXIT_INPUT_ERROR,
        EXIT_PASS,
        SAMPLE_THRESHOLD,
        USER_SETTING_KEYS,
    )
    from handlers.error_handler import ErrorHandler
    from handlers.suite_handler import SuiteHandler, describe_checks
    from utils.log import configure_logging
    from utils.persistence import PersistenceManager
    from utils.report import Report
except ImportError:
    # When running from source (development mode)
    from src.config.settings import (
        DEFAULT_SEED,
        DEFAULT_TOWER_DEPTH,
        DEFAULT_WORKERS,
        EXIT_FAIL,
        EXIT_INPUT_ERROR,
        EXIT_PASS,
        SAMPLE_THRESHOLD,
        USER_SETTING_KEYS,
    )
    from src.handlers.error_handler import ErrorHandler
    from src.handlers.suite_handler import SuiteHandler, describe_checks
    from src.utils.log import configure_logging
    from src.utils.persistence import PersistenceManager
    from src.utils.report import Report

console = Console(stderr=True)


def _pair(text: str) -> Tuple[int, int]:
    """Parse "i,j" or "i:j" into a pair of non-negative integers"""
    parts = text.replace(":", ",").split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected two integers like 4,2 but got {text!r}")
    try:
        i, j = (int(part) for part in parts)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected two integers like 4,2 but got {text!r}")
    if i < 0 or j < 0:
        raise argparse.ArgumentTypeError(f"negative level {text!r}")
    return i, j


def _level_list(text: str) -> List[Tuple[int, int]]:
    """ "2:1,3:2" -> [(2, 1), (3, 2)] """
    return [_pair(item) for item in text.split(",") if item.strip()]


class NuGrassCLI:
    def __init__(
        self,
        *,
        workers: int = DEFAULT_WORKERS,
        seed: int = DEFAULT_SEED,
        sample_threshold: int = SAMPLE_THRESHOLD,
        timing: bool = False,
        persistence: Optional[PersistenceManager] = None,
    ) -> None:
        self.persistence = persistence or PersistenceManager()
        self.suite = SuiteHandler(workers=workers, seed=seed, sample_threshold=sample_threshold, timing=timing)
        self.error_handler = ErrorHandler(console)

    def execute(self, check: str, options: Dict[str, Any], output: Optional[str] = None, save: bool = False) -> int:
        """Run one check, emit its JSON report and return the exit code"""
        try:
            report = self.suite.run(check, **options)
        except Exception as e:
            return self.error_handler.handle_error(e)
        self.emit(report, output)
        if save:
            path = self.persistence.save_report(report)
            if path is not None:
                console.print(f"[green]Report saved to {path}[/green]")
        return EXIT_PASS if report.passed else EXIT_FAIL

    # ------------------------------------------------------------------
    # Housekeeping commands; these print JSON but produce no report

    def list_checks(self) -> int:
        print(json.dumps(describe_checks(), indent=2))
        return EXIT_PASS

    def list_reports(self) -> int:
        directory = self.persistence.get_data_dir() / "reports"
        names = [path.name for path in self.persistence.list_reports()]
        print(json.dumps({"directory": str(directory), "reports": names}, indent=2))
        return EXIT_PASS

    def configure(self, action: str, key: Optional[str] = None, value: Optional[int] = None) -> int:
        """Show, set or clear the stored defaults"""
        stored = self.persistence.load_settings() or {}
        if action == "set":
            if key not in USER_SETTING_KEYS:
                console.print(f"[red]Unknown setting {key!r}; expected one of {', '.join(USER_SETTING_KEYS)}[/red]")
                return EXIT_INPUT_ERROR
            stored[key] = value
            if not self.persistence.save_settings(stored):
                return EXIT_INPUT_ERROR
        elif action == "clear":
            if not self.persistence.clear_settings():
                return EXIT_INPUT_ERROR
            stored = {}
        print(json.dumps({"file": str(self.persistence.get_config_dir() / "settings.json"), "settings": stored}, indent=2))
        return EXIT_PASS

    def emit(self, report: Report, output: Optional[str] = None) -> None:
        text = report.to_json()
        if output:
            Path(output).write_text(text + "\n", encoding="utf-8")
        else:
            print(text)
        if not report.passed:
            witness = report.witnesses[0]
            console.print(f"[red]{report.check}: {len(report.witnesses)} witness(es); first at {witness.location}[/red]")


def _add_spec_arguments(parser: argparse.ArgumentParser) -> None:
    for name in ("k", "l", "m", "n"):
        parser.add_argument(f"--{name}", type=int, required=True, metavar="INT")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nugrass",
        description="Exact checks for nu-Grassmannians, super vector bundles and their classifying maps",
    )
    parser.add_argument("--output", "-o", type=str, default=None, metavar="FILE", help="Write the JSON report to FILE instead of stdout")
    parser.add_argument("--workers", type=int, default=None, metavar="INT", help="Worker processes for independent checks")
    parser.add_argument("--seed", type=int, default=None, metavar="INT", help="Seed for sampled checks")
    parser.add_argument("--timing", action="store_true", help="Record wall-clock time in the report")
    parser.add_argument("--save", action="store_true", help="Archive the report under the data directory")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="Log progress to stderr (-vv for debug)")

    commands = parser.add_subparsers(dest="command", required=True)

    atlas = commands.add_parser("atlas", help="Chart atlas of a nu-Grassmannian")
    atlas_actions = atlas.add_subparsers(dest="action", required=True)
    _add_spec_arguments(atlas_actions.add_parser("build", help="Coordinate matrices and overlap classes"))
    atlas_verify = atlas_actions.add_parser("verify", help="Identity, pair and triple gluing")
    _add_spec_arguments(atlas_verify)
    atlas_verify.add_argument("--sample", type=int, default=None, metavar="N", help="Check N seeded-random triples")

    bundle = commands.add_parser("bundle", help="Super vector bundle files")
    bundle_actions = bundle.add_subparsers(dest="action", required=True)
    bundle_actions.add_parser("verify", help="Cocycle identities").add_argument("file")

    gauss = commands.add_parser("gauss", help="Gauss morphisms")
    gauss_actions = gauss.add_subparsers(dest="action", required=True)
    gauss_build = gauss_actions.add_parser("build", help="Gauss supermatrix and left inverse")
    gauss_build.add_argument("file")
    gauss_build.add_argument("--charts", type=int, default=None, metavar="T", help="Expected number of charts")

    commands.add_parser("classify", help="Classifying substitutions").add_argument("file")

    pullback = commands.add_parser("pullback", help="Pullback of the canonical bundle")
    pullback.add_subparsers(dest="action", required=True).add_parser("verify", help="Isomorphism with the input").add_argument("file")

    homotopy = commands.add_parser("homotopy", help="Linear homotopy of Gauss morphisms")
    endpoints = homotopy.add_subparsers(dest="action", required=True).add_parser("endpoints", help="Endpoints and kernel certificates")
    endpoints.add_argument("first")
    endpoints.add_argument("second")

    retraction = commands.add_parser("retraction", help="Deformation retraction of projective superspace")
    retraction.add_argument("--m", type=int, required=True, metavar="INT")
    retraction.add_argument("--n", type=int, required=True, metavar="INT")

    tower = commands.add_parser("tower", help="Finite truncations of the Grassmannian tower")
    tower_verify = tower.add_subparsers(dest="action", required=True).add_parser("verify", help="Squares, transitivity and sections")
    tower_verify.add_argument("--k", type=int, required=True, metavar="INT")
    tower_verify.add_argument("--l", type=int, required=True, metavar="INT")
    tower_verify.add_argument("--depth", type=int, default=DEFAULT_TOWER_DEPTH, metavar="D")
    tower_verify.add_argument("--sample", type=int, default=None, metavar="N")

    universality = commands.add_parser("universality", help="Universal bundle truncation")
    universality.add_argument("file")
    universality.add_argument("--level", type=_pair, required=True, metavar="I,J")
    universality.add_argument("--depth", type=int, default=DEFAULT_TOWER_DEPTH, metavar="D")

    reduced = commands.add_parser("reduced", help="Reduced Grassmannians inside nu-Grassmannians")
    reduced.add_argument("--k", type=int, required=True, metavar="INT")
    reduced.add_argument("--levels", type=_level_list, required=True, metavar="M:N,...", help="For example 2:1,3:2")

    commands.add_parser("checks", help="List the available checks")
    commands.add_parser("reports", help="List archived reports")
    config = commands.add_parser("config", help="Stored defaults for seed, workers and sample_threshold")
    config_actions = config.add_subparsers(dest="action", required=True)
    config_actions.add_parser("show", help="Print the stored defaults")
    config_set = config_actions.add_parser("set", help="Store one default")
    config_set.add_argument("key", choices=USER_SETTING_KEYS)
    config_set.add_argument("value", type=int)
    config_actions.add_parser("clear", help="Remove the stored defaults")

    return parser


def parse_arguments(argv: Optional[Sequence[str]] = None) -> argparse.Namespace:
    return build_parser().parse_args(argv)


def resolve_check(args: argparse.Namespace) -> Tuple[str, Dict[str, Any]]:
    """Map parsed arguments to a check name and its options"""
    command, action = args.command, getattr(args, "action", None)
    if command == "atlas":
        options = dict(k=args.k, l=args.l, m=args.m, n=args.n)
        if action == "verify":
            options["sample"] = args.sample
        return f"atlas-{action}", options
    if command == "bundle":
        return "bundle-verify", dict(path=args.file)
    if command == "gauss":
        return "gauss-build", dict(path=args.file, charts=args.charts)
    if command == "classify":
        return "classify", dict(path=args.file)
    if command == "pullback":
        return "pullback-verify", dict(path=args.file)
    if command == "homotopy":
        return "homotopy-endpoints", dict(first=args.first, second=args.second)
    if command == "retraction":
        return "retraction", dict(m=args.m, n=args.n)
    if command == "tower":
        return "tower-verify", dict(k=args.k, l=args.l, depth=args.depth, sample=args.sample)
    if command == "universality":
        return "universality", dict(path=args.file, level=args.level, depth=args.depth)
    if command == "reduced":
        return "reduced-embedding", dict(k=args.k, levels=args.levels)
    raise ValueError(f"Unknown command {command!r}")


def main(argv: Optional[Sequence[str]] = None) -> None:
    args = parse_arguments(argv)
    configure_logging(args.verbose)

    persistence = PersistenceManager()
    stored = persistence.load_settings() or {}
    # Command-line flags win over stored settings
    workers = args.workers if args.workers is not None else int(stored.get("workers", DEFAULT_WORKERS))
    seed = args.seed if args.seed is not None else int(stored.get("seed", DEFAULT_SEED))
    threshold = int(stored.get("sample_threshold", SAMPLE_THRESHOLD))

    cli = NuGrassCLI(workers=workers, seed=seed, sample_threshold=threshold, timing=args.timing, persistence=persistence)
    if args.command == "checks":
        sys.exit(cli.list_checks())
    if args.command == "reports":
        sys.exit(cli.list_reports())
    if args.command == "config":
        sys.exit(cli.configure(args.action, getattr(args, "key", None), getattr(args, "value", None)))
    check, options = resolve_check(args)
    sys.exit(cli.execute(check, options, output=args.output, save=args.save))


if __name__ == "__main__":
    main()
