"""Behavior-focused tests for CLI flows, exit codes and settings resolution."""

import argparse
import json
from pathlib import Path

import pytest

# ---------------------------------------------------------------------------
# Import helpers – support both installed-package and source-tree layouts
# ---------------------------------------------------------------------------
try:
    from cli.nugrass_cli import _level_list, _pair, main, parse_arguments, resolve_check
    from handlers.error_handler import ErrorHandler
    from handlers.suite_handler import SuiteHandler, describe_checks
    from utils import exceptions as errors
    from utils.persistence import PersistenceManager
except ImportError:
    from src.cli.nugrass_cli import _level_list, _pair, main, parse_arguments, resolve_check
    from src.handlers.error_handler import ErrorHandler
    from src.handlers.suite_handler import SuiteHandler, describe_checks
    from src.utils import exceptions as errors
    from src.utils.persistence import PersistenceManager


FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture
def isolated(tmp_path, monkeypatch):
    """Point settings and the report archive at a temporary directory"""
    monkeypatch.setenv("XDG_CONFIG_HOME", str(tmp_path / "cfg"))
    monkeypatch.setenv("XDG_DATA_HOME", str(tmp_path / "data"))
    return tmp_path


def run(argv):
    with pytest.raises(SystemExit) as exc_info:
        main(argv)
    return exc_info.value.code


# ===========================================================================
# Argument parsing
# ===========================================================================


class TestArguments:
    def test_pair_accepts_both_separators(self):
        assert _pair("4,2") == (4, 2)
        assert _pair("4:2") == (4, 2)

    @pytest.mark.parametrize("text", ["4", "4,2,1", "a,b", "-1,2"])
    def test_pair_rejects(self, text):
        with pytest.raises(argparse.ArgumentTypeError):
            _pair(text)

    def test_level_list(self):
        assert _level_list("2:1,3:2") == [(2, 1), (3, 2)]

    def test_resolve_atlas_verify(self):
        args = parse_arguments(["atlas", "verify", "--k", "1", "--l", "1", "--m", "2", "--n", "2", "--sample", "5"])
        assert resolve_check(args) == ("atlas-verify", dict(k=1, l=1, m=2, n=2, sample=5))

    def test_resolve_universality(self):
        args = parse_arguments(["universality", "bundle.json", "--level", "4,2", "--depth", "3"])
        assert resolve_check(args) == ("universality", dict(path="bundle.json", level=(4, 2), depth=3))

    def test_resolve_reduced(self):
        args = parse_arguments(["reduced", "--k", "1", "--levels", "2:1,3:2"])
        assert resolve_check(args) == ("reduced-embedding", dict(k=1, levels=[(2, 1), (3, 2)]))

    def test_every_command_names_a_known_check(self):
        known = {entry["check"] for entry in describe_checks()}
        argvs = [
            ["atlas", "build", "--k", "1", "--l", "0", "--m", "2", "--n", "0"],
            ["bundle", "verify", "f.json"],
            ["gauss", "build", "f.json"],
            ["classify", "f.json"],
            ["pullback", "verify", "f.json"],
            ["homotopy", "endpoints", "a.json", "b.json"],
            ["retraction", "--m", "1", "--n", "1"],
            ["tower", "verify", "--k", "1", "--l", "1"],
        ]
        for argv in argvs:
            check, _ = resolve_check(parse_arguments(argv))
            assert check in known, argv


# ===========================================================================
# main() exit codes and output
# ===========================================================================


class TestMain:
    def test_passing_check_prints_json(self, isolated, capsys):
        assert run(["bundle", "verify", str(FIXTURES / "rank10_two_chart.json")]) == 0
        report = json.loads(capsys.readouterr().out)
        assert report["check"] == "bundle-verify"
        assert report["status"] == "pass"
        assert report["details"]["file"] == "rank10_two_chart.json"
        assert report["timing"] is None

    def test_failing_check_exits_1(self, isolated, capsys):
        assert run(["bundle", "verify", str(FIXTURES / "corrupted.json")]) == 1
        report = json.loads(capsys.readouterr().out)
        assert report["witnesses"][0]["location"].startswith("pair U1,U2")

    def test_missing_file_exits_2(self, isolated, capsys):
        assert run(["bundle", "verify", str(isolated / "absent.json")]) == 2
        assert capsys.readouterr().out == ""

    def test_chart_count_mismatch_exits_2(self, isolated):
        assert run(["gauss", "build", str(FIXTURES / "rank10_two_chart.json"), "--charts", "3"]) == 2

    def test_kernel_failure_exits_1(self, isolated):
        assert run(["gauss", "build", str(FIXTURES / "corrupted.json")]) == 1

    def test_output_file(self, isolated, capsys):
        out = isolated / "report.json"
        assert run(["--output", str(out), "retraction", "--m", "1", "--n", "1"]) == 0
        assert capsys.readouterr().out == ""
        assert json.loads(out.read_text(encoding="utf-8"))["check"] == "retraction"

    def test_timing_flag(self, isolated, capsys):
        assert run(["--timing", "retraction", "--m", "1", "--n", "1"]) == 0
        assert isinstance(json.loads(capsys.readouterr().out)["timing"], float)

    def test_save_archives_the_report(self, isolated, capsys):
        assert run(["--save", "retraction", "--m", "1", "--n", "1"]) == 0
        assert len(PersistenceManager().list_reports()) == 1


class TestStoredSettings:
    ARGV = ["atlas", "verify", "--k", "1", "--l", "0", "--m", "3", "--n", "0", "--sample", "2"]

    def test_stored_seed_is_used(self, isolated, capsys):
        PersistenceManager().save_settings({"seed": 5})
        assert run(self.ARGV) == 0
        assert json.loads(capsys.readouterr().out)["details"]["seed"] == 5

    def test_flag_wins_over_stored_seed(self, isolated, capsys):
        PersistenceManager().save_settings({"seed": 5})
        assert run(["--seed", "9"] + self.ARGV) == 0
        assert json.loads(capsys.readouterr().out)["details"]["seed"] == 9


class TestHousekeeping:
    def test_checks_lists_every_check(self, isolated, capsys):
        assert run(["checks"]) == 0
        listed = json.loads(capsys.readouterr().out)
        assert [entry["check"] for entry in listed] == [entry["check"] for entry in describe_checks()]
        assert all(set(entry) == {"check", "description"} for entry in listed)

    def test_config_set_show_clear(self, isolated, capsys):
        assert run(["config", "set", "seed", "7"]) == 0
        shown = json.loads(capsys.readouterr().out)
        assert shown["settings"] == {"seed": 7}
        assert shown["file"] == str(isolated / "cfg" / "nugrass" / "settings.json")
        assert PersistenceManager().load_settings() == {"seed": 7}

        assert run(["config", "show"]) == 0
        assert json.loads(capsys.readouterr().out)["settings"] == {"seed": 7}

        assert run(["config", "clear"]) == 0
        assert json.loads(capsys.readouterr().out)["settings"] == {}
        assert PersistenceManager().load_settings() is None

    def test_config_rejects_unknown_keys(self, isolated):
        with pytest.raises(SystemExit):
            parse_arguments(["config", "set", "colour", "1"])

    def test_reports_lists_the_archive(self, isolated, capsys):
        assert run(["reports"]) == 0
        listing = json.loads(capsys.readouterr().out)
        assert listing == {"directory": str(isolated / "data" / "nugrass" / "reports"), "reports": []}

        assert run(["--save", "retraction", "--m", "1", "--n", "1"]) == 0
        capsys.readouterr()
        assert run(["reports"]) == 0
        names = json.loads(capsys.readouterr().out)["reports"]
        assert len(names) == 1
        assert names[0].startswith("retraction-")


# ===========================================================================
# Handlers
# ===========================================================================


class TestSuiteHandler:
    def test_unknown_check(self):
        with pytest.raises(ValueError):
            SuiteHandler().run("no-such-check")

    def test_classify_lists_images(self):
        report = SuiteHandler().run("classify", path=str(FIXTURES / "rank10_two_chart.json"))
        assert report.passed
        assert sorted(report.details["images"]) == ["{1}", "{2}"]
        assert report.details["target"] == "(1,0,2,0)"

    def test_homotopy_endpoints(self):
        path = str(FIXTURES / "rank10_two_chart.json")
        report = SuiteHandler().run("homotopy-endpoints", first=path, second=path)
        assert report.passed, report.witnesses
        assert report.details["family_split"] == [4, 0]


class TestErrorHandler:
    @pytest.mark.parametrize(
        "error,code",
        [
            (errors.KernelNotTrivial("kernel"), 1),
            (errors.EndpointMismatch("endpoint"), 1),
            (errors.SchemaError("schema"), 2),
            (errors.DimensionMismatch("dims"), 2),
            (FileNotFoundError("absent"), 2),
            (RuntimeError("boom"), 1),
        ],
    )
    def test_exit_codes(self, error, code):
        assert ErrorHandler().exit_code(error) == code

    def test_description_follows_the_class_hierarchy(self):
        handler = ErrorHandler()
        assert handler.describe(errors.SchemaError("x"))["code"] == "E-SCHEMA"
        assert handler.describe(RuntimeError("x"))["code"] == "E-INTERNAL"
