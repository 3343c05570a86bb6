"""
Tests for the command-line drivers and their exit codes.
Run from project root: python -m pytest tests/test_cli.py -v
"""

import json
import sys
from pathlib import Path

import pytest

PROJECT_ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(PROJECT_ROOT))

from src import cli
from src.budget import CertificationError
from src.cli import EXIT_ERROR, EXIT_OK, EXIT_TIMEOUT, main
from src.config import fixture_path


def test_approximate_writes_requested_outputs(tmp_path):
    code = main([
        "approximate", "--fixture", str(fixture_path("straight-arc")), "--epsilon", "1/16",
        "--output-dir", str(tmp_path), "--out", "json", "--out", "csv", "--out", "svg",
    ])
    assert code == EXIT_OK
    report = json.loads((tmp_path / "straight-arc_report.json").read_text(encoding="utf-8"))
    assert report["status"] == "ok" and report["same_as_source"] is True
    assert (tmp_path / "straight-arc_endpoints.csv").exists()
    assert (tmp_path / "figures" / "straight-arc.svg").exists()


def test_default_output_is_json_only(tmp_path):
    assert main(["approximate", "--fixture", str(fixture_path("straight-arc")), "--epsilon", "1/8",
                 "--output-dir", str(tmp_path)]) == EXIT_OK
    assert sorted(p.name for p in tmp_path.iterdir()) == ["straight-arc_report.json"]


@pytest.mark.parametrize("epsilon", ["0", "-1/4", "abc", "1/0"])
def test_bad_epsilon_is_a_usage_error(epsilon, tmp_path):
    with pytest.raises(SystemExit) as info:
        main(["approximate", "--fixture", str(fixture_path("straight-arc")), "--epsilon", epsilon,
              "--output-dir", str(tmp_path)])
    assert info.value.code == 2


def test_missing_fixture(tmp_path, capsys):
    code = main(["approximate", "--fixture", str(tmp_path / "nope.json"), "--epsilon", "1/8"])
    assert code == EXIT_ERROR
    assert "ERROR" in capsys.readouterr().err


def test_exhausted_fuel_still_writes_the_partial_report(tmp_path):
    code = main(["approximate", "--fixture", str(fixture_path("hidden-arc")), "--epsilon", "1/4",
                 "--fuel", "5", "--output-dir", str(tmp_path)])
    assert code == EXIT_TIMEOUT
    report = json.loads((tmp_path / "hidden-arc_report.json").read_text(encoding="utf-8"))
    assert report["status"] == "timeout"
    assert report["certificate"] is None


def test_uncertified_result_is_an_error_with_a_partial_report(tmp_path, monkeypatch):
    def refuse(*args, **kwargs):
        raise CertificationError("initial_chain", "fmesh(l) < eps/2", 14)

    monkeypatch.setattr(cli, "approximate_graph", refuse)
    code = main(["approximate", "--fixture", str(fixture_path("hidden-arc")), "--epsilon", "1/4",
                 "--output-dir", str(tmp_path)])
    assert code == EXIT_ERROR
    report = json.loads((tmp_path / "hidden-arc_report.json").read_text(encoding="utf-8"))
    assert report["status"] == "uncertified"
    assert report["certificate"] is None


def test_check_formal_suite(tmp_path):
    code = main(["check", "--fixture", str(fixture_path("straight-arc")), "--suite", "formal",
                 "--output-dir", str(tmp_path)])
    assert code == EXIT_OK
    lines = (tmp_path / "straight-arc_checks.csv").read_text(encoding="utf-8").splitlines()
    assert lines[0] == "suite,name,passed,detail"
    assert len(lines) == 4


def test_unknown_suite_is_a_usage_error():
    with pytest.raises(SystemExit) as info:
        main(["check", "--fixture", str(fixture_path("straight-arc")), "--suite", "nope"])
    assert info.value.code == 2


if __name__ == "__main__":
    import subprocess
    sys.exit(subprocess.call([sys.executable, "-m", "pytest", __file__, "-v", "-s"]))
