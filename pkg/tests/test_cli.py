import json
import subprocess
import sys

import pytest

from starrep import __version__
from starrep.cli import COMMANDS, main


def run_cli(tmp_path, *args):
    out = tmp_path / "report.json"
    code = main([*args, "--output", str(out)])
    return code, json.loads(out.read_text()), out.read_bytes()


@pytest.mark.parametrize("command", COMMANDS)
def test_every_command_passes(tmp_path, command):
    code, report, _ = run_cli(tmp_path, command, "--samples", "2")
    assert code == 0, report["summary"]
    assert report["passed"] and report["error"] is None
    assert report["version"] == __version__
    assert report["manifest"]["command"] == command
    assert all(line.startswith("PASS") for line in report["summary"])


@pytest.mark.parametrize("command", ["chern", "gns", "deform-module"])
def test_reports_are_deterministic(tmp_path, command):
    first = run_cli(tmp_path, command, "--samples", "2")[2]
    second = run_cli(tmp_path, command, "--samples", "2")[2]
    assert first == second


def test_order_option_is_recorded(tmp_path):
    code, report, _ = run_cli(tmp_path, "gns", "--fixture", "discrete-eval", "--order", "3")
    assert code == 0 and report["manifest"]["order"] == 3
    # evaluation at a point: one-dimensional carrier with norm 1 + O(lam^4)
    (entry,), = report["outputs"]["gram"]
    assert entry["order"] == 3 and len(entry["coeffs"]) == 4
    assert entry["coeffs"][0] == {"re": "1", "im": "0"}


def test_input_file_overrides(tmp_path):
    opts = tmp_path / "opts.json"
    opts.write_text(json.dumps({"fixture": "3-chart", "samples": 1}))
    code, report, _ = run_cli(tmp_path, "serre-swan", "--input", str(opts))
    assert code == 0
    assert report["outputs"]["model"]["triples"] == [["0", "1", "2"]]


def test_unknown_command_exit_code(tmp_path, capsys):
    assert main(["frobnicate"]) == 2
    assert "unknown command" in capsys.readouterr().err


def test_bad_input_exit_code(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("[1, 2]")
    assert main(["gns", "--input", str(bad)]) == 2


def test_library_error_is_reported(tmp_path):
    code, report, _ = run_cli(tmp_path, "gns", "--fixture", "no-such-fixture")
    assert code == 1 and not report["passed"]
    assert report["error"]["code"]


def test_module_entry_point(tmp_path):
    out = tmp_path / "chern.json"
    proc = subprocess.run([sys.executable, "-m", "starrep", "chern", "--output", str(out)],
                          capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    report = json.loads(out.read_text())
    assert report["outputs"]["fundamental_pairing"] == "1"
