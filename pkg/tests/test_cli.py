from __future__ import annotations

import json
import subprocess
import sys

import pytest

from bugonomics.cli import EXIT_COMPUTE, EXIT_INVALID, EXIT_IO, EXIT_OK, main
from bugonomics.serialize import dump_campaign, load_fixture


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_anchors(capsys):
    code, out, _ = run(capsys, "anchors")
    assert code == EXIT_OK
    for text in ("19.6%", "12.5%", "5.1", "8.0", "$417-$833", "423", "$2,000"):
        assert text in out


def test_metrics_json(capsys):
    code, out, _ = run(capsys, "metrics", "fixture:firefox_opus46", "--format", "json")
    assert code == EXIT_OK
    assert json.loads(out)["precision"] == {"numerator": 11, "denominator": 56}


def test_cost_model(capsys):
    code, out, _ = run(capsys, "cost", "fixture:sample_cost_model", "--format", "csv")
    assert code == EXIT_OK
    assert "total,total,7600" in out


def test_cost_from_campaign(capsys):
    code, out, _ = run(capsys, "cost", "fixture:mythos_preview")
    assert code == EXIT_OK and "$417-$833" in out


def test_cost_undefined(capsys):
    code, _, err = run(capsys, "cost", "fixture:firefox_150")
    assert code == EXIT_COMPUTE
    assert "unit cost undefined" in err


def test_cost_zero_submissions(capsys, tmp_path):
    p = tmp_path / "m.json"
    p.write_text('{"counts": {"submitted": 0, "accepted": 0}}')
    code, _, err = run(capsys, "cost", str(p))
    assert code == EXIT_COMPUTE


def test_sensitivity_flags(capsys):
    code, out, _ = run(capsys, "sensitivity", "fixture:sample_sensitivity", "--samples", "500", "--seed", "3",
                       "--format", "json")
    assert code == EXIT_OK
    doc = json.loads(out)
    assert doc["summary"]["sample_count"] == 500 and doc["summary"]["seed"] == 3


def test_sensitivity_division_by_zero(capsys, tmp_path):
    p = tmp_path / "s.json"
    p.write_text(json.dumps({
        "target": "cost_per_validated_finding",
        "params": {"c_g": "100", "c_v": "0", "n_c": {"lo": 0, "hi": 4}, "pi_s": 1},
    }))
    code, _, err = run(capsys, "sensitivity", str(p))
    assert code == EXIT_COMPUTE
    assert "containing zero" in err


def test_simulate(capsys):
    code, out, _ = run(capsys, "simulate", "fixture:sample_scenario", "--seed", "4")
    assert code == EXIT_OK
    assert "bottleneck" in out and "validation" in out


def test_lint_ok_and_fatal(capsys, tmp_path):
    assert run(capsys, "lint", "fixture:firefox_150")[0] == EXIT_OK
    p = tmp_path / "bad.json"
    p.write_text('{"schema_version": "1", "campaign_id": "bad", "submitted_reports": 3, "accepted_findings": 9}')
    code, out, _ = run(capsys, "lint", str(p))
    assert code == EXIT_INVALID and "funnel inversion" in out
    code, _, err = run(capsys, "metrics", str(p))
    assert code == EXIT_INVALID and "funnel inversion" in err


def test_review_lint(capsys):
    assert run(capsys, "review-lint", "fixture:sample_review_package")[0] == EXIT_INVALID
    assert run(capsys, "review-lint", "fixture:sample_review_package", "--policy", "fixture:sample_policy")[0] == EXIT_OK


def test_compare(capsys, tmp_path):
    code, out, _ = run(capsys, "compare", "fixture:firefox_opus46", "fixture:mythos_preview", "--format", "csv")
    assert code == EXIT_OK and len(out.splitlines()) == 3
    assert run(capsys, "compare", "fixture:firefox_150", "fixture:firefox_150")[0] == EXIT_INVALID


@pytest.mark.parametrize(
    "argv",
    [
        ("metrics", "/definitely/missing.json"),
        ("metrics", "fixture:nope"),
        ("simulate", "fixture:firefox_150"),
    ],
)
def test_io_errors(capsys, argv):
    assert run(capsys, *argv)[0] == EXIT_IO


def test_parse_errors(capsys, tmp_path):
    p = tmp_path / "v.json"
    p.write_text('{"schema_version": "99", "campaign_id": "x"}')
    code, _, err = run(capsys, "lint", str(p))
    assert code == EXIT_IO and "unsupported schema_version" in err
    p.write_text("")
    code, _, err = run(capsys, "metrics", str(p))
    assert code == EXIT_IO and "line 1" in err


def test_round_trip_through_file(capsys, tmp_path):
    p = tmp_path / "r.json"
    p.write_text(dump_campaign(load_fixture("mythos_preview")))
    assert run(capsys, "metrics", str(p))[0] == EXIT_OK


def test_console_script_module():
    proc = subprocess.run(
        [sys.executable, "-m", "bugonomics.cli", "anchors", "--format", "csv"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0
    assert proc.stdout.startswith("quantity,display,exact_value,kind,source\n")
