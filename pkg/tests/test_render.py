from __future__ import annotations

import csv
import io
import json
from fractions import Fraction

import pytest

from bugonomics.anchors import anchor_table
from bugonomics.core import money_from_usd
from bugonomics.cost import cost_per_validated_finding
from bugonomics.lint import check_review_package, lint_report
from bugonomics.metrics import campaign_summary, compare_campaigns
from bugonomics.render import FORMATS, render
from bugonomics.sensitivity import analyze
from bugonomics.serialize import load_fixture, load_fixtures, load_review_package, load_scenario, load_sensitivity
from bugonomics.sim import run_scenario


def results():
    target, params, _, _ = load_sensitivity("fixture:sample_sensitivity")
    fixtures = load_fixtures()
    return {
        "unit_cost": cost_per_validated_finding(money_from_usd("20000"), money_from_usd("0"), 48, 1),
        "summary": campaign_summary(fixtures["firefox_opus46"]),
        "comparison": compare_campaigns(list(fixtures.values())),
        "lint": lint_report(fixtures["firefox_150"]),
        "review": check_review_package(load_review_package("fixture:sample_review_package")),
        "sensitivity": analyze(params, target, 2000, seed=1),
        "simulation": run_scenario(load_scenario("fixture:sample_scenario")),
        "anchors": anchor_table(),
        "report": fixtures["mythos_preview"],
    }


@pytest.mark.parametrize("fmt", FORMATS)
@pytest.mark.parametrize("name", sorted(results()))
def test_every_result_renders(name, fmt):
    text = render(results()[name], fmt)
    assert text.endswith("\n")
    text.encode("utf-8")
    if fmt == "json":
        json.loads(text)
    if fmt == "csv":
        rows = list(csv.reader(io.StringIO(text)))
        assert len({len(r) for r in rows}) == 1


def test_unit_cost_display_and_json():
    u = cost_per_validated_finding(money_from_usd("20000"), money_from_usd("0"), 48, 1)
    assert "$417" in render(u, "table")
    doc = json.loads(render(u, "json"))
    assert doc["unit_cost"] == {"numerator": 1250, "denominator": 3}
    assert doc["numerator"] == "20000"


def test_summary_percent():
    text = render(campaign_summary(load_fixture("firefox_opus46")), "table")
    assert "19.6%" in text and "12.5%" in text and "5.1" in text and "8.0" in text
    assert "n/a" in text


def test_csv_column_order_is_stable():
    a = render(campaign_summary(load_fixture("firefox_opus46")), "csv").splitlines()[0]
    b = render(campaign_summary(load_fixture("mythos_preview")), "csv").splitlines()[0]
    assert a == b
    assert a.startswith("campaign_id,precision,")


def test_csv_values_exact():
    rows = list(csv.DictReader(io.StringIO(render(campaign_summary(load_fixture("firefox_opus46")), "csv"))))
    assert rows[0]["precision"] == "11/56"
    assert rows[0]["cost_per_validated_finding"] == ""


def test_rendering_does_not_touch_values():
    s = campaign_summary(load_fixture("firefox_opus46"))
    for fmt in FORMATS:
        render(s, fmt)
    assert s.precision == Fraction(22, 112)


def test_mc_table_six_significant_digits():
    target, params, _, _ = load_sensitivity("fixture:sample_sensitivity")
    r = analyze(params, target, 2000, seed=1)
    line = next(l for l in render(r, "table").splitlines() if l.startswith("mean"))
    assert line.split()[-1] == f"{r.summary.mean:.6g}"


def test_unknown_format():
    with pytest.raises(ValueError):
        render(anchor_table(), "yaml")


def test_unrenderable():
    with pytest.raises(TypeError):
        render(object(), "table")
