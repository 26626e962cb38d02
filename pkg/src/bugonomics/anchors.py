"""The public-anchor table, rebuilt from the built-in fixtures.

Reported rows are read straight from the fixture documents; derived rows
go through :func:`~bugonomics.metrics.campaign_summary`, so the table is a
check on the metric code as much as a summary of the sources.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

from .core import Interval, format_percent, format_ratio, format_usd, format_usd_range
from .lint import CampaignReport
from .metrics import campaign_summary
from .serialize import load_fixture


@dataclass(frozen=True)
class AnchorRow:
    quantity: str
    display: str
    value: Any  # exact: int, Fraction, Money or Interval; str for prose-only values
    source: str
    derived: bool = False


@dataclass(frozen=True)
class AnchorTable:
    rows: tuple[AnchorRow, ...]

    def row(self, quantity: str) -> AnchorRow:
        for r in self.rows:
            if r.quantity == quantity:
                return r
        raise KeyError(quantity)


def _qualifier(report: CampaignReport) -> str:
    return {"upper_bound": "<", "approximate": "~"}.get(report.expenditure_reported_as or "", "")


def _mythos(report: CampaignReport) -> list[AnchorRow]:
    src = report.campaign_id
    spend = report.total_expenditure
    acc = report.accepted_findings
    q = _qualifier(report)
    cost_display = q + format_usd(spend.hi if isinstance(spend, Interval) else spend)
    per_finding = campaign_summary(report).unit_costs["validated_finding"]
    label = f"{int(acc.lo)}-{int(acc.hi)}"
    return [
        AnchorRow("Mythos campaign cost", cost_display, spend, src),
        AnchorRow("Mythos campaign size", f"{report.run_count:,} scaffolded runs", report.run_count, src),
        AnchorRow("Mythos findings", f"{report.context.get('findings_as_reported', label)} ({label})", acc, src),
        AnchorRow(
            f"Implied cost/finding if {label} findings",
            q + format_usd_range(per_finding.unit_cost),
            per_finding.unit_cost,
            src,
            derived=True,
        ),
    ]


def _firefox(report: CampaignReport) -> list[AnchorRow]:
    src = report.campaign_id
    s = campaign_summary(report)
    return [
        AnchorRow("Firefox submitted reports", str(report.submitted_reports), report.submitted_reports, src),
        AnchorRow("Firefox accepted vulnerabilities", str(report.accepted_findings), report.accepted_findings, src),
        AnchorRow("Firefox high-severity vulnerabilities", str(report.high_severity), report.high_severity, src),
        AnchorRow("Firefox accepted fraction", format_percent(s.precision), s.precision, src, True),
        AnchorRow("Firefox high-severity fraction", format_percent(s.high_severity_fraction),
                  s.high_severity_fraction, src, True),
        AnchorRow("Reports per accepted vulnerability", format_ratio(s.reports_per_accepted),
                  s.reports_per_accepted, src, True),
        AnchorRow("Reports per high-severity vulnerability", format_ratio(s.reports_per_high),
                  s.reports_per_high, src, True),
    ]


def _firefox_150(report: CampaignReport) -> list[AnchorRow]:
    src = report.campaign_id
    sev = report.severity
    total = report.context.get("april_2026_total_security_fixes")
    return [
        AnchorRow("Firefox 150 Mythos-identified bugs", str(report.accepted_findings), report.accepted_findings, src),
        AnchorRow(
            "Firefox 150 severity split",
            f"{sev.high} high, {sev.moderate} moderate, {sev.low} low",
            {"high": sev.high, "moderate": sev.moderate, "low": sev.low},
            src,
        ),
        AnchorRow("Firefox April 2026 total security fixes", str(total), total, src),
    ]


def _exploit(report: CampaignReport) -> list[AnchorRow]:
    src = report.campaign_id
    q = _qualifier(report)
    n = report.exploitable
    per = campaign_summary(report).unit_costs["impact_backed"]
    return [
        AnchorRow(
            "Exploit-development experiment",
            f"{q}{format_usd(report.total_expenditure)} for {n} crude exploits",
            report.total_expenditure,
            src,
        ),
        AnchorRow("Cost per successful crude exploit", q + format_usd(per.unit_cost), per.exact_unit_cost, src, True),
    ]


def anchor_table() -> AnchorTable:
    rows = (
        _mythos(load_fixture("mythos_preview"))
        + _firefox(load_fixture("firefox_opus46"))
        + _firefox_150(load_fixture("firefox_150"))
        + _exploit(load_fixture("exploit_experiment"))
    )
    return AnchorTable(tuple(rows))

