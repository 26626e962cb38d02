"""Derived campaign quantities: precision, reviewer burden, unit costs, throughput.

Everything is an exact rational. Fields a report does not disclose produce
``None`` metrics rather than zeros. Interval-valued inputs (a finding count
given as a range) are handed to :mod:`bugonomics.sensitivity`.
"""

from __future__ import annotations

from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

from . import cost
from .core import FunnelCounts, Interval, Money, to_exact
from .lint import CampaignReport, ReportValidationError, has_fatal, validate_campaign_report
from .sensitivity import interval_add, lift_cost_model


@dataclass(frozen=True)
class IntervalUnitCost:
    """Unit cost whose inputs are ranges; every field is an exact interval."""

    outcome_kind: str
    numerator: Interval
    denominator_count: Interval
    unit_cost: Interval
    included: tuple[str, ...] = ()


@dataclass(frozen=True)
class MetricsSummary:
    campaign_id: str | None = None
    precision: Fraction | None = None
    high_severity_fraction: Fraction | None = None
    reports_per_accepted: Fraction | None = None
    reports_per_high: Fraction | None = None
    unit_costs: Mapping[str, cost.UnitCostResult | IntervalUnitCost] = field(default_factory=dict)
    fixes_per_maintainer_hour: Fraction | None = None
    context: Mapping[str, Any] = field(default_factory=dict)


def funnel_metrics(counts: FunnelCounts) -> MetricsSummary:
    """Precision and reviewer-burden ratios over submitted reports.

    The high-severity fraction is taken over submitted reports, not over
    accepted findings, so it reads as "share of what reviewers saw".
    """
    sub = counts.submitted_reports
    if sub == 0:
        raise ValueError("no submitted reports")
    acc = counts.accepted_findings
    high = counts.high_severity
    return MetricsSummary(
        precision=Fraction(acc, sub),
        high_severity_fraction=Fraction(high, sub) if high is not None else None,
        reports_per_accepted=Fraction(sub, acc) if acc > 0 else None,
        reports_per_high=Fraction(sub, high) if high else None,
    )


def fixes_per_maintainer_hour(accepted_fixed: int, maintainer_hours) -> Fraction:
    hours = to_exact(maintainer_hours)
    if hours <= 0:
        raise ValueError("maintainer hours must be positive")
    if accepted_fixed < 0:
        raise ValueError("accepted fix count must be non-negative")
    return Fraction(accepted_fixed) / hours


def _stage_money(report: CampaignReport, hours: Fraction | None, stage: str) -> Money | None:
    rate = report.hourly_rates.get(stage)
    if hours is None or rate is None:
        return None
    return Money.from_exact(hours * rate.usd_per_hour.usd)


def generation_spend(report: CampaignReport) -> Money | Interval | None:
    """Compute/API spend as a cost term.

    A spend stated as an upper bound ("under $20,000") is taken at that
    bound, which makes every derived unit cost an upper bound as well.
    """
    spend = report.total_expenditure
    if isinstance(spend, Interval) and report.expenditure_reported_as == "upper_bound":
        return Money.from_exact(spend.hi)
    return spend


def _denominators(report: CampaignReport, outcome_count: int) -> tuple[int, Fraction]:
    """``(N_c, pi_s)`` from the funnel, or the outcome count itself when the funnel is partial."""
    sub, acc = report.submitted_reports, report.accepted_findings
    if sub and isinstance(acc, int):
        return sub, Fraction(acc, sub)
    return outcome_count, Fraction(1)


def _unit_costs(report: CampaignReport) -> dict[str, cost.UnitCostResult | IntervalUnitCost]:
    c_g = generation_spend(report)
    if c_g is None:
        return {}
    c_v = _stage_money(report, report.validation_hours, "validation")
    c_i = _stage_money(report, report.impact_hours, "impact")
    c_t = _stage_money(report, report.maintainer_review_hours, "triage")
    zero = Money.zero()
    out: dict[str, cost.UnitCostResult | IntervalUnitCost] = {}
    acc = report.accepted_findings

    def included(**terms):
        return ("generation",) + tuple(name for name, v in terms.items() if v is not None)

    if isinstance(acc, Interval) or isinstance(c_g, Interval):
        n = acc if isinstance(acc, Interval) else Interval.point(acc) if acc is not None else None
        if n is None or n.lo <= 0:
            return out
        g = c_g if isinstance(c_g, Interval) else Interval.point(c_g.usd, "money")
        num = g if c_v is None else interval_add(g, Interval.point(c_v.usd, "money"))
        lifted = lift_cost_model(
            "cost_per_validated_finding", {"c_g": g, "c_v": c_v or zero, "n_c": n, "pi_s": 1}
        )
        out["validated_finding"] = IntervalUnitCost(
            "validated_finding", num, n, lifted, included(validation=c_v)
        )
        return out

    if isinstance(acc, int) and acc > 0:
        n_c, pi_s = _denominators(report, acc)
        res = cost.cost_per_validated_finding(c_g, c_v or zero, n_c, pi_s)
        out["validated_finding"] = _relabel(res, included(validation=c_v))
        res = cost.cost_per_accepted(c_g, c_v or zero, zero, c_t or zero, n_c, pi_s)
        out["accepted"] = _relabel(res, included(validation=c_v, triage=c_t))

    expl = report.exploitable
    if expl:
        if isinstance(acc, int) and acc > 0:
            n_c, pi_s = _denominators(report, acc)
            pi_e = Fraction(expl, acc)
        else:
            n_c, pi_s, pi_e = expl, Fraction(1), Fraction(1)
        res = cost.cost_per_impact_backed(c_g, c_v or zero, c_i or zero, n_c, pi_s, pi_e)
        out["impact_backed"] = _relabel(res, included(validation=c_v, impact=c_i))
    return out


def _relabel(result: cost.UnitCostResult, included: tuple[str, ...]) -> cost.UnitCostResult:
    return cost.UnitCostResult(
        result.outcome_kind, result.numerator, result.denominator_count, result.exact_unit_cost, included
    )


def campaign_summary(report: CampaignReport) -> MetricsSummary:
    """All metrics the report's disclosed fields support."""
    findings = validate_campaign_report(report)
    if has_fatal(findings):
        raise ReportValidationError(findings)

    funnel = MetricsSummary()
    acc = report.accepted_findings
    if report.submitted_reports and isinstance(acc, int):
        counts = FunnelCounts(
            submitted_reports=report.submitted_reports,
            accepted_findings=acc,
            raw_candidates=report.raw_candidates,
            deduplicated_candidates=report.deduplicated_candidates,
            high_severity=report.high_severity,
            exploitable=report.exploitable,
        )
        funnel = funnel_metrics(counts)

    fpmh = None
    patched = report.patch_status.patched if report.patch_status else None
    if patched is not None and report.maintainer_review_hours:
        fpmh = fixes_per_maintainer_hour(patched, report.maintainer_review_hours)

    return MetricsSummary(
        campaign_id=report.campaign_id,
        precision=funnel.precision,
        high_severity_fraction=funnel.high_severity_fraction,
        reports_per_accepted=funnel.reports_per_accepted,
        reports_per_high=funnel.reports_per_high,
        unit_costs=_unit_costs(report),
        fixes_per_maintainer_hour=fpmh,
        context=dict(report.context),
    )


@dataclass(frozen=True)
class ComparisonRow:
    campaign_id: str
    report: CampaignReport
    summary: MetricsSummary


@dataclass(frozen=True)
class Comparison:
    rows: tuple[ComparisonRow, ...]


def compare_campaigns(reports: Sequence[CampaignReport]) -> Comparison:
    """One row per campaign, ordered by campaign id."""
    if not reports:
        raise ValueError("nothing to compare")
    ids = [r.campaign_id for r in reports]
    dupes = sorted({i for i in ids if ids.count(i) > 1})
    if dupes:
        raise ValueError(f"duplicate campaign identifiers: {dupes}")
    rows = tuple(
        ComparisonRow(r.campaign_id, r, campaign_summary(r))
        for r in sorted(reports, key=lambda r: r.campaign_id)
    )
    return Comparison(rows)
