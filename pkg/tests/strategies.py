"""Hypothesis strategies shared by the test modules."""

from __future__ import annotations

from fractions import Fraction

from hypothesis import strategies as st

from bugonomics.core import HourlyRate, Interval, Money
from bugonomics.lint import (
    CampaignReport,
    GroundingEvidence,
    ImpactStatus,
    PatchStatus,
    SeveritySplit,
)
from bugonomics.sim import Arrivals, PipelineConfig, ServiceTime, StageConfig

# micro-USD amounts up to $10M keep sums far from the 64-bit ceiling
micros = st.integers(min_value=0, max_value=10_000_000 * 10**6)
money = micros.map(Money)
positive_money = st.integers(min_value=1, max_value=10_000_000 * 10**6).map(Money)

fractions01 = st.fractions(min_value=0, max_value=1, max_denominator=10_000)
positive_fractions01 = st.fractions(min_value=Fraction(1, 10_000), max_value=1, max_denominator=10_000)
hours = st.fractions(min_value=0, max_value=10_000, max_denominator=1000)

_json_scalar = st.one_of(
    st.none(),
    st.booleans(),
    st.integers(-(10**12), 10**12),
    st.text(max_size=12),
    st.decimals(allow_nan=False, allow_infinity=False, places=3, min_value=-(10**6), max_value=10**6),
)
json_values = st.recursive(
    _json_scalar,
    lambda inner: st.lists(inner, max_size=3) | st.dictionaries(st.text(max_size=8), inner, max_size=3),
    max_leaves=8,
)


@st.composite
def campaign_reports(draw) -> CampaignReport:
    """Conformant reports: counts respect the funnel, optional fields come and go."""

    def maybe(strategy):
        return draw(st.one_of(st.none(), strategy))

    accepted = draw(st.integers(0, 500))
    submitted = accepted + draw(st.integers(0, 500))
    dedup = submitted + draw(st.integers(0, 500))
    raw = dedup + draw(st.integers(0, 500))

    acc_value = accepted
    if draw(st.booleans()) and draw(st.booleans()):
        acc_value = Interval(accepted, accepted + draw(st.integers(0, 50)))
    hi_acc = acc_value.hi if isinstance(acc_value, Interval) else accepted
    if isinstance(acc_value, Interval):
        submitted, dedup, raw = None, None, None

    severity = None
    if draw(st.booleans()):
        high = draw(st.integers(0, accepted))
        moderate = draw(st.integers(0, accepted - high))
        low = draw(st.integers(0, accepted - high - moderate))
        exhaustive = draw(st.booleans()) and not isinstance(acc_value, Interval)
        if exhaustive:
            low = accepted - high - moderate
        keep = draw(st.sets(st.sampled_from(["high", "moderate", "low"])))
        if exhaustive:
            keep = {"high", "moderate", "low"}
        severity = SeveritySplit(
            high=high if "high" in keep else None,
            moderate=moderate if "moderate" in keep else None,
            low=low if "low" in keep else None,
            exhaustive=exhaustive,
        )
    impact = None
    if draw(st.booleans()):
        impact = ImpactStatus(
            exploitable=maybe(st.integers(0, int(hi_acc))),
            not_exploitable=maybe(st.integers(0, 500)),
            unassessed=maybe(st.integers(0, 500)),
        )

    spend = maybe(money)
    reported_as = None
    if draw(st.booleans()):
        lo = draw(micros)
        spend = Interval(Fraction(lo, 10**6), Fraction(lo + draw(micros), 10**6), "money")
    if spend is not None and draw(st.booleans()):
        reported_as = draw(st.sampled_from(["upper_bound", "approximate", "estimate"]))

    extra_keys = st.text(alphabet="abcdefghijklmnopqrstuvwxyz_", min_size=3, max_size=10).map(lambda k: "x_" + k)
    return CampaignReport(
        campaign_id=draw(st.text(min_size=1, max_size=20)),
        raw_candidates=maybe(st.just(raw)) if raw is not None else None,
        deduplicated_candidates=maybe(st.just(dedup)) if dedup is not None else None,
        submitted_reports=maybe(st.just(submitted)) if submitted is not None else None,
        accepted_findings=maybe(st.just(acc_value)),
        severity=severity,
        impact_status=impact,
        grounding_evidence=maybe(st.builds(GroundingEvidence, *[st.booleans()] * 5)),
        validation_hours=maybe(hours),
        impact_hours=maybe(hours),
        maintainer_review_hours=maybe(hours),
        patch_status=maybe(st.builds(PatchStatus, *[st.one_of(st.none(), st.integers(0, 100))] * 3)),
        time_to_first_useful_finding=maybe(hours),
        run_count=maybe(st.integers(0, 10**6)),
        failed_run_cost=maybe(money),
        scaffold_effort_hours=maybe(hours),
        total_expenditure=spend,
        expenditure_reported_as=reported_as,
        hourly_rates=draw(st.dictionaries(
            st.sampled_from(["validation", "impact", "remediation", "triage"]), money.map(HourlyRate), max_size=4
        )),
        declared_precision=maybe(fractions01),
        context=draw(st.dictionaries(st.text(max_size=10), json_values, max_size=3)),
        extra_fields=draw(st.dictionaries(extra_keys, json_values, max_size=2)),
    )


@st.composite
def pipeline_configs(draw, process=None, discipline=None) -> PipelineConfig:
    """Small random pipelines: a few weeks, modest arrival rates, mixed capacities."""

    def service():
        lo = draw(st.fractions(min_value=0, max_value=8, max_denominator=4))
        kind = draw(st.sampled_from(["point", "uniform", "triangular"]))
        if kind == "point":
            return ServiceTime.fixed(lo)
        hi = lo + draw(st.fractions(min_value=Fraction(1, 4), max_value=8, max_denominator=4))
        mode = lo + (hi - lo) / 2 if kind == "triangular" else None
        return ServiceTime(Interval(lo, hi, "hours"), kind, mode)

    stages = {}
    for name in ("generation", "validation", "impact", "remediation", "triage"):
        cap = draw(st.one_of(st.none(), st.integers(0, 60).map(Fraction)))
        stages[name] = StageConfig(service(), cap, HourlyRate(draw(st.integers(0, 300).map(lambda d: Money(d * 10**6)))))
    disc = discipline or draw(st.sampled_from(["fifo", "severity_priority"]))
    mix = None
    if disc == "severity_priority":
        a = draw(st.integers(0, 10))
        b = draw(st.integers(0, 10 - a))
        mix = {"high": Fraction(a, 10), "moderate": Fraction(b, 10), "low": Fraction(10 - a - b, 10)}
    return PipelineConfig(
        horizon_weeks=draw(st.integers(1, 6)),
        arrivals=Arrivals(
            process or draw(st.sampled_from(["deterministic", "poisson"])),
            draw(st.integers(0, 40).map(Fraction)),
        ),
        seed=draw(st.integers(0, 2**32)),
        stages=stages,
        pi_s=draw(fractions01),
        pi_e=draw(fractions01),
        queue_discipline=disc,
        severity_mix=mix,
    )

