"""Campaign disclosure records and their conformance checks.

A :class:`CampaignReport` is a permissive record: it holds whatever a
disclosure states, including inconsistent counts, so that the linter can
say what is wrong with it. :func:`validate_campaign_report` turns problems
into findings. Missing reporting fields are warnings; violated count
invariants are fatal because they make derived metrics meaningless.

Review packages are checked against per-ownership-model required artifact
sets, which a policy mapping can override.
"""

from __future__ import annotations

from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field, fields
from fractions import Fraction
from typing import Any, Literal

from .core import SEVERITIES, HourlyRate, Interval, Money

SCHEMA_VERSION = "1"
Severity = Literal["fatal", "warning"]
_SEVERITY_ORDER = {"fatal": 0, "warning": 1}


@dataclass(frozen=True)
class SeveritySplit:
    high: int | None = None
    moderate: int | None = None
    low: int | None = None
    exhaustive: bool = False

    def counts(self) -> dict[str, int | None]:
        return {name: getattr(self, name) for name in SEVERITIES}

    @property
    def complete(self) -> bool:
        return all(v is not None for v in self.counts().values())


@dataclass(frozen=True)
class ImpactStatus:
    exploitable: int | None = None
    not_exploitable: int | None = None
    unassessed: int | None = None


@dataclass(frozen=True)
class GroundingEvidence:
    reproducer: bool = False
    trace: bool = False
    path_constraints: bool = False
    attacker_control: bool = False
    affected_configs: bool = False


@dataclass(frozen=True)
class PatchStatus:
    patched: int | None = None
    tested: int | None = None
    pending: int | None = None


@dataclass(frozen=True)
class CampaignReport:
    """One campaign disclosure, one attribute per minimum reporting field.

    ``accepted_findings`` may be an :class:`Interval` when a source gives a
    range ("several dozen"). ``total_expenditure`` may be an interval too;
    ``expenditure_reported_as`` records how a bound was stated
    (``"upper_bound"`` for "under $20,000"). ``hourly_rates``,
    ``declared_precision`` and ``context`` are extensions outside the
    minimum field set.
    """

    campaign_id: str
    schema_version: str = SCHEMA_VERSION
    raw_candidates: int | None = None
    deduplicated_candidates: int | None = None
    submitted_reports: int | None = None
    accepted_findings: int | Interval | None = None
    severity: SeveritySplit | None = None
    impact_status: ImpactStatus | None = None
    grounding_evidence: GroundingEvidence | None = None
    validation_hours: Fraction | None = None
    impact_hours: Fraction | None = None
    maintainer_review_hours: Fraction | None = None
    patch_status: PatchStatus | None = None
    time_to_first_useful_finding: Fraction | None = None
    run_count: int | None = None
    failed_run_cost: Money | None = None
    scaffold_effort_hours: Fraction | None = None
    total_expenditure: Money | Interval | None = None
    expenditure_reported_as: str | None = None
    hourly_rates: Mapping[str, HourlyRate] = field(default_factory=dict)
    declared_precision: Fraction | None = None
    context: Mapping[str, Any] = field(default_factory=dict)
    extra_fields: Mapping[str, Any] = field(default_factory=dict)

    @property
    def exploitable(self) -> int | None:
        return self.impact_status.exploitable if self.impact_status else None

    @property
    def high_severity(self) -> int | None:
        return self.severity.high if self.severity else None


# Minimum reporting fields and the table row each one answers to.
REPORTING_FIELDS: dict[str, str] = {
    "raw_candidates": "Raw candidate count",
    "deduplicated_candidates": "Deduplicated candidate count",
    "submitted_reports": "Submitted report count",
    "accepted_findings": "Accepted finding count",
    "severity": "Severity distribution",
    "impact_status": "Impact/exploitability status",
    "grounding_evidence": "Grounding evidence",
    "validation_hours": "Validation hours",
    "impact_hours": "Impact-assessment hours",
    "maintainer_review_hours": "Maintainer review hours",
    "patch_status": "Patch and test status",
    "time_to_first_useful_finding": "Time-to-first-useful-finding",
    "run_count": "Run count and failed-run cost",
    "failed_run_cost": "Run count and failed-run cost",
    "scaffold_effort_hours": "Scaffold engineering effort",
    "total_expenditure": "Compute/API/tooling cost",
}
PRECISION_ROW = "Precision / reviewer burden"
FUNNEL_FIELDS = ("raw_candidates", "deduplicated_candidates", "submitted_reports", "accepted_findings")
_HOURS_FIELDS = (
    "validation_hours",
    "impact_hours",
    "maintainer_review_hours",
    "time_to_first_useful_finding",
    "scaffold_effort_hours",
)


@dataclass(frozen=True)
class LintFinding:
    severity: Severity
    field: str
    message: str
    field_label: str | None = None

    def sort_key(self):
        return (_SEVERITY_ORDER[self.severity], self.field, self.message)


class ReportValidationError(ValueError):
    """A report has fatal findings; metrics cannot be derived from it."""

    def __init__(self, findings: Sequence[LintFinding]):
        self.findings = tuple(findings)
        fatal = [f for f in self.findings if f.severity == "fatal"]
        super().__init__("; ".join(f"{f.field}: {f.message}" for f in fatal) or "invalid report")


def _bounds(value) -> tuple[Fraction, Fraction]:
    if isinstance(value, Interval):
        return value.lo, value.hi
    return Fraction(value), Fraction(value)


def _fmt(value) -> str:
    if isinstance(value, Interval):
        return f"[{value.lo}, {value.hi}]"
    return str(value)


def validate_campaign_report(report: CampaignReport) -> list[LintFinding]:
    """Check ``report`` against the minimum reporting fields and count invariants.

    Returns findings sorted by (severity, field); an empty list means the
    report is fully conformant.
    """
    out: list[LintFinding] = []

    def fatal(name, message, row=None):
        out.append(LintFinding("fatal", name, message, row or REPORTING_FIELDS.get(name)))

    def warn(name, message, row=None):
        out.append(LintFinding("warning", name, message, row or REPORTING_FIELDS.get(name)))

    for name, row in REPORTING_FIELDS.items():
        if getattr(report, name) is None:
            warn(name, f"missing reporting field {name!r}", row)

    counts = {
        "raw_candidates": report.raw_candidates,
        "deduplicated_candidates": report.deduplicated_candidates,
        "submitted_reports": report.submitted_reports,
        "run_count": report.run_count,
    }
    for group, obj in (("severity", report.severity), ("impact_status", report.impact_status),
                       ("patch_status", report.patch_status)):
        if obj is not None:
            for f in fields(obj):
                v = getattr(obj, f.name)
                if f.name != "exhaustive" and v is not None:
                    counts[f"{group}.{f.name}"] = v
    for name, v in counts.items():
        if v is not None and v < 0:
            fatal(name, f"count must be non-negative, got {v}", REPORTING_FIELDS.get(name.split(".")[0]))
    if report.accepted_findings is not None and _bounds(report.accepted_findings)[0] < 0:
        fatal("accepted_findings", "count must be non-negative")
    for name in _HOURS_FIELDS:
        v = getattr(report, name)
        if v is not None and v < 0:
            fatal(name, f"hours must be non-negative, got {v}")

    # funnel ordering over the stages that are present
    present = [(n, getattr(report, n)) for n in FUNNEL_FIELDS if getattr(report, n) is not None]
    for (upper_name, upper), (lower_name, lower) in zip(present, present[1:]):
        if _bounds(lower)[0] > _bounds(upper)[1]:
            fatal(
                lower_name,
                f"funnel inversion: {lower_name} ({_fmt(lower)}) exceeds {upper_name} ({_fmt(upper)})",
            )

    accepted = report.accepted_findings
    sev = report.severity
    if sev is not None and sev.complete and accepted is not None:
        total = sum(sev.counts().values())
        lo, hi = _bounds(accepted)
        if total > hi:
            fatal("severity", f"severity split {total} exceeds accepted findings {_fmt(accepted)}")
        elif sev.exhaustive and not lo <= total <= hi:
            fatal("severity", f"exhaustive severity split sums to {total}, accepted findings are {_fmt(accepted)}")
    if sev is not None and sev.exhaustive and not sev.complete:
        warn("severity", "split declared exhaustive but not every severity is given")

    exploitable = report.exploitable
    if exploitable is not None and accepted is not None and exploitable > _bounds(accepted)[1]:
        fatal("impact_status", f"exploitable count {exploitable} exceeds accepted findings {_fmt(accepted)}")

    if report.declared_precision is not None:
        sub = report.submitted_reports
        if isinstance(accepted, int) and sub:
            actual = Fraction(accepted, sub)
            if actual != report.declared_precision:
                warn(
                    "declared_precision",
                    f"declared precision {report.declared_precision} disagrees with counts ({accepted}/{sub})",
                    PRECISION_ROW,
                )

    for name in report.hourly_rates:
        if name not in ("generation", "validation", "impact", "remediation", "triage"):
            warn("hourly_rates", f"rate for unknown stage {name!r}")

    for name in sorted(report.extra_fields):
        warn(name, f"unknown field {name!r} ignored")

    return sorted(out, key=LintFinding.sort_key)


def has_fatal(findings: Sequence[LintFinding]) -> bool:
    return any(f.severity == "fatal" for f in findings)


# -- review packages -------------------------------------------------------

OWNERSHIP_MODELS = ("human_owned", "human_driven_llm", "llm_owned")

ARTIFACT_LABELS: dict[str, str] = {
    "patch": "patch",
    "candidate_report": "candidate report",
    "affected_paths": "affected code paths",
    "exploitability_argument": "exploitability argument",
    "changed_invariant": "changed invariant",
    "regression_test": "tests",
    "compatibility_notes": "compatibility notes",
    "documentation": "documentation updates",
    "human_intent": "human intent",
    "prompt_spec": "prompt or task specification",
    "review_decision": "review decision",
    "audit_trail": "audit trail",
    "objective_spec": "objective specification",
    "evidence_used": "evidence used",
    "alternatives_rejected": "alternatives rejected",
    "acceptability_explanation": "explanation of behavioral acceptability",
}

_HUMAN_OWNED = (
    "patch",
    "changed_invariant",
    "regression_test",
    "compatibility_notes",
    "documentation",
    "candidate_report",
)
DEFAULT_POLICY: dict[str, tuple[str, ...]] = {
    "human_owned": _HUMAN_OWNED,
    "human_driven_llm": _HUMAN_OWNED + ("human_intent", "prompt_spec", "review_decision"),
    "llm_owned": (
        "audit_trail",
        "objective_spec",
        "evidence_used",
        "alternatives_rejected",
        "regression_test",
        "acceptability_explanation",
    ),
}


@dataclass(frozen=True)
class ReviewPackage:
    ownership_model: str
    flags: Mapping[str, bool] = field(default_factory=dict)
    evidence: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self):
        unknown = set(self.flags) - set(ARTIFACT_LABELS)
        if unknown:
            raise ValueError(f"unknown artifact flags: {sorted(unknown)}")

    def has(self, flag: str) -> bool:
        return bool(self.flags.get(flag, False))


@dataclass(frozen=True)
class ChecklistItem:
    flag: str
    label: str
    present: bool
    evidence: str | None = None


@dataclass(frozen=True)
class ReviewResult:
    ownership_model: str
    items: tuple[ChecklistItem, ...]

    @property
    def passed(self) -> bool:
        return all(item.present for item in self.items)

    @property
    def failing(self) -> list[str]:
        return [item.label for item in self.items if not item.present]


def validate_policy(policy: Mapping[str, Sequence[str]]) -> dict[str, tuple[str, ...]]:
    merged = dict(DEFAULT_POLICY)
    for model, required in policy.items():
        if model not in OWNERSHIP_MODELS:
            raise ValueError(f"policy names unknown ownership model {model!r}")
        unknown = set(required) - set(ARTIFACT_LABELS)
        if unknown:
            raise ValueError(f"policy for {model} names unknown artifacts {sorted(unknown)}")
        merged[model] = tuple(required)
    return merged


def check_review_package(
    pkg: ReviewPackage, policy: Mapping[str, Sequence[str]] | None = None
) -> ReviewResult:
    """Evaluate ``pkg`` against the required artifacts for its ownership model."""
    rules = validate_policy(policy) if policy else DEFAULT_POLICY
    if pkg.ownership_model not in rules:
        raise ValueError(f"unknown ownership model {pkg.ownership_model!r}")
    items = tuple(
        ChecklistItem(flag, ARTIFACT_LABELS[flag], pkg.has(flag), pkg.evidence.get(flag))
        for flag in rules[pkg.ownership_model]
    )
    return ReviewResult(pkg.ownership_model, items)



@dataclass(frozen=True)
class LintReport:
    """Findings for one document, as rendered by the ``lint`` command."""

    campaign_id: str
    findings: tuple[LintFinding, ...]

    @property
    def fatal(self) -> bool:
        return has_fatal(self.findings)


def lint_report(report: CampaignReport) -> LintReport:
    return LintReport(report.campaign_id, tuple(validate_campaign_report(report)))
