"""Text output for every command result: ``table``, ``json`` or ``csv``.

``table`` is for people and applies display rounding (whole dollars,
percentages and ratios to one decimal, Monte Carlo statistics to six
significant digits). ``json`` is lossless: rationals become
``{"numerator", "denominator"}``, money becomes a decimal string, and
floats appear only where the value is a float (simulation and sampling
statistics). ``csv`` is one row per entity with a fixed column order and
exact values. Missing quantities are ``n/a`` in tables and empty in CSV.
"""

from __future__ import annotations

import csv
import dataclasses
import io
import json
from collections.abc import Mapping, Sequence
from dataclasses import dataclass
from decimal import Decimal
from fractions import Fraction
from functools import singledispatch
from typing import Any

from .anchors import AnchorTable
from .core import (
    Interval,
    Money,
    exact_to_decimal_str,
    format_percent,
    format_ratio,
    format_usd,
    format_usd_range,
    is_terminating,
)
from .cost import CostReport, UnitCostResult, total_cost
from .lint import CampaignReport, LintReport, ReviewResult
from .metrics import Comparison, IntervalUnitCost, MetricsSummary
from .sensitivity import McSummary, SensitivityResult
from .serialize import campaign_to_dict, dumps
from .sim import SimulationReport

FORMATS = ("table", "json", "csv")
NA = "n/a"
UNIT_COST_KINDS = ("validated_finding", "impact_backed", "accepted")


@dataclass
class Section:
    headers: tuple[str, ...]
    rows: list[tuple[str, ...]]
    title: str | None = None


@dataclass
class View:
    table: list[Section]
    csv_headers: tuple[str, ...]
    csv_rows: list[tuple[Any, ...]]


def render(obj: Any, fmt: str = "table") -> str:
    """Render a result object; the text always ends with a newline."""
    if fmt not in FORMATS:
        raise ValueError(f"unknown format {fmt!r}; expected one of {FORMATS}")
    if fmt == "json":
        return dumps(to_json(obj))
    view = _view(obj)
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(view.csv_headers)
        w.writerows([tuple("" if v is None else v for v in row) for row in view.csv_rows])
        return buf.getvalue()
    return "\n".join(_format_section(s) for s in view.table)


def _format_section(section: Section) -> str:
    cells = [section.headers] + section.rows
    widths = [max(len(str(r[i])) for r in cells) for i in range(len(section.headers))]
    lines = []
    if section.title:
        lines.append(section.title)
    lines.append("  ".join(h.ljust(w) for h, w in zip(section.headers, widths)).rstrip())
    lines.append("  ".join("-" * w for w in widths))
    for r in section.rows:
        lines.append("  ".join(str(c).ljust(w) for c, w in zip(r, widths)).rstrip())
    return "\n".join(lines) + "\n"


# -- exact value text ------------------------------------------------------


def exact_text(value: Any) -> str | None:
    """Lossless single-cell text for CSV."""
    if value is None:
        return None
    if isinstance(value, Money):
        return value.to_decimal_str()
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, Fraction):
        if value.denominator == 1:
            return str(value.numerator)
        if is_terminating(value):
            return exact_to_decimal_str(value)
        return f"{value.numerator}/{value.denominator}"
    if isinstance(value, Interval):
        return f"{exact_text(value.lo)}..{exact_text(value.hi)}"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _or_na(value: Any, fmt) -> str:
    return NA if value is None else fmt(value)


def _usd(value: Money | Fraction | Interval | None) -> str:
    if value is None:
        return NA
    if isinstance(value, Interval):
        return format_usd_range(value)
    return format_usd(value)


def _count(v: Fraction) -> str:
    return str(v.numerator) if v.denominator == 1 else format_ratio(v, 2)


def _sig(x: float | None) -> str:
    return NA if x is None else f"{x:.6g}"


# -- json ------------------------------------------------------------------


@singledispatch
def to_json(obj: Any) -> Any:
    if isinstance(obj, Money):
        return obj.to_decimal_str()
    if isinstance(obj, Fraction):
        if obj.denominator == 1:
            return obj.numerator
        return {"numerator": obj.numerator, "denominator": obj.denominator}
    if isinstance(obj, Interval):
        return {"lo": to_json(obj.lo), "hi": to_json(obj.hi), "unit": obj.unit}
    if isinstance(obj, Decimal):
        return obj
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: to_json(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, Mapping):
        return {str(k): to_json(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_json(v) for v in obj]
    return obj


@to_json.register
def _(obj: CampaignReport) -> Any:
    return campaign_to_dict(obj)


@to_json.register
def _(obj: UnitCostResult) -> Any:
    return {
        "outcome_kind": obj.outcome_kind,
        "included": list(obj.included),
        "numerator": to_json(obj.numerator),
        "denominator_count": to_json(obj.denominator_count),
        "unit_cost": to_json(obj.exact_unit_cost),
        "unit_cost_rounded": to_json(obj.unit_cost),
    }


@to_json.register
def _(obj: ReviewResult) -> Any:
    return {
        "ownership_model": obj.ownership_model,
        "passed": obj.passed,
        "items": to_json(list(obj.items)),
        "failing": obj.failing,
    }


@to_json.register
def _(obj: LintReport) -> Any:
    return {"campaign_id": obj.campaign_id, "fatal": obj.fatal, "findings": to_json(list(obj.findings))}


@to_json.register
def _(obj: Comparison) -> Any:
    return {"rows": [{"campaign_id": r.campaign_id, "summary": to_json(r.summary)} for r in obj.rows]}


@to_json.register
def _(obj: AnchorTable) -> Any:
    return {"rows": to_json(list(obj.rows))}


# -- table and csv views ---------------------------------------------------


@singledispatch
def _view(obj: Any) -> View:
    raise TypeError(f"cannot render {type(obj).__name__}")


@_view.register
def _(obj: list) -> View:
    if obj and isinstance(obj[0], (UnitCostResult, IntervalUnitCost)):
        views = [_view(v) for v in obj]
        return View(
            [s for v in views for s in v.table],
            views[0].csv_headers,
            [r for v in views for r in v.csv_rows],
        )
    raise TypeError("cannot render a list of this kind")


def _unit_cost_cells(u: UnitCostResult | IntervalUnitCost | None) -> tuple[str, Any]:
    if u is None:
        return NA, None
    if isinstance(u, IntervalUnitCost):
        return format_usd_range(u.unit_cost), u.unit_cost
    return format_usd(u.exact_unit_cost), u.exact_unit_cost


_UC_HEADERS = ("outcome_kind", "included", "numerator", "denominator_count", "unit_cost")


@_view.register
def _(obj: UnitCostResult) -> View:
    rows = [
        ("outcome", obj.outcome_kind),
        ("cost terms", ", ".join(obj.included) or NA),
        ("numerator", format_usd(obj.numerator)),
        ("denominator", _count(obj.denominator_count)),
        ("unit cost", format_usd(obj.exact_unit_cost)),
    ]
    csv_row = (obj.outcome_kind, ";".join(obj.included), exact_text(obj.numerator),
                exact_text(obj.denominator_count), exact_text(obj.exact_unit_cost))
    return View([Section(("field", "value"), rows)], _UC_HEADERS, [csv_row])


@_view.register
def _(obj: IntervalUnitCost) -> View:
    rows = [
        ("outcome", obj.outcome_kind),
        ("cost terms", ", ".join(obj.included) or NA),
        ("numerator", format_usd_range(obj.numerator)),
        ("denominator", f"{_count(obj.denominator_count.lo)}-{_count(obj.denominator_count.hi)}"),
        ("unit cost", format_usd_range(obj.unit_cost)),
    ]
    csv_row = (obj.outcome_kind, ";".join(obj.included), exact_text(obj.numerator),
               exact_text(obj.denominator_count), exact_text(obj.unit_cost))
    return View([Section(("field", "value"), rows)], _UC_HEADERS, [csv_row])


METRIC_COLUMNS = (
    "campaign_id",
    "precision",
    "high_severity_fraction",
    "reports_per_accepted",
    "reports_per_high",
    "cost_per_validated_finding",
    "cost_per_impact_backed",
    "cost_per_accepted",
    "fixes_per_maintainer_hour",
)


def _metric_cells(s: MetricsSummary) -> tuple[tuple[str, ...], tuple[Any, ...]]:
    display = [
        s.campaign_id or NA,
        _or_na(s.precision, format_percent),
        _or_na(s.high_severity_fraction, format_percent),
        _or_na(s.reports_per_accepted, format_ratio),
        _or_na(s.reports_per_high, format_ratio),
    ]
    exact = [s.campaign_id, *(exact_text(v) for v in (
        s.precision, s.high_severity_fraction, s.reports_per_accepted, s.reports_per_high))]
    for kind in UNIT_COST_KINDS:
        d, e = _unit_cost_cells(s.unit_costs.get(kind))
        display.append(d)
        exact.append(exact_text(e))
    display.append(_or_na(s.fixes_per_maintainer_hour, lambda v: format_ratio(v, 3)))
    exact.append(exact_text(s.fixes_per_maintainer_hour))
    return tuple(display), tuple(exact)


@_view.register
def _(obj: MetricsSummary) -> View:
    display, exact = _metric_cells(obj)
    labels = (
        "campaign",
        "accepted fraction",
        "high-severity fraction",
        "reports per accepted",
        "reports per high-severity",
        "cost per validated finding",
        "cost per impact-backed finding",
        "cost per accepted finding",
        "accepted fixes per maintainer-hour",
    )
    sections = [Section(("metric", "value"), list(zip(labels, display)))]
    if obj.context:
        sections.append(Section(("context", "value"), [(k, str(v)) for k, v in obj.context.items()]))
    return View(sections, METRIC_COLUMNS, [exact])


@_view.register
def _(obj: Comparison) -> View:
    cells = [_metric_cells(r.summary) for r in obj.rows]
    headers = ("campaign", "accepted %", "high %", "rep/acc", "rep/high",
               "$/finding", "$/impact", "$/accepted", "fixes/h")
    return View(
        [Section(headers, [d for d, _ in cells])],
        METRIC_COLUMNS,
        [e for _, e in cells],
    )


@_view.register
def _(obj: CostReport) -> View:
    bd = obj.breakdown
    comps = list(bd.components().items())
    rows = [(name, format_usd(m)) for name, m in comps] + [("total", format_usd(obj.total))]
    csv_rows = [("stage_cost", name, exact_text(m)) for name, m in comps]
    csv_rows.append(("total", "total", exact_text(obj.total)))
    units = []
    for kind in UNIT_COST_KINDS:
        u = obj.unit_costs.get(kind)
        if u is not None:
            units.append((kind, format_usd(u.exact_unit_cost), ", ".join(u.included)))
            csv_rows.append(("unit_cost", kind, exact_text(u.exact_unit_cost)))
    return View(
        [Section(("component", "cost"), rows), Section(("unit cost", "value", "cost terms"), units)],
        ("kind", "name", "value"),
        csv_rows,
    )


@_view.register
def _(obj: CampaignReport) -> View:
    doc = campaign_to_dict(obj)
    flat = _flatten(doc)
    return View(
        [Section(("field", "value"), [(k, str(v)) for k, v in flat])],
        tuple(k for k, _ in flat),
        [tuple(v for _, v in flat)],
    )


def _flatten(doc: Mapping, prefix: str = "") -> list[tuple[str, Any]]:
    out = []
    for k, v in doc.items():
        if isinstance(v, Mapping):
            out.extend(_flatten(v, f"{prefix}{k}."))
        else:
            out.append((prefix + k, json.dumps(v) if isinstance(v, list) else v))
    return out


@_view.register
def _(obj: LintReport) -> View:
    rows = [(f.severity, f.field, f.field_label or NA, f.message) for f in obj.findings]
    sections = [Section(("severity", "field", "reporting row", "message"), rows, f"campaign {obj.campaign_id}")]
    if not rows:
        sections = [Section(("status",), [("no findings",)], f"campaign {obj.campaign_id}")]
    return View(
        sections,
        ("campaign_id", "severity", "field", "reporting_row", "message"),
        [(obj.campaign_id, f.severity, f.field, f.field_label, f.message) for f in obj.findings],
    )


@_view.register
def _(obj: ReviewResult) -> View:
    rows = [(i.flag, i.label, "yes" if i.present else "MISSING", i.evidence or "") for i in obj.items]
    status = "PASS" if obj.passed else "FAIL: missing " + ", ".join(obj.failing)
    return View(
        [
            Section(("artifact", "label", "present", "evidence"), rows, f"ownership model {obj.ownership_model}"),
            Section(("result",), [(status,)]),
        ],
        ("ownership_model", "artifact", "label", "present", "evidence"),
        [(obj.ownership_model, i.flag, i.label, exact_text(i.present), i.evidence) for i in obj.items],
    )


_MC_FIELDS = ("mean", "std_dev", "p05", "p50", "p95", "min", "max")


@_view.register
def _(obj: McSummary) -> View:
    rows = [("target", obj.target), ("samples", f"{obj.sample_count:,}"), ("seed", str(obj.seed))]
    rows += [(name, _sig(getattr(obj, name))) for name in _MC_FIELDS]
    headers = ("target", "sample_count", "seed") + _MC_FIELDS
    csv_row = (obj.target, obj.sample_count, obj.seed) + tuple(repr(getattr(obj, n)) for n in _MC_FIELDS)
    return View([Section(("statistic", "value"), rows)], headers, [csv_row])


@_view.register
def _(obj: SensitivityResult) -> View:
    inner = _view(obj.summary)
    lifted = ("lifted range", _usd(obj.lifted))
    outside = ("samples outside range", str(obj.samples_outside))
    rows = inner.table[0].rows
    table = [Section(("statistic", "value"), [rows[0], lifted] + rows[1:] + [outside])]
    headers = inner.csv_headers[:1] + ("lifted_lo", "lifted_hi") + inner.csv_headers[1:] + ("samples_outside",)
    r = inner.csv_rows[0]
    csv_row = r[:1] + (exact_text(obj.lifted.lo), exact_text(obj.lifted.hi)) + r[1:] + (obj.samples_outside,)
    return View(table, headers, [csv_row])


_STAGE_COLUMNS = ("stage", "items_in", "items_out", "dropped_by_thinning", "end_backlog",
                  "busy_hours", "utilization", "backlog_growth_per_week", "cost")


@_view.register
def _(obj: SimulationReport) -> View:
    res, bn = obj.result, obj.bottleneck
    growth = {r.stage: r.backlog_growth_per_week for r in bn.ranking}
    costs = res.total_cost.components()
    disp, exact = [], []
    for s in res.stages:
        g = growth.get(s.stage)
        disp.append((
            s.stage, str(s.items_in), str(s.items_out), str(s.items_dropped_by_thinning), str(s.end_backlog),
            _sig(s.busy_hours), _or_na(s.utilization, lambda u: f"{u:.1%}"),
            _or_na(g, format_ratio), format_usd(costs[s.stage]),
        ))
        exact.append((
            s.stage, s.items_in, s.items_out, s.items_dropped_by_thinning, s.end_backlog,
            repr(s.busy_hours), None if s.utilization is None else repr(s.utilization),
            exact_text(g), exact_text(costs[s.stage]),
        ))
    summary = [
        ("seed", str(res.seed)),
        ("horizon (weeks)", str(res.horizon_weeks)),
        ("accepted fixes shipped", str(res.accepted_fixes_shipped)),
        ("accepted fixes per maintainer-hour",
         _or_na(res.accepted_fixes_per_maintainer_hour, lambda v: format_ratio(v, 3))),
        ("total cost", format_usd(total_cost(res.total_cost))),
        ("bottleneck", bn.bottleneck or "none"),
    ]
    if bn.bottleneck is not None:
        summary.append((f"gain from +{bn.added_capacity_hours} h/week at {bn.bottleneck}",
                        f"{bn.marginal_stage_throughput_gain:+d} stage output, {bn.marginal_shipped_gain:+d} shipped"))
    return View(
        [Section(_STAGE_COLUMNS, disp), Section(("run", "value"), summary)],
        _STAGE_COLUMNS,
        exact,
    )


@_view.register
def _(obj: AnchorTable) -> View:
    rows = [(r.quantity, r.display, "derived" if r.derived else "reported", r.source) for r in obj.rows]
    csv_rows = []
    for r in obj.rows:
        v = r.value
        csv_rows.append((r.quantity, r.display, json.dumps(v) if isinstance(v, dict) else exact_text(v),
                         "derived" if r.derived else "reported", r.source))
    return View(
        [Section(("quantity", "value", "kind", "source"), rows)],
        ("quantity", "display", "exact_value", "kind", "source"),
        csv_rows,
    )


def render_findings(findings: Sequence) -> str:
    """Plain one-line-per-finding text, used for error output."""
    return "".join(f"{f.severity}: {f.field}: {f.message}\n" for f in findings)
