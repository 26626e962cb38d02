"""JSON document formats and the built-in fixtures.

Campaign documents use ``schema_version`` "1": snake_case keys matching
:class:`~bugonomics.lint.CampaignReport`, money as decimal strings, ranges
as ``{"lo": x, "hi": y}``. Numbers are read as exact decimals; binary
floats never appear in a parsed value.
"""

from __future__ import annotations

import json
import re
from collections.abc import Mapping
from dataclasses import fields
from decimal import Decimal
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Any

from .core import (
    SEVERITIES,
    STAGES,
    GenerationProfile,
    HourlyRate,
    Interval,
    Money,
    PRICING,
    StageEffort,
    TokenPricing,
    exact_to_decimal_str,
    is_terminating,
    money_from_usd,
    to_exact,
)
from .cost import CostModel
from .lint import (
    ARTIFACT_LABELS,
    SCHEMA_VERSION,
    CampaignReport,
    GroundingEvidence,
    ImpactStatus,
    PatchStatus,
    ReviewPackage,
    SeveritySplit,
    validate_policy,
)
from .sensitivity import FORMULAS, UncertainParam
from .sim import Arrivals, PipelineConfig, ServiceTime, StageConfig

SUPPORTED_VERSIONS = (SCHEMA_VERSION,)
FIXTURES = ("mythos_preview", "firefox_opus46", "firefox_150", "exploit_experiment")
FIXTURE_PREFIX = "fixture:"


class DocumentError(ValueError):
    """A document could not be parsed; carries a location when one is known."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None, path: str | None = None):
        self.line = line
        self.column = column
        self.path = path
        where = []
        if path:
            where.append(path)
        if line is not None:
            where.append(f"line {line}, column {column}")
        super().__init__(f"{message} ({'; '.join(where)})" if where else message)


class UnsupportedVersionError(DocumentError):
    pass


# -- low-level readers -----------------------------------------------------


class _Reader:
    """Typed field access over a parsed JSON object, with positioned errors."""

    def __init__(self, text: str):
        self.text = text

    def locate(self, key: str | None) -> tuple[int | None, int | None]:
        if key is None:
            return None, None
        m = re.search(r'"' + re.escape(key) + r'"\s*:', self.text)
        if not m:
            return None, None
        line = self.text.count("\n", 0, m.start()) + 1
        col = m.start() - (self.text.rfind("\n", 0, m.start()) + 1) + 1
        return line, col

    def error(self, message: str, path: str, key: str | None = None) -> DocumentError:
        line, col = self.locate(key)
        return DocumentError(message, line, col, path)

    def count(self, value, path: str, key: str) -> int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise self.error(f"expected an integer count, got {value!r}", path, key)
        return value

    def exact(self, value, path: str, key: str) -> Fraction:
        if isinstance(value, Mapping) and set(value) == {"numerator", "denominator"}:
            value = f"{value['numerator']}/{value['denominator']}"
        try:
            return to_exact(value)
        except (TypeError, ValueError) as exc:
            raise self.error(f"expected a number: {exc}", path, key) from None

    def money(self, value, path: str, key: str) -> Money:
        try:
            return money_from_usd(value if not isinstance(value, Decimal) else value)
        except (TypeError, ValueError) as exc:
            raise self.error(str(exc), path, key) from None

    def interval(self, value, path: str, key: str, unit: str) -> Interval:
        try:
            return Interval(self.exact(value["lo"], path, key), self.exact(value["hi"], path, key), unit)
        except KeyError as exc:
            raise self.error(f"interval is missing {exc.args[0]!r}", path, key) from None
        except ValueError as exc:
            if isinstance(exc, DocumentError):
                raise
            raise self.error(str(exc), path, key) from None

    def obj(self, value, path: str, key: str) -> Mapping:
        if not isinstance(value, Mapping):
            raise self.error(f"expected an object, got {type(value).__name__}", path, key)
        return value


def _no_constant(name: str):
    raise ValueError(f"{name} is not a valid number")


def parse_json(text: str, source: str = "<string>") -> Any:
    if not text.strip():
        raise DocumentError("empty document", 1, 1, source)
    try:
        return json.loads(text, parse_float=Decimal, parse_constant=_no_constant)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"malformed JSON: {exc.msg}", exc.lineno, exc.colno, source) from None
    except ValueError as exc:
        raise DocumentError(f"malformed JSON: {exc}", path=source) from None


def read_text(path: str | Path) -> tuple[str, str]:
    """Return ``(text, source name)``; ``fixture:<name>`` reads a built-in fixture."""
    path = str(path)
    if path.startswith(FIXTURE_PREFIX):
        name = path[len(FIXTURE_PREFIX):]
        return fixture_text(name), path
    try:
        return Path(path).read_text(encoding="utf-8"), path
    except OSError as exc:
        raise OSError(f"cannot read {path}: {exc.strerror or exc}") from exc


# -- exact value encoding --------------------------------------------------


def encode_exact(value: Fraction) -> Any:
    """Integers stay integers, terminating rationals become decimal strings, others ``"n/d"``."""
    value = Fraction(value)
    if value.denominator == 1:
        return value.numerator
    if is_terminating(value):
        return exact_to_decimal_str(value)
    return f"{value.numerator}/{value.denominator}"


def encode_ratio(value: Fraction) -> dict[str, int]:
    value = Fraction(value)
    return {"numerator": value.numerator, "denominator": value.denominator}


def encode_interval(iv: Interval) -> dict[str, Any]:
    return {"lo": encode_exact(iv.lo), "hi": encode_exact(iv.hi)}


def encode_money(m: Money) -> str:
    return m.to_decimal_str()


# -- campaign documents ----------------------------------------------------

_COUNT_FIELDS = ("raw_candidates", "deduplicated_candidates", "submitted_reports", "run_count")
_HOUR_FIELDS = (
    "validation_hours",
    "impact_hours",
    "maintainer_review_hours",
    "time_to_first_useful_finding",
    "scaffold_effort_hours",
)
_GROUPS = {
    "severity": (SeveritySplit, SEVERITIES),
    "impact_status": (ImpactStatus, ("exploitable", "not_exploitable", "unassessed")),
    "patch_status": (PatchStatus, ("patched", "tested", "pending")),
}
_KNOWN_KEYS = {f.name for f in fields(CampaignReport)} - {"extra_fields", "expenditure_reported_as"}


def campaign_from_dict(doc: Any, text: str = "", source: str = "<document>") -> CampaignReport:
    r = _Reader(text)
    doc = r.obj(doc, source, None)
    version = doc.get("schema_version")
    if version is None:
        raise r.error("missing schema_version", source, None)
    if str(version) not in SUPPORTED_VERSIONS:
        line, col = r.locate("schema_version")
        raise UnsupportedVersionError(
            f"unsupported schema_version {version!r}; supported: {list(SUPPORTED_VERSIONS)}", line, col, source
        )
    cid = doc.get("campaign_id")
    if not isinstance(cid, str) or not cid:
        raise r.error("campaign_id must be a non-empty string", source, "campaign_id")

    kw: dict[str, Any] = {"campaign_id": cid, "schema_version": str(version)}
    for name in _COUNT_FIELDS:
        if doc.get(name) is not None:
            kw[name] = r.count(doc[name], f"{source}:{name}", name)
    for name in _HOUR_FIELDS:
        if doc.get(name) is not None:
            kw[name] = r.exact(doc[name], f"{source}:{name}", name)

    acc = doc.get("accepted_findings")
    if acc is not None:
        kw["accepted_findings"] = (
            r.interval(acc, f"{source}:accepted_findings", "accepted_findings", "count")
            if isinstance(acc, Mapping)
            else r.count(acc, f"{source}:accepted_findings", "accepted_findings")
        )

    for name, (cls, keys) in _GROUPS.items():
        if doc.get(name) is None:
            continue
        group = r.obj(doc[name], f"{source}:{name}", name)
        allowed = set(keys) | ({"exhaustive"} if name == "severity" else set())
        unknown = set(group) - allowed
        if unknown:
            what = "severities" if name == "severity" else "keys"
            raise r.error(f"unknown {what} {sorted(unknown)}", f"{source}:{name}", name)
        values = {k: r.count(group[k], f"{source}:{name}.{k}", k) for k in keys if group.get(k) is not None}
        if name == "severity":
            ex = group.get("exhaustive", False)
            if not isinstance(ex, bool):
                raise r.error("exhaustive must be true or false", f"{source}:severity", "exhaustive")
            values["exhaustive"] = ex
        kw[name] = cls(**values)

    if doc.get("grounding_evidence") is not None:
        g = r.obj(doc["grounding_evidence"], f"{source}:grounding_evidence", "grounding_evidence")
        names = {f.name for f in fields(GroundingEvidence)}
        if set(g) - names:
            raise r.error(f"unknown evidence flags {sorted(set(g) - names)}", f"{source}:grounding_evidence", "grounding_evidence")
        if not all(isinstance(v, bool) for v in g.values()):
            raise r.error("evidence flags must be true or false", f"{source}:grounding_evidence", "grounding_evidence")
        kw["grounding_evidence"] = GroundingEvidence(**g)

    if doc.get("failed_run_cost") is not None:
        kw["failed_run_cost"] = r.money(doc["failed_run_cost"], f"{source}:failed_run_cost", "failed_run_cost")

    spend = doc.get("total_expenditure")
    if spend is not None:
        path = f"{source}:total_expenditure"
        if isinstance(spend, Mapping):
            note = spend.get("reported_as")
            if note is not None:
                kw["expenditure_reported_as"] = str(note)
            if "value" in spend:
                kw["total_expenditure"] = r.money(spend["value"], path, "total_expenditure")
            else:
                iv = r.interval(spend, path, "total_expenditure", "money")
                # money endpoints obey the same micro-USD rule as scalar amounts
                r.money(str(spend["lo"]), path, "total_expenditure")
                r.money(str(spend["hi"]), path, "total_expenditure")
                kw["total_expenditure"] = iv
        else:
            kw["total_expenditure"] = r.money(spend, path, "total_expenditure")

    if doc.get("hourly_rates") is not None:
        rates = r.obj(doc["hourly_rates"], f"{source}:hourly_rates", "hourly_rates")
        kw["hourly_rates"] = {
            k: HourlyRate(r.money(v, f"{source}:hourly_rates.{k}", k)) for k, v in rates.items()
        }
    if doc.get("declared_precision") is not None:
        kw["declared_precision"] = r.exact(doc["declared_precision"], f"{source}:declared_precision", "declared_precision")
    if doc.get("context") is not None:
        kw["context"] = dict(r.obj(doc["context"], f"{source}:context", "context"))

    extra = {k: v for k, v in doc.items() if k not in _KNOWN_KEYS}
    if extra:
        kw["extra_fields"] = extra
    return CampaignReport(**kw)


def campaign_to_dict(report: CampaignReport) -> dict[str, Any]:
    """Lossless JSON-ready form; :func:`campaign_from_dict` inverts it."""
    doc: dict[str, Any] = {"schema_version": report.schema_version, "campaign_id": report.campaign_id}
    for name in _COUNT_FIELDS[:3]:
        if getattr(report, name) is not None:
            doc[name] = getattr(report, name)
    acc = report.accepted_findings
    if acc is not None:
        doc["accepted_findings"] = encode_interval(acc) if isinstance(acc, Interval) else acc
    for name, (_, keys) in _GROUPS.items():
        group = getattr(report, name)
        if group is None:
            continue
        doc[name] = {k: getattr(group, k) for k in keys if getattr(group, k) is not None}
        if name == "severity" and group.exhaustive:
            doc[name]["exhaustive"] = True
    if report.grounding_evidence is not None:
        doc["grounding_evidence"] = {f.name: getattr(report.grounding_evidence, f.name)
                                     for f in fields(GroundingEvidence)}
    for name in _HOUR_FIELDS:
        v = getattr(report, name)
        if v is not None:
            doc[name] = _encode_decimalish(v)
    if report.run_count is not None:
        doc["run_count"] = report.run_count
    if report.failed_run_cost is not None:
        doc["failed_run_cost"] = encode_money(report.failed_run_cost)
    spend = report.total_expenditure
    if spend is not None:
        if isinstance(spend, Interval):
            doc["total_expenditure"] = {
                "lo": exact_to_decimal_str(spend.lo),
                "hi": exact_to_decimal_str(spend.hi),
            }
            if report.expenditure_reported_as:
                doc["total_expenditure"]["reported_as"] = report.expenditure_reported_as
        elif report.expenditure_reported_as:
            doc["total_expenditure"] = {"value": encode_money(spend), "reported_as": report.expenditure_reported_as}
        else:
            doc["total_expenditure"] = encode_money(spend)
    if report.hourly_rates:
        doc["hourly_rates"] = {k: encode_money(v.usd_per_hour) for k, v in report.hourly_rates.items()}
    if report.declared_precision is not None:
        doc["declared_precision"] = encode_ratio(report.declared_precision)
    if report.context:
        doc["context"] = dict(report.context)
    for k, v in report.extra_fields.items():
        doc[k] = v
    return doc


def _encode_decimalish(value: Fraction) -> str:
    value = Fraction(value)
    if is_terminating(value):
        return exact_to_decimal_str(value)
    return f"{value.numerator}/{value.denominator}"


def _strings(value):
    if isinstance(value, str):
        yield value
    elif isinstance(value, Mapping):
        for k, v in value.items():
            yield str(k)
            yield from _strings(v)
    elif isinstance(value, (list, tuple)):
        for v in value:
            yield from _strings(v)


def _mark_numbers(value, mark: str):
    if isinstance(value, Mapping):
        return {k: _mark_numbers(v, mark) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_mark_numbers(v, mark) for v in value]
    if isinstance(value, Decimal):
        return f"{mark}{value}{mark}"
    if isinstance(value, Fraction):
        return encode_ratio(value)
    return value


def dumps(doc: Any) -> str:
    """Indented JSON; Decimal numbers keep their digits, Fractions become ratio objects."""
    # Decimals travel through json.dumps as marked strings and are unquoted afterwards;
    # the mark is chosen so that no genuine string in the document contains it
    texts = list(_strings(doc))
    k = 0
    while any(f"\x00{k}\x00" in t for t in texts):
        k += 1
    mark = f"\x00{k}\x00"
    text = json.dumps(_mark_numbers(doc, mark), indent=2, ensure_ascii=False)
    escaped = re.escape(json.dumps(mark)[1:-1])
    return re.sub(f'"{escaped}([^"\\\\]+){escaped}"', r"\1", text) + "\n"


def loads_campaign(text: str, source: str = "<string>") -> CampaignReport:
    return campaign_from_dict(parse_json(text, source), text, source)


def load_campaign(path: str | Path) -> CampaignReport:
    """Read and schema-check a campaign document (``fixture:<name>`` for built-ins)."""
    text, source = read_text(path)
    return loads_campaign(text, source)


def dump_campaign(report: CampaignReport) -> str:
    return dumps(campaign_to_dict(report))


# -- fixtures --------------------------------------------------------------


def fixture_text(name: str) -> str:
    if name not in FIXTURES and not resources.files("bugonomics.fixtures").joinpath(f"{name}.json").is_file():
        raise OSError(f"no built-in fixture named {name!r}; available: {', '.join(FIXTURES)}")
    return resources.files("bugonomics.fixtures").joinpath(f"{name}.json").read_text(encoding="utf-8")


def load_fixture(name: str) -> CampaignReport:
    return loads_campaign(fixture_text(name), f"{FIXTURE_PREFIX}{name}")


def load_fixtures() -> dict[str, CampaignReport]:
    return {name: load_fixture(name) for name in FIXTURES}


# -- review packages and policies ------------------------------------------


def review_package_from_dict(doc: Any, text: str = "", source: str = "<document>") -> ReviewPackage:
    r = _Reader(text)
    doc = r.obj(doc, source, None)
    model = doc.get("ownership_model")
    if not isinstance(model, str):
        raise r.error("ownership_model is required", source, "ownership_model")
    arts = r.obj(doc.get("artifacts", {}), source, "artifacts")
    flags, evidence = {}, {}
    for name, v in arts.items():
        if name not in ARTIFACT_LABELS:
            raise r.error(f"unknown artifact {name!r}", f"{source}:artifacts", name)
        if isinstance(v, bool):
            flags[name] = v
        elif isinstance(v, Mapping) and isinstance(v.get("present"), bool):
            flags[name] = v["present"]
            if v.get("evidence") is not None:
                evidence[name] = str(v["evidence"])
        else:
            raise r.error("artifact must be a boolean or {present, evidence}", f"{source}:artifacts", name)
    return ReviewPackage(model, flags, evidence)


def load_review_package(path: str | Path) -> ReviewPackage:
    text, source = read_text(path)
    return review_package_from_dict(parse_json(text, source), text, source)


def load_policy(path: str | Path) -> dict[str, tuple[str, ...]]:
    text, source = read_text(path)
    doc = _Reader(text).obj(parse_json(text, source), source, None)
    try:
        return validate_policy({k: tuple(v) for k, v in doc.items()})
    except (TypeError, ValueError) as exc:
        raise DocumentError(f"bad policy: {exc}", path=source) from None


# -- simulator scenarios ---------------------------------------------------


def _service(r: _Reader, value, path: str, key: str) -> ServiceTime:
    if isinstance(value, Mapping):
        hours = r.interval(value, path, key, "hours")
        dist = value.get("distribution", "point" if hours.is_point else "uniform")
        mode = r.exact(value["mode"], path, key) if value.get("mode") is not None else None
        return ServiceTime(hours, dist, mode)
    return ServiceTime.fixed(r.exact(value, path, key))


def scenario_from_dict(doc: Any, text: str = "", source: str = "<scenario>") -> PipelineConfig:
    r = _Reader(text)
    doc = r.obj(doc, source, None)
    try:
        arr = r.obj(doc.get("arrivals", {}), source, "arrivals")
        arrivals = Arrivals(arr.get("process", "deterministic"), r.exact(arr.get("rate_per_week", 0), source, "rate_per_week"))
        stages = {}
        for name, s in r.obj(doc.get("stages", {}), source, "stages").items():
            if name not in STAGES:
                raise r.error(f"unknown stage {name!r}", f"{source}:stages", name)
            s = r.obj(s, f"{source}:stages.{name}", name)
            cap = s.get("weekly_capacity_hours")
            stages[name] = StageConfig(
                service=_service(r, s.get("service_hours", 0), f"{source}:stages.{name}", name),
                weekly_capacity_hours=None if cap is None else r.exact(cap, f"{source}:stages.{name}", "weekly_capacity_hours"),
                rate=HourlyRate(r.money(s.get("rate_usd_per_hour", "0"), f"{source}:stages.{name}", "rate_usd_per_hour")),
            )
        acceptance = r.obj(doc.get("acceptance", {}), source, "acceptance")
        mix = doc.get("severity_mix")
        return PipelineConfig(
            horizon_weeks=r.count(doc.get("horizon_weeks"), source, "horizon_weeks"),
            arrivals=arrivals,
            seed=r.count(doc.get("seed", 0), source, "seed"),
            stages=stages,
            pi_s=r.exact(acceptance.get("pi_s", 1), source, "pi_s"),
            pi_e=r.exact(acceptance.get("pi_e", 1), source, "pi_e"),
            queue_discipline=doc.get("queue_discipline", "fifo"),
            severity_mix=None if mix is None else {k: r.exact(v, source, k) for k, v in r.obj(mix, source, "severity_mix").items()},
        )
    except DocumentError:
        raise
    except (TypeError, ValueError) as exc:
        raise DocumentError(f"invalid scenario: {exc}", path=source) from None


def load_scenario(path: str | Path) -> PipelineConfig:
    text, source = read_text(path)
    return scenario_from_dict(parse_json(text, source), text, source)


# -- sensitivity and cost-model documents ----------------------------------


def sensitivity_from_dict(doc: Any, text: str = "", source: str = "<sensitivity>"):
    """Return ``(target, params, samples, seed)`` from a sensitivity document."""
    r = _Reader(text)
    doc = r.obj(doc, source, None)
    target = doc.get("target")
    if target not in FORMULAS:
        raise r.error(f"target must be one of {sorted(FORMULAS)}", source, "target")
    units = dict(FORMULAS[target].params)
    params = {}
    for name, spec in r.obj(doc.get("params", {}), source, "params").items():
        unit = units.get(name)
        if unit is None:
            raise r.error(f"{target} has no parameter {name!r}", f"{source}:params", name)
        path = f"{source}:params.{name}"
        try:
            if isinstance(spec, Mapping):
                iv = r.interval(spec, path, name, spec.get("unit", unit))
                dist = spec.get("distribution", "point" if iv.is_point else "uniform")
                mode = r.exact(spec["mode"], path, name) if spec.get("mode") is not None else None
                params[name] = UncertainParam(name, iv, dist, mode)
            else:
                params[name] = UncertainParam.point(name, r.exact(spec, path, name), unit)
        except DocumentError:
            raise
        except ValueError as exc:
            raise r.error(str(exc), path, name) from None
    samples = doc.get("samples")
    seed = doc.get("seed")
    return (
        target,
        params,
        None if samples is None else r.count(samples, source, "samples"),
        None if seed is None else r.count(seed, source, "seed"),
    )


def load_sensitivity(path: str | Path):
    text, source = read_text(path)
    return sensitivity_from_dict(parse_json(text, source), text, source)


def cost_model_from_dict(doc: Any, text: str = "", source: str = "<cost model>") -> CostModel:
    r = _Reader(text)
    doc = r.obj(doc, source, None)
    gen = r.obj(doc.get("generation", {}), source, "generation")
    pricing = gen.get("pricing", "opus-4.6")
    if isinstance(pricing, str):
        if pricing not in PRICING:
            raise r.error(f"unknown model {pricing!r}; known: {sorted(PRICING)}", source, "pricing")
        pricing = PRICING[pricing]
    else:
        p = r.obj(pricing, source, "pricing")
        pricing = TokenPricing(
            str(p.get("model_name", "custom")),
            r.money(p.get("r_in", "0"), source, "r_in"),
            r.money(p.get("r_out", "0"), source, "r_out"),
        )
    try:
        profile = GenerationProfile(
            q=r.count(gen.get("runs", 0), source, "runs"),
            t_in=r.exact(gen.get("mean_input_tokens", 0), source, "mean_input_tokens"),
            t_out=r.exact(gen.get("mean_output_tokens", 0), source, "mean_output_tokens"),
            c_tools=r.money(gen.get("tools_cost", "0"), source, "tools_cost"),
        )
        efforts = {}
        for name, e in r.obj(doc.get("stages", {}), source, "stages").items():
            if name not in STAGES[1:]:
                raise r.error(f"unknown effort stage {name!r}", f"{source}:stages", name)
            e = r.obj(e, f"{source}:stages.{name}", name)
            efforts[name] = StageEffort(
                name,
                r.exact(e.get("hours_per_item", 0), source, "hours_per_item"),
                HourlyRate(r.money(e.get("rate_usd_per_hour", "0"), source, "rate_usd_per_hour")),
            )
        counts = r.obj(doc.get("counts", {}), source, "counts")
        expl = counts.get("exploitable")
        return CostModel(
            profile=profile,
            pricing=pricing,
            efforts=efforts,
            submitted=r.count(counts.get("submitted", 0), source, "submitted"),
            accepted=r.count(counts.get("accepted", 0), source, "accepted"),
            exploitable=None if expl is None else r.count(expl, source, "exploitable"),
        )
    except DocumentError:
        raise
    except (TypeError, ValueError) as exc:
        raise DocumentError(f"invalid cost model: {exc}", path=source) from None


def load_document(path: str | Path) -> tuple[Any, str, str]:
    text, source = read_text(path)
    return parse_json(text, source), text, source
