"""Campaign cost accounting over exact scalars.

Generation cost from token usage, the shared ``N * h * w`` stage-effort
formula, the campaign total, and the three unit costs (per validated
finding, per impact-backed finding, per accepted finding). Every function is
pure and exact; rounding to micro-USD happens only where a result must be a
:class:`~bugonomics.core.Money`.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Literal

from .core import (
    CostBreakdown,
    GenerationProfile,
    Money,
    StageEffort,
    TokenPricing,
    check_proportion,
)

OutcomeKind = Literal["validated_finding", "impact_backed", "accepted"]
TOKENS_PER_PRICE_UNIT = 1_000_000


class UndefinedUnitCostError(ArithmeticError):
    """The unit-cost denominator is zero."""


@dataclass(frozen=True, slots=True)
class UnitCostResult:
    """Cost per outcome, kept exact.

    ``exact_unit_cost`` is USD as a rational; ``unit_cost`` is that value
    rounded to micro-USD. ``included`` names the cost terms in the numerator.
    """

    outcome_kind: OutcomeKind
    numerator: Money
    denominator_count: Fraction
    exact_unit_cost: Fraction
    included: tuple[str, ...] = ()

    def __post_init__(self):
        if self.exact_unit_cost * self.denominator_count != self.numerator.usd:
            raise ValueError("unit cost times denominator must equal the numerator")

    @property
    def unit_cost(self) -> Money:
        return Money.from_exact(self.exact_unit_cost)


def generation_cost(profile: GenerationProfile, pricing: TokenPricing) -> Money:
    """``q * (T_in * r_in + T_out * r_out) + C_tools`` with rates per million tokens."""
    per_run = profile.t_in * pricing.r_in.usd + profile.t_out * pricing.r_out.usd
    tokens_usd = profile.q * per_run / TOKENS_PER_PRICE_UNIT
    return Money.from_exact(tokens_usd) + profile.c_tools


def stage_cost(item_count: int, effort: StageEffort) -> Money:
    """Effort cost of one stage: items x hours per item x hourly rate."""
    if isinstance(item_count, bool) or not isinstance(item_count, int):
        raise TypeError("item_count must be an integer")
    if item_count < 0:
        raise ValueError(f"negative item count {item_count}")
    return Money.from_exact(item_count * effort.hours_per_item * effort.rate.usd_per_hour.usd)


def total_cost(breakdown: CostBreakdown) -> Money:
    return breakdown.c_g + breakdown.c_v + breakdown.c_i + breakdown.c_r + breakdown.c_t


def _unit_cost(kind: OutcomeKind, parts: dict[str, Money], denominator: Fraction, what: str):
    if denominator <= 0:
        raise UndefinedUnitCostError(f"unit cost undefined: no {what}")
    numerator = sum(parts.values(), Money.zero())
    return UnitCostResult(
        outcome_kind=kind,
        numerator=numerator,
        denominator_count=denominator,
        exact_unit_cost=numerator.usd / denominator,
        included=tuple(parts),
    )


def _expected_count(n_c: int, *fractions) -> Fraction:
    if isinstance(n_c, bool) or not isinstance(n_c, int) or n_c < 0:
        raise ValueError(f"candidate report count must be a non-negative integer, got {n_c!r}")
    out = Fraction(n_c)
    for name, f in fractions:
        out *= check_proportion(f, name)
    return out


def cost_per_validated_finding(c_g: Money, c_v: Money, n_c: int, pi_s) -> UnitCostResult:
    """``(C_G + C_V) / (N_c * pi_s)``; the numerator is the finding-production cost."""
    denominator = _expected_count(n_c, ("pi_s", pi_s))
    return _unit_cost(
        "validated_finding", {"generation": c_g, "validation": c_v}, denominator, "validated findings"
    )


def cost_per_impact_backed(
    c_g: Money, c_v: Money, c_i: Money, n_c: int, pi_s, pi_e
) -> UnitCostResult:
    denominator = _expected_count(n_c, ("pi_s", pi_s), ("pi_e", pi_e))
    return _unit_cost(
        "impact_backed",
        {"generation": c_g, "validation": c_v, "impact": c_i},
        denominator,
        "impact-backed findings",
    )


def cost_per_accepted(
    c_g: Money, c_v: Money, c_r: Money, c_t: Money, n_c: int, pi_s
) -> UnitCostResult:
    """Cost per maintainer-accepted finding, including packaging and triage."""
    denominator = _expected_count(n_c, ("pi_s", pi_s))
    return _unit_cost(
        "accepted",
        {"generation": c_g, "validation": c_v, "remediation": c_r, "triage": c_t},
        denominator,
        "accepted findings",
    )


def campaign_breakdown(
    n_c: int,
    pi_s,
    generation: Money,
    efforts: dict[str, StageEffort],
) -> CostBreakdown:
    """Assemble all five stage costs for a campaign.

    Validation scales with submitted reports; impact, remediation and triage
    scale with accepted findings ``N_s = N_c * pi_s``, which must be whole.
    """
    n_s = n_c * check_proportion(pi_s, "pi_s")
    if n_s.denominator != 1:
        raise ValueError(f"N_c * pi_s = {n_s} is not a whole number of findings")
    n_s = int(n_s)

    def one(stage: str, count: int) -> Money:
        effort = efforts.get(stage)
        return stage_cost(count, effort) if effort is not None else Money.zero()

    return CostBreakdown(
        c_g=generation,
        c_v=one("validation", n_c),
        c_i=one("impact", n_s),
        c_r=one("remediation", n_s),
        c_t=one("triage", n_s),
    )



@dataclass(frozen=True)
class CostModel:
    """Everything needed to price a campaign from scratch."""

    profile: GenerationProfile
    pricing: TokenPricing
    efforts: dict[str, StageEffort]
    submitted: int
    accepted: int
    exploitable: int | None = None


@dataclass(frozen=True)
class CostReport:
    breakdown: CostBreakdown
    total: Money
    unit_costs: dict[str, UnitCostResult]


def evaluate_cost_model(model: CostModel) -> CostReport:
    """Stage costs, total, and every unit cost whose denominator is non-zero."""
    if model.submitted <= 0:
        raise UndefinedUnitCostError("unit cost undefined: no submitted reports")
    pi_s = Fraction(model.accepted, model.submitted)
    bd = campaign_breakdown(model.submitted, pi_s, generation_cost(model.profile, model.pricing), model.efforts)
    units = {
        "validated_finding": cost_per_validated_finding(bd.c_g, bd.c_v, model.submitted, pi_s),
        "accepted": cost_per_accepted(bd.c_g, bd.c_v, bd.c_r, bd.c_t, model.submitted, pi_s),
    }
    if model.exploitable is not None:
        if model.accepted == 0 or model.exploitable > model.accepted:
            raise ValueError("exploitable count must not exceed accepted findings")
        pi_e = Fraction(model.exploitable, model.accepted)
        units["impact_backed"] = cost_per_impact_backed(bd.c_g, bd.c_v, bd.c_i, model.submitted, pi_s, pi_e)
    return CostReport(bd, total_cost(bd), units)
