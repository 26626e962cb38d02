"""Domain types and exact arithmetic shared across the package.

Money is held as an integer number of micro-USD, ratios as
:class:`fractions.Fraction`. Binary floats never enter a stored value here;
rounding happens only when a result is displayed or forced back into
micro-USD.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from decimal import Decimal
from fractions import Fraction
from typing import Literal, Union

MICROS_PER_USD = 1_000_000
# Money must fit a signed 64-bit integer of micro-USD; beyond that is an error.
MONEY_MAX_MICROS = 2**63 - 1

SEVERITIES = ("high", "moderate", "low")
STAGES = ("generation", "validation", "impact", "remediation", "triage")
EFFORT_STAGES = ("validation", "impact", "remediation", "triage")
UNITS = ("money", "hours", "rate", "count", "fraction")

Stage = Literal["generation", "validation", "impact", "remediation", "triage"]
Exact = Union[int, Fraction]

_DECIMAL_RE = re.compile(r"^[+-]?(\d+(\.\d*)?|\.\d+)$")
_RATIO_RE = re.compile(r"^\s*([+-]?\d+)\s*/\s*(\d+)\s*$")


class MoneyOverflowError(OverflowError):
    """Raised when a money amount no longer fits 64-bit micro-USD."""


def to_exact(value) -> Fraction:
    """Convert ``value`` to an exact rational.

    Accepts ints, Fractions, Decimals, decimal strings (``"2.50"``) and ratio
    strings (``"22/112"``). Floats are refused: they are rarely the number
    the caller meant.
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not numbers here")
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, Decimal):
        if not value.is_finite():
            raise ValueError(f"non-finite value {value}")
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip().replace("_", "")
        m = _RATIO_RE.match(text)
        if m:
            den = int(m.group(2))
            if den == 0:
                raise ValueError(f"zero denominator in {value!r}")
            return Fraction(int(m.group(1)), den)
        if not _DECIMAL_RE.match(text):
            raise ValueError(f"malformed number {value!r}")
        return Fraction(Decimal(text))
    if isinstance(value, float):
        raise TypeError(f"refusing binary float {value!r}; pass a string or Fraction")
    raise TypeError(f"cannot interpret {type(value).__name__} as an exact number")


def round_half_away(value: Fraction) -> int:
    """Round to the nearest integer, ties away from zero."""
    value = Fraction(value)
    n, d = abs(value.numerator), value.denominator
    q, r = divmod(n, d)
    if 2 * r >= d:
        q += 1
    return q if value >= 0 else -q


def is_terminating(value: Fraction) -> bool:
    d = Fraction(value).denominator
    for p in (2, 5):
        while d % p == 0:
            d //= p
    return d == 1


def exact_to_decimal_str(value: Fraction) -> str:
    """Plain decimal text for a terminating rational (``Fraction(5, 2)`` -> ``"2.5"``)."""
    value = Fraction(value)
    if not is_terminating(value):
        raise ValueError(f"{value} has no finite decimal expansion")
    scale = 0
    while (value * 10**scale).denominator != 1:
        scale += 1
    digits = Decimal(int(value * 10**scale)).scaleb(-scale)
    return format(digits, "f")


def _check_micros(micros: int) -> int:
    if micros > MONEY_MAX_MICROS:
        raise MoneyOverflowError(f"money amount {micros} micro-USD exceeds 64-bit range")
    return micros


@dataclass(frozen=True, order=True, slots=True)
class Money:
    """Non-negative USD amount stored as integer micro-USD."""

    micros: int

    def __post_init__(self):
        if isinstance(self.micros, bool) or not isinstance(self.micros, int):
            raise TypeError("Money.micros must be an int")
        if self.micros < 0:
            raise ValueError(f"negative cost: {self.micros} micro-USD")
        _check_micros(self.micros)

    @classmethod
    def zero(cls) -> Money:
        return cls(0)

    @classmethod
    def from_usd(cls, dollars) -> Money:
        return money_from_usd(dollars)

    @classmethod
    def from_exact(cls, usd: Fraction) -> Money:
        """Round an exact USD rational to the nearest micro-USD (ties away from zero)."""
        return cls(_check_micros(round_half_away(Fraction(usd) * MICROS_PER_USD)))

    @property
    def usd(self) -> Fraction:
        return Fraction(self.micros, MICROS_PER_USD)

    def __add__(self, other: Money) -> Money:
        if not isinstance(other, Money):
            return NotImplemented
        return Money(_check_micros(self.micros + other.micros))

    def __sub__(self, other: Money) -> Money:
        if not isinstance(other, Money):
            return NotImplemented
        return Money(self.micros - other.micros)

    def __mul__(self, k: int) -> Money:
        if isinstance(k, bool) or not isinstance(k, int):
            return NotImplemented
        return Money(_check_micros(self.micros * k))

    __rmul__ = __mul__

    def times(self, factor) -> Fraction:
        """Exact product in USD; no rounding."""
        return self.usd * to_exact(factor)

    def to_decimal_str(self) -> str:
        return exact_to_decimal_str(self.usd)

    def __str__(self) -> str:
        return format_usd(self.usd, places=2)


def money_from_usd(dollars) -> Money:
    """Parse a decimal dollar literal into exact micro-USD.

    >>> money_from_usd("2.50").micros
    2500000
    """
    if isinstance(dollars, bool):
        raise TypeError("expected decimal text, got bool")
    if isinstance(dollars, int):
        text = str(dollars)
    elif isinstance(dollars, Decimal):
        text = format(dollars, "f")
    elif isinstance(dollars, str):
        text = dollars.strip().replace(",", "")
    else:
        raise TypeError(f"expected decimal text, got {type(dollars).__name__}")
    if not _DECIMAL_RE.match(text):
        raise ValueError(f"malformed dollar amount {dollars!r}")
    if "." in text and len(text.split(".", 1)[1]) > 6:
        raise ValueError(f"{dollars!r} has more than 6 fractional digits")
    if text.startswith("-") and Fraction(Decimal(text)) != 0:
        raise ValueError(f"negative cost {dollars!r}")
    return Money(_check_micros(int(Fraction(Decimal(text)) * MICROS_PER_USD)))


@dataclass(frozen=True, slots=True)
class HourlyRate:
    usd_per_hour: Money

    @classmethod
    def from_usd(cls, dollars) -> HourlyRate:
        return cls(money_from_usd(dollars))


@dataclass(frozen=True, slots=True)
class TokenPricing:
    """Per-million-token prices for one model."""

    model_name: str
    r_in: Money
    r_out: Money


# USD per million tokens (input, output), list prices at time of writing.
PRICING: dict[str, TokenPricing] = {
    "opus-4.6": TokenPricing("opus-4.6", money_from_usd("5"), money_from_usd("25")),
    "sonnet-4.6": TokenPricing("sonnet-4.6", money_from_usd("3"), money_from_usd("15")),
    "haiku-4.5": TokenPricing("haiku-4.5", money_from_usd("1"), money_from_usd("5")),
}


@dataclass(frozen=True, slots=True)
class GenerationProfile:
    q: int
    t_in: Fraction
    t_out: Fraction
    c_tools: Money = field(default_factory=Money.zero)

    def __post_init__(self):
        if isinstance(self.q, bool) or not isinstance(self.q, int) or self.q < 0:
            raise ValueError(f"run count must be a non-negative integer, got {self.q!r}")
        for name in ("t_in", "t_out"):
            v = to_exact(getattr(self, name))
            if v < 0:
                raise ValueError(f"{name} must be non-negative")
            object.__setattr__(self, name, v)


@dataclass(frozen=True, slots=True)
class StageEffort:
    stage: Stage
    hours_per_item: Fraction
    rate: HourlyRate

    def __post_init__(self):
        if self.stage not in STAGES:
            raise ValueError(f"unknown stage {self.stage!r}")
        h = to_exact(self.hours_per_item)
        if h < 0:
            raise ValueError("hours_per_item must be non-negative")
        object.__setattr__(self, "hours_per_item", h)


def proportion(numerator: int, denominator: int) -> Fraction:
    """Exact fraction of a count, constrained to ``[0, 1]``."""
    if denominator <= 0:
        raise ValueError("denominator must be positive")
    if numerator < 0 or numerator > denominator:
        raise ValueError(f"{numerator}/{denominator} is not a proportion")
    return Fraction(numerator, denominator)


def check_proportion(value, name: str = "fraction") -> Fraction:
    value = to_exact(value)
    if not 0 <= value <= 1:
        raise ValueError(f"{name} must lie in [0, 1], got {value}")
    return value


@dataclass(frozen=True, slots=True)
class FunnelCounts:
    """Strict campaign funnel; construction enforces the count invariants.

    Raw and deduplicated counts are often undisclosed, so they may be None;
    the ordering check then runs over the counts that are present.
    """

    submitted_reports: int
    accepted_findings: int
    raw_candidates: int | None = None
    deduplicated_candidates: int | None = None
    high_severity: int | None = None
    moderate_severity: int | None = None
    low_severity: int | None = None
    exploitable: int | None = None
    severity_exhaustive: bool = False

    def __post_init__(self):
        for name in self.__dataclass_fields__:
            v = getattr(self, name)
            if name == "severity_exhaustive" or v is None:
                continue
            if isinstance(v, bool) or not isinstance(v, int) or v < 0:
                raise ValueError(f"{name} must be a non-negative integer")
        chain = [
            v
            for v in (
                self.raw_candidates,
                self.deduplicated_candidates,
                self.submitted_reports,
                self.accepted_findings,
            )
            if v is not None
        ]
        if any(a < b for a, b in zip(chain, chain[1:])):
            raise ValueError("funnel counts must satisfy raw >= deduplicated >= submitted >= accepted")
        split = (self.high_severity, self.moderate_severity, self.low_severity)
        if all(s is not None for s in split):
            total = sum(split)
            if total > self.accepted_findings:
                raise ValueError("severity split exceeds accepted findings")
            if self.severity_exhaustive and total != self.accepted_findings:
                raise ValueError("exhaustive severity split must sum to accepted findings")
        if self.exploitable is not None and self.exploitable > self.accepted_findings:
            raise ValueError("exploitable count exceeds accepted findings")


# Dimensions as (USD exponent, hour exponent). count and fraction are both
# dimensionless and differ only in tag.
_DIMS = {
    "money": (1, 0),
    "hours": (0, 1),
    "rate": (1, -1),
    "count": (0, 0),
    "fraction": (0, 0),
}


def _unit_for(dim: tuple[int, int], a: str, b: str) -> str:
    if dim == (0, 0):
        return "fraction" if a == b == "fraction" else "count"
    for unit, d in _DIMS.items():
        if d == dim:
            return unit
    raise ValueError(f"units {a!r} and {b!r} combine to an unsupported dimension {dim}")


def unit_product(a: str, b: str) -> str:
    da, db = _DIMS[a], _DIMS[b]
    return _unit_for((da[0] + db[0], da[1] + db[1]), a, b)


def unit_quotient(a: str, b: str) -> str:
    da, db = _DIMS[a], _DIMS[b]
    return _unit_for((da[0] - db[0], da[1] - db[1]), a, b)


@dataclass(frozen=True, slots=True)
class Interval:
    """Closed range ``[lo, hi]`` with exact endpoints and a unit tag."""

    lo: Fraction
    hi: Fraction
    unit: str = "count"

    def __post_init__(self):
        lo, hi = to_exact(self.lo), to_exact(self.hi)
        if lo > hi:
            raise ValueError(f"interval lower bound {lo} exceeds upper bound {hi}")
        if self.unit not in UNITS:
            raise ValueError(f"unknown unit {self.unit!r}")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @classmethod
    def point(cls, value, unit: str = "count") -> Interval:
        return cls(value, value, unit)

    @property
    def is_point(self) -> bool:
        return self.lo == self.hi

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    def __contains__(self, value) -> bool:
        return self.lo <= to_exact(value) <= self.hi


@dataclass(frozen=True, slots=True)
class CostBreakdown:
    c_g: Money = field(default_factory=Money.zero)
    c_v: Money = field(default_factory=Money.zero)
    c_i: Money = field(default_factory=Money.zero)
    c_r: Money = field(default_factory=Money.zero)
    c_t: Money = field(default_factory=Money.zero)

    def components(self) -> dict[str, Money]:
        return {
            "generation": self.c_g,
            "validation": self.c_v,
            "impact": self.c_i,
            "remediation": self.c_r,
            "triage": self.c_t,
        }


@dataclass(frozen=True, slots=True)
class PriceFactors:
    """Descriptive inputs to an outcome's market price.

    Recorded for documentation only; nothing in the package turns these into
    a number.
    """

    utility: str = ""
    scarcity: str = ""
    exclusivity: str = ""
    legal_risk: str = ""
    substitutes: str = ""


# -- display ---------------------------------------------------------------


def format_usd(value, places: int = 0) -> str:
    """``$`` amount with thousands separators, rounded half away from zero."""
    if isinstance(value, Money):
        value = value.usd
    value = to_exact(value)
    scaled = round_half_away(value * 10**places)
    sign = "-" if scaled < 0 else ""
    whole, frac = divmod(abs(scaled), 10**places)
    text = f"{whole:,}"
    if places:
        text += "." + str(frac).zfill(places)
    return f"{sign}${text}"


def format_percent(value, places: int = 1) -> str:
    value = to_exact(value) * 100
    return _format_fixed(value, places) + "%"


def format_ratio(value, places: int = 1) -> str:
    return _format_fixed(to_exact(value), places)


def _format_fixed(value: Fraction, places: int) -> str:
    scaled = round_half_away(value * 10**places)
    sign = "-" if scaled < 0 else ""
    whole, frac = divmod(abs(scaled), 10**places)
    return f"{sign}{whole}" + (f".{str(frac).zfill(places)}" if places else "")


def format_usd_range(interval: Interval, places: int = 0) -> str:
    lo, hi = format_usd(interval.lo, places), format_usd(interval.hi, places)
    return lo if lo == hi else f"{lo}-{hi}"
