"""Parameter uncertainty through the cost formulas.

Two routes over the same formulas:

* interval arithmetic on exact endpoints, which gives the guaranteed range
  (every formula is monotone in each non-negative argument, so endpoint
  evaluation is tight);
* seeded Monte Carlo in binary floating point, for the shape of the
  distribution inside that range.

Sampling is counter-based: the draw for parameter ``j`` of sample ``i`` is a
pure function of ``(seed, j, i)``, so summaries do not depend on how the
samples are split across workers.
"""

from __future__ import annotations

import math
from collections.abc import Callable, Mapping
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Literal

import numpy as np

from . import kernels
from .core import Interval, Money, to_exact, unit_product, unit_quotient

Distribution = Literal["uniform", "triangular", "point"]
DEFAULT_SAMPLES = 10_000
_CHUNK = 16_384


class IntervalDivisionError(ZeroDivisionError):
    pass


# -- interval arithmetic ---------------------------------------------------


def interval_add(a: Interval, b: Interval) -> Interval:
    if a.unit != b.unit:
        raise ValueError(f"cannot add {a.unit} to {b.unit}")
    return Interval(a.lo + b.lo, a.hi + b.hi, a.unit)


def _require_non_negative(*intervals: Interval) -> None:
    for iv in intervals:
        if iv.lo < 0:
            raise ValueError(f"negative endpoint {iv.lo}: interval products assume non-negative quantities")


def interval_mul(a: Interval, b: Interval) -> Interval:
    _require_non_negative(a, b)
    return Interval(a.lo * b.lo, a.hi * b.hi, unit_product(a.unit, b.unit))


def interval_div(a: Interval, b: Interval) -> Interval:
    _require_non_negative(a, b)
    if b.lo <= 0:
        raise IntervalDivisionError("division by interval containing zero")
    return Interval(a.lo / b.hi, a.hi / b.lo, unit_quotient(a.unit, b.unit))


def interval_scale(a: Interval, k) -> Interval:
    return interval_mul(a, Interval.point(k, "count"))


# -- uncertain parameters --------------------------------------------------


@dataclass(frozen=True, slots=True)
class UncertainParam:
    name: str
    interval: Interval
    distribution: Distribution = "uniform"
    mode: Fraction | None = None

    def __post_init__(self):
        if self.distribution not in ("uniform", "triangular", "point"):
            raise ValueError(f"{self.name}: unknown distribution {self.distribution!r}")
        if self.distribution == "point" and not self.interval.is_point:
            raise ValueError(f"{self.name}: point distribution needs lo == hi")
        if self.distribution == "triangular":
            if self.mode is None:
                raise ValueError(f"{self.name}: triangular distribution needs a mode")
            mode = to_exact(self.mode)
            if mode not in self.interval:
                raise ValueError(f"{self.name}: mode {mode} outside [{self.interval.lo}, {self.interval.hi}]")
            object.__setattr__(self, "mode", mode)
        elif self.mode is not None:
            raise ValueError(f"{self.name}: mode given for a {self.distribution} distribution")

    @classmethod
    def point(cls, name: str, value, unit: str) -> UncertainParam:
        return cls(name, Interval.point(value, unit), "point")


@dataclass(frozen=True)
class CostFormula:
    """A cost-engine formula in both interval and vectorised-float form."""

    name: str
    params: tuple[tuple[str, str], ...]  # (parameter name, unit)
    lift: Callable[[Mapping[str, Interval]], Interval]
    evaluate: Callable[[Mapping[str, np.ndarray]], np.ndarray]

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(n for n, _ in self.params)


def _lift_generation(p):
    tokens = interval_add(interval_mul(p["t_in"], p["r_in"]), interval_mul(p["t_out"], p["r_out"]))
    runs = interval_scale(interval_mul(p["q"], tokens), Fraction(1, 1_000_000))
    return interval_add(runs, p["c_tools"])


def _lift_stage(p):
    return interval_mul(interval_mul(p["item_count"], p["hours_per_item"]), p["rate"])


def _lift_total(p):
    out = p["c_g"]
    for name in ("c_v", "c_i", "c_r", "c_t"):
        out = interval_add(out, p[name])
    return out


def _lift_validated(p):
    return interval_div(interval_add(p["c_g"], p["c_v"]), interval_mul(p["n_c"], p["pi_s"]))


def _lift_impact(p):
    num = interval_add(interval_add(p["c_g"], p["c_v"]), p["c_i"])
    den = interval_mul(interval_mul(p["n_c"], p["pi_s"]), p["pi_e"])
    return interval_div(num, den)


def _lift_accepted(p):
    num = interval_add(interval_add(interval_add(p["c_g"], p["c_v"]), p["c_r"]), p["c_t"])
    return interval_div(num, interval_mul(p["n_c"], p["pi_s"]))


FORMULAS: dict[str, CostFormula] = {
    f.name: f
    for f in (
        CostFormula(
            "generation_cost",
            (("q", "count"), ("t_in", "count"), ("t_out", "count"),
             ("r_in", "money"), ("r_out", "money"), ("c_tools", "money")),
            _lift_generation,
            lambda v: v["q"] * (v["t_in"] * v["r_in"] + v["t_out"] * v["r_out"]) / 1e6 + v["c_tools"],
        ),
        CostFormula(
            "stage_cost",
            (("item_count", "count"), ("hours_per_item", "hours"), ("rate", "rate")),
            _lift_stage,
            lambda v: v["item_count"] * v["hours_per_item"] * v["rate"],
        ),
        CostFormula(
            "total_cost",
            (("c_g", "money"), ("c_v", "money"), ("c_i", "money"), ("c_r", "money"), ("c_t", "money")),
            _lift_total,
            lambda v: v["c_g"] + v["c_v"] + v["c_i"] + v["c_r"] + v["c_t"],
        ),
        CostFormula(
            "cost_per_validated_finding",
            (("c_g", "money"), ("c_v", "money"), ("n_c", "count"), ("pi_s", "fraction")),
            _lift_validated,
            lambda v: (v["c_g"] + v["c_v"]) / (v["n_c"] * v["pi_s"]),
        ),
        CostFormula(
            "cost_per_impact_backed",
            (("c_g", "money"), ("c_v", "money"), ("c_i", "money"),
             ("n_c", "count"), ("pi_s", "fraction"), ("pi_e", "fraction")),
            _lift_impact,
            lambda v: (v["c_g"] + v["c_v"] + v["c_i"]) / (v["n_c"] * v["pi_s"] * v["pi_e"]),
        ),
        CostFormula(
            "cost_per_accepted",
            (("c_g", "money"), ("c_v", "money"), ("c_r", "money"), ("c_t", "money"),
             ("n_c", "count"), ("pi_s", "fraction")),
            _lift_accepted,
            lambda v: (v["c_g"] + v["c_v"] + v["c_r"] + v["c_t"]) / (v["n_c"] * v["pi_s"]),
        ),
    )
}


def get_formula(target: str | CostFormula) -> CostFormula:
    if isinstance(target, CostFormula):
        return target
    try:
        return FORMULAS[target]
    except KeyError:
        raise ValueError(f"unknown cost formula {target!r}; choose from {sorted(FORMULAS)}") from None


def normalize_params(target, params: Mapping[str, object]) -> dict[str, UncertainParam]:
    """Coerce scalars, Money and Intervals to :class:`UncertainParam` and check names and units."""
    formula = get_formula(target)
    expected = dict(formula.params)
    missing = set(expected) - set(params)
    extra = set(params) - set(expected)
    if missing or extra:
        raise ValueError(
            f"{formula.name} takes {list(formula.names)}; missing {sorted(missing)}, unexpected {sorted(extra)}"
        )
    out = {}
    for name, unit in formula.params:
        value = params[name]
        if isinstance(value, UncertainParam):
            p = value
        elif isinstance(value, Interval):
            p = UncertainParam(name, value, "point" if value.is_point else "uniform")
        elif isinstance(value, Money):
            p = UncertainParam.point(name, value.usd, unit)
        else:
            p = UncertainParam.point(name, to_exact(value), unit)
        if p.interval.unit != unit:
            raise ValueError(f"{name}: expected unit {unit!r}, got {p.interval.unit!r}")
        out[name] = p
    return out


def lift_cost_model(target, params: Mapping[str, object]) -> Interval:
    """Exact range of ``target`` over the parameter intervals."""
    formula = get_formula(target)
    norm = normalize_params(formula, params)
    return formula.lift({name: p.interval for name, p in norm.items()})


# -- Monte Carlo -----------------------------------------------------------


@dataclass(frozen=True, slots=True)
class McSummary:
    target: str
    sample_count: int
    seed: int
    mean: float
    std_dev: float
    p05: float
    p50: float
    p95: float
    min: float
    max: float

    def within(self, interval: Interval) -> bool:
        return Fraction(self.min) >= interval.lo and Fraction(self.max) <= interval.hi


_KIND = {"point": kernels.KIND_POINT, "uniform": kernels.KIND_UNIFORM, "triangular": kernels.KIND_TRIANGULAR}


def _check_seed(seed: int) -> int:
    if isinstance(seed, bool) or not isinstance(seed, int):
        raise TypeError("seed must be an integer")
    if not -(2**63) <= seed < 2**64:
        raise ValueError("seed must fit in 64 bits")
    return seed & (2**64 - 1)


def draw_samples(
    params: Mapping[str, object],
    target,
    n_samples: int = DEFAULT_SAMPLES,
    seed: int = 0,
    workers: int = 1,
) -> np.ndarray:
    """Evaluate ``target`` on ``n_samples`` seeded parameter draws, in sample order."""
    formula = get_formula(target)
    if isinstance(n_samples, bool) or not isinstance(n_samples, int) or n_samples < 1:
        raise ValueError("n_samples must be a positive integer")
    if workers < 1:
        raise ValueError("workers must be at least 1")
    seed = _check_seed(seed)
    norm = normalize_params(formula, params)
    plist = [norm[name] for name in formula.names]
    kinds = np.array([_KIND[p.distribution] for p in plist], dtype=np.int_)
    lo = np.array([float(p.interval.lo) for p in plist])
    hi = np.array([float(p.interval.hi) for p in plist])
    mode = np.array([float(p.mode) if p.mode is not None else float(p.interval.lo) for p in plist])

    def chunk(bounds: tuple[int, int]) -> np.ndarray:
        start, stop = bounds
        block = kernels.sample_block(seed, start, stop - start, kinds, lo, hi, mode)
        columns = {name: block[:, j] for j, name in enumerate(formula.names)}
        return np.asarray(formula.evaluate(columns), dtype=np.float64)

    size = _CHUNK if workers == 1 else max(1, math.ceil(n_samples / workers))
    spans = [(s, min(s + size, n_samples)) for s in range(0, n_samples, size)]
    if workers == 1:
        parts = [chunk(span) for span in spans]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(chunk, spans))
    return np.concatenate(parts)


def summarize(values: np.ndarray, target: str, seed: int) -> McSummary:
    p05, p50, p95 = np.quantile(values, [0.05, 0.5, 0.95])
    return McSummary(
        target=target,
        sample_count=int(values.size),
        seed=seed,
        mean=float(np.mean(values)),
        std_dev=float(np.std(values)),
        p05=float(p05),
        p50=float(p50),
        p95=float(p95),
        min=float(np.min(values)),
        max=float(np.max(values)),
    )


def monte_carlo(
    params: Mapping[str, object],
    target,
    n_samples: int = DEFAULT_SAMPLES,
    seed: int = 0,
    workers: int = 1,
) -> McSummary:
    formula = get_formula(target)
    values = draw_samples(params, formula, n_samples, seed, workers)
    return summarize(values, formula.name, seed)


@dataclass(frozen=True, slots=True)
class SensitivityResult:
    """Lifted range plus Monte Carlo summary for one formula."""

    target: str
    lifted: Interval
    summary: McSummary
    samples_outside: int


def analyze(
    params: Mapping[str, object],
    target,
    n_samples: int = DEFAULT_SAMPLES,
    seed: int = 0,
    workers: int = 1,
) -> SensitivityResult:
    formula = get_formula(target)
    lifted = lift_cost_model(formula, params)
    values = draw_samples(params, formula, n_samples, seed, workers)
    # float rounding of the evaluated formula may stray a few ulps past exact endpoints
    lo = float(lifted.lo)
    hi = float(lifted.hi)
    slack = 4 * max(math.ulp(lo), math.ulp(hi))
    outside = int(np.count_nonzero((values < lo - slack) | (values > hi + slack)))
    return SensitivityResult(formula.name, lifted, summarize(values, formula.name, seed), outside)
