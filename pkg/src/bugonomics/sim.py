"""Discrete-event simulation of the remediation pipeline.

Items flow generation -> validation -> impact -> remediation -> triage.
Each stage is one non-preemptive worker with a weekly budget of effort
hours: it serves queued items on a continuous hour clock while budget
remains, pauses when the week's budget is spent, and resumes the same item
when the budget refills at the next week boundary. An unbounded stage
serves every item the instant it arrives (its effort is still billed).

Acceptance thinning drops items at validation exit (``pi_s``) and impact
exit (``pi_e``); a dropped item has already consumed its service time.

Stages never feed back into earlier ones, so the network is simulated
stage by stage: a stage's departure epochs are the next stage's arrival
epochs. That gives the same trajectories as a global event list while the
per-stage event loop runs in the compiled kernel.

Every random quantity is a counter-based draw keyed on the item id, which
makes a run a pure function of ``(config, seed)`` and keeps each item's
fate independent of the order in which events are processed.
"""

from __future__ import annotations

import hashlib
from collections.abc import Iterable, Mapping
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Literal

import numpy as np

from . import kernels
from .core import (
    SEVERITIES,
    STAGES,
    CostBreakdown,
    HourlyRate,
    Interval,
    Money,
    StageEffort,
    check_proportion,
    to_exact,
)
from .cost import stage_cost
from .metrics import fixes_per_maintainer_hour

HOURS_PER_WEEK = 168
Discipline = Literal["fifo", "severity_priority"]

# sub-stream purposes for seed derivation
_ARRIVALS, _SEVERITY, _SERVICE, _THINNING = 1, 2, 3, 4


@dataclass(frozen=True)
class ServiceTime:
    """Effort hours per item: a point value or a range with a distribution."""

    hours: Interval = field(default_factory=lambda: Interval.point(0, "hours"))
    distribution: Literal["point", "uniform", "triangular"] = "point"
    mode: Fraction | None = None

    def __post_init__(self):
        if self.hours.unit != "hours":
            raise ValueError("service time must be in hours")
        if self.hours.lo < 0:
            raise ValueError("service hours must be non-negative")
        if self.distribution not in ("point", "uniform", "triangular"):
            raise ValueError(f"unknown service distribution {self.distribution!r}")
        if self.distribution == "point" and not self.hours.is_point:
            raise ValueError("point service time needs lo == hi")
        if self.distribution == "triangular":
            if self.mode is None or to_exact(self.mode) not in self.hours:
                raise ValueError("triangular service time needs a mode inside the range")
            object.__setattr__(self, "mode", to_exact(self.mode))

    @classmethod
    def fixed(cls, hours) -> ServiceTime:
        return cls(Interval.point(hours, "hours"))

    @property
    def is_point(self) -> bool:
        return self.distribution == "point"


@dataclass(frozen=True)
class StageConfig:
    service: ServiceTime = field(default_factory=ServiceTime)
    weekly_capacity_hours: Fraction | None = None  # None: unbounded
    rate: HourlyRate = field(default_factory=lambda: HourlyRate(Money.zero()))

    def __post_init__(self):
        if self.weekly_capacity_hours is not None:
            cap = to_exact(self.weekly_capacity_hours)
            if cap < 0:
                raise ValueError("weekly capacity must be non-negative")
            object.__setattr__(self, "weekly_capacity_hours", cap)

    @property
    def bounded(self) -> bool:
        return self.weekly_capacity_hours is not None


@dataclass(frozen=True)
class Arrivals:
    process: Literal["deterministic", "poisson"] = "deterministic"
    rate_per_week: Fraction = Fraction(0)

    def __post_init__(self):
        if self.process not in ("deterministic", "poisson"):
            raise ValueError(f"unknown arrival process {self.process!r}")
        rate = to_exact(self.rate_per_week)
        if rate < 0:
            raise ValueError("arrival rate must be non-negative")
        object.__setattr__(self, "rate_per_week", rate)


@dataclass(frozen=True)
class PipelineConfig:
    horizon_weeks: int
    arrivals: Arrivals
    seed: int = 0
    stages: Mapping[str, StageConfig] = field(default_factory=dict)
    pi_s: Fraction = Fraction(1)
    pi_e: Fraction = Fraction(1)
    queue_discipline: Discipline = "fifo"
    severity_mix: Mapping[str, Fraction] | None = None

    def __post_init__(self):
        if isinstance(self.horizon_weeks, bool) or not isinstance(self.horizon_weeks, int):
            raise TypeError("horizon_weeks must be an integer")
        if self.horizon_weeks <= 0:
            raise ValueError("horizon must be at least one week")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")
        unknown = set(self.stages) - set(STAGES)
        if unknown:
            raise ValueError(f"unknown stages {sorted(unknown)}")
        # every stage present, in pipeline order
        object.__setattr__(self, "stages", {s: self.stages.get(s, StageConfig()) for s in STAGES})
        object.__setattr__(self, "pi_s", check_proportion(self.pi_s, "pi_s"))
        object.__setattr__(self, "pi_e", check_proportion(self.pi_e, "pi_e"))
        if self.queue_discipline not in ("fifo", "severity_priority"):
            raise ValueError(f"unknown queue discipline {self.queue_discipline!r}")
        if self.severity_mix is not None:
            mix = {k: check_proportion(v, k) for k, v in self.severity_mix.items()}
            if set(mix) - set(SEVERITIES):
                raise ValueError(f"unknown severities in mix: {sorted(set(mix) - set(SEVERITIES))}")
            if sum(mix.values()) != 1:
                raise ValueError("severity mix must sum to 1")
            object.__setattr__(self, "severity_mix", {s: mix.get(s, Fraction(0)) for s in SEVERITIES})
        elif self.queue_discipline == "severity_priority":
            raise ValueError("severity_priority discipline needs a severity_mix")

    def with_capacity(self, stage: str, hours) -> PipelineConfig:
        stages = dict(self.stages)
        stages[stage] = replace(stages[stage], weekly_capacity_hours=hours)
        return replace(self, stages=stages)

    def with_seed(self, seed: int) -> PipelineConfig:
        return replace(self, seed=seed)

    def digest(self) -> str:
        return hashlib.sha256(repr(self).encode()).hexdigest()[:16]


@dataclass(frozen=True)
class StageResult:
    stage: str
    items_in: int
    items_out: int
    items_dropped_by_thinning: int
    end_backlog: int
    busy_hours: float
    utilization: float | None  # None for unbounded stages

    @property
    def served(self) -> int:
        return self.items_out + self.items_dropped_by_thinning


@dataclass(frozen=True)
class SimResult:
    config_digest: str
    seed: int
    horizon_weeks: int
    stages: tuple[StageResult, ...]
    accepted_fixes_shipped: int
    accepted_fixes_per_maintainer_hour: Fraction | None
    total_cost: CostBreakdown

    def stage(self, name: str) -> StageResult:
        for s in self.stages:
            if s.stage == name:
                return s
        raise KeyError(name)


def _sub_seed(seed: int, purpose: int) -> int:
    return kernels.counter_hash(seed, purpose, 0)


def _arrival_times(config: PipelineConfig, horizon: float) -> np.ndarray:
    rate = config.arrivals.rate_per_week
    if rate == 0:
        return np.empty(0)
    if config.arrivals.process == "poisson":
        return kernels.poisson_arrivals(
            _sub_seed(config.seed, _ARRIVALS), 0, float(rate) / HOURS_PER_WEEK, horizon
        )
    # evenly spaced: the k-th arrival at k * (week / rate), for k < rate * horizon_weeks
    spacing = Fraction(HOURS_PER_WEEK) / rate
    count = rate * config.horizon_weeks
    n = int(count) + (0 if count.denominator == 1 else 1)
    return np.array([float(k * spacing) for k in range(n)], dtype=np.float64)


def _below(u: float, p: Fraction) -> bool:
    # u is an exact multiple of 2**-53, so this comparison is exact
    return Fraction(u) < p


def _priorities(config: PipelineConfig, n: int) -> np.ndarray:
    prio = np.zeros(n, dtype=np.int_)
    if config.queue_discipline != "severity_priority" or n == 0:
        return prio
    u = kernels.sample_block(_sub_seed(config.seed, _SEVERITY), 0, n, [kernels.KIND_UNIFORM], [0.0], [1.0], [0.0])
    cumulative = []
    acc = Fraction(0)
    for s in SEVERITIES:
        acc += config.severity_mix[s]
        cumulative.append(acc)
    for i in range(n):
        ui = Fraction(float(u[i, 0]))
        prio[i] = next((c for c, edge in enumerate(cumulative) if ui < edge), len(SEVERITIES) - 1)
    return prio


def _service_matrix(config: PipelineConfig, n: int) -> np.ndarray:
    kind = {"point": kernels.KIND_POINT, "uniform": kernels.KIND_UNIFORM, "triangular": kernels.KIND_TRIANGULAR}
    specs = [config.stages[s].service for s in STAGES]
    return kernels.sample_block(
        _sub_seed(config.seed, _SERVICE),
        0,
        n,
        [kind[sp.distribution] for sp in specs],
        [float(sp.hours.lo) for sp in specs],
        [float(sp.hours.hi) for sp in specs],
        [float(sp.mode if sp.mode is not None else sp.hours.lo) for sp in specs],
    )


def _keep_masks(config: PipelineConfig, n: int) -> dict[str, np.ndarray]:
    u = kernels.sample_block(
        _sub_seed(config.seed, _THINNING), 0, n,
        [kernels.KIND_UNIFORM] * 2, [0.0, 0.0], [1.0, 1.0], [0.0, 0.0],
    )
    masks = {}
    for col, (stage, p) in enumerate((("validation", config.pi_s), ("impact", config.pi_e))):
        if p == 1:
            masks[stage] = np.ones(n, dtype=bool)
        elif p == 0:
            masks[stage] = np.zeros(n, dtype=bool)
        else:
            masks[stage] = np.array([_below(float(x), p) for x in u[:, col]], dtype=bool)
    return masks


def _stage_bill(stage: str, cfg: StageConfig, served_hours: np.ndarray) -> Money:
    if cfg.service.is_point:
        effort = StageEffort(stage, cfg.service.hours.lo, cfg.rate)
        return stage_cost(int(served_hours.size), effort)
    hours = sum((Fraction(float(h)) for h in served_hours), Fraction(0))
    return Money.from_exact(hours * cfg.rate.usd_per_hour.usd)


def simulate(config: PipelineConfig) -> SimResult:
    """Run one replication of ``config``; deterministic in ``(config, seed)``."""
    horizon = float(config.horizon_weeks * HOURS_PER_WEEK)
    arrivals = _arrival_times(config, horizon)
    n = arrivals.size
    prio = _priorities(config, n)
    service = _service_matrix(config, n)
    keep = _keep_masks(config, n)

    ids = np.arange(n)
    times = arrivals
    stage_results = []
    bills = {}
    for col, name in enumerate(STAGES):
        cfg = config.stages[name]
        order = np.lexsort((ids, times))
        ids, times = ids[order], times[order]
        capacity = -1.0 if cfg.weekly_capacity_hours is None else float(cfg.weekly_capacity_hours)
        svc = np.ascontiguousarray(service[ids, col])
        dep, busy = kernels.serve_stage(times, svc, prio[ids], capacity, horizon, float(HOURS_PER_WEEK))
        done = np.isfinite(dep)
        passed = done & keep[name][ids] if name in keep else done
        served = int(np.count_nonzero(done))
        out = int(np.count_nonzero(passed))
        if cfg.weekly_capacity_hours is None:
            util = None
        elif cfg.weekly_capacity_hours == 0:
            util = 0.0
        else:
            util = float(busy) / (float(cfg.weekly_capacity_hours) * config.horizon_weeks)
        stage_results.append(
            StageResult(
                stage=name,
                items_in=int(ids.size),
                items_out=out,
                items_dropped_by_thinning=served - out,
                end_backlog=int(ids.size) - served,
                busy_hours=float(busy),
                utilization=util,
            )
        )
        bills[name] = _stage_bill(name, cfg, svc[done])
        ids, times = ids[passed], dep[passed]

    shipped = stage_results[-1].items_out
    triage_hours = stage_results[-1].busy_hours
    fpmh = fixes_per_maintainer_hour(shipped, Fraction(triage_hours)) if triage_hours > 0 else None
    return SimResult(
        config_digest=config.digest(),
        seed=config.seed,
        horizon_weeks=config.horizon_weeks,
        stages=tuple(stage_results),
        accepted_fixes_shipped=shipped,
        accepted_fixes_per_maintainer_hour=fpmh,
        total_cost=CostBreakdown(
            c_g=bills["generation"],
            c_v=bills["validation"],
            c_i=bills["impact"],
            c_r=bills["remediation"],
            c_t=bills["triage"],
        ),
    )


def sweep(config: PipelineConfig, seeds: Iterable[int], workers: int = 1) -> list[SimResult]:
    """Independent replications, returned in the order of ``seeds``."""
    configs = [config.with_seed(s) for s in seeds]
    if workers <= 1:
        return [simulate(c) for c in configs]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(simulate, configs))


@dataclass(frozen=True)
class StageRank:
    stage: str
    backlog_growth_per_week: Fraction
    utilization: float | None


@dataclass(frozen=True)
class BottleneckReport:
    ranking: tuple[StageRank, ...]
    bottleneck: str | None
    added_capacity_hours: int = 1
    marginal_shipped_gain: int | None = None
    marginal_stage_throughput_gain: int | None = None


def bottleneck_report(result: SimResult, config: PipelineConfig) -> BottleneckReport:
    """Rank capacity-bounded stages by backlog growth rate.

    Ties go to higher utilization, then to the earlier stage. The top stage
    is the bottleneck only if its backlog actually grows; a saturated stage
    that keeps up is not binding. For a bottleneck, the report re-simulates
    with one more capacity-hour per week there and records the gain.
    """
    if result.config_digest != config.digest():
        raise ValueError("result was not produced from this config")
    ranks = [
        StageRank(s.stage, Fraction(s.end_backlog, result.horizon_weeks), s.utilization)
        for s in result.stages
        if config.stages[s.stage].bounded
    ]
    order = {name: i for i, name in enumerate(STAGES)}
    ranks.sort(key=lambda r: (-r.backlog_growth_per_week, -(r.utilization or 0.0), order[r.stage]))
    if not ranks or ranks[0].backlog_growth_per_week <= 0:
        return BottleneckReport(tuple(ranks), None)

    top = ranks[0].stage
    cap = config.stages[top].weekly_capacity_hours
    bumped = simulate(config.with_capacity(top, cap + 1))
    return BottleneckReport(
        ranking=tuple(ranks),
        bottleneck=top,
        added_capacity_hours=1,
        marginal_shipped_gain=bumped.accepted_fixes_shipped - result.accepted_fixes_shipped,
        marginal_stage_throughput_gain=bumped.stage(top).served - result.stage(top).served,
    )


@dataclass(frozen=True)
class SimulationReport:
    result: SimResult
    bottleneck: BottleneckReport


def run_scenario(config: PipelineConfig) -> SimulationReport:
    """Simulate once and attach the bottleneck analysis."""
    result = simulate(config)
    return SimulationReport(result, bottleneck_report(result, config))
