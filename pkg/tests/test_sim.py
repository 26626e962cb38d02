from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings

from bugonomics.core import HourlyRate, Interval, StageEffort
from bugonomics.cost import stage_cost
from bugonomics.sim import (
    Arrivals,
    PipelineConfig,
    ServiceTime,
    StageConfig,
    bottleneck_report,
    run_scenario,
    simulate,
    sweep,
)

from strategies import pipeline_configs

RATE = HourlyRate.from_usd("100")


def capacity_case(weeks=10, cap=5):
    return PipelineConfig(
        horizon_weeks=weeks,
        arrivals=Arrivals("deterministic", 10),
        stages={"validation": StageConfig(ServiceTime.fixed(1), cap, RATE)},
    )


def thinned_case(seed=0):
    return PipelineConfig(
        horizon_weeks=2,
        arrivals=Arrivals("poisson", 56),
        seed=seed,
        pi_s=Fraction(22, 112),
    )


class TestDeterministic:
    def test_capacity_case(self):
        r = simulate(capacity_case())
        v = r.stage("validation")
        assert (v.items_in, v.items_out, v.end_backlog) == (100, 50, 50)
        assert v.utilization == 1.0
        assert r.accepted_fixes_shipped == 50
        assert r.total_cost.c_v == stage_cost(50, StageEffort("validation", 1, RATE))

    @pytest.mark.parametrize("weeks", [1, 2, 5, 10])
    def test_backlog_grows_five_per_week(self, weeks):
        assert simulate(capacity_case(weeks)).stage("validation").end_backlog == 5 * weeks

    def test_bottleneck(self):
        config = capacity_case()
        b = bottleneck_report(simulate(config), config)
        assert b.bottleneck == "validation"
        assert b.ranking[0].backlog_growth_per_week == 5
        assert b.marginal_stage_throughput_gain == 10
        assert b.marginal_shipped_gain == 10

    def test_no_bottleneck_when_keeping_up(self):
        config = capacity_case(cap=20)
        b = run_scenario(config).bottleneck
        assert b.bottleneck is None

    def test_zero_capacity(self):
        r = simulate(capacity_case(cap=0))
        assert r.stage("validation").items_out == 0
        assert r.stage("validation").utilization == 0.0

    def test_no_arrivals(self):
        config = PipelineConfig(horizon_weeks=3, arrivals=Arrivals("poisson", 0))
        assert simulate(config).accepted_fixes_shipped == 0

    def test_thinning_extremes(self):
        config = PipelineConfig(horizon_weeks=1, arrivals=Arrivals("deterministic", 7), pi_s=0)
        r = simulate(config)
        assert r.stage("validation").items_dropped_by_thinning == 7
        assert r.accepted_fixes_shipped == 0

    def test_item_spanning_week_boundary(self):
        config = PipelineConfig(
            horizon_weeks=2,
            arrivals=Arrivals("deterministic", 1),
            stages={"validation": StageConfig(ServiceTime.fixed(7), 5, RATE)},
        )
        v = simulate(config).stage("validation")
        assert v.items_out == 1 and v.end_backlog == 1

    def test_severity_priority_serves_high_first(self):
        config = PipelineConfig(
            horizon_weeks=1,
            arrivals=Arrivals("deterministic", 40),
            stages={"validation": StageConfig(ServiceTime.fixed(1), 10, RATE)},
            queue_discipline="severity_priority",
            severity_mix={"high": Fraction(1, 4), "moderate": Fraction(1, 4), "low": Fraction(1, 2)},
        )
        assert simulate(config).stage("validation").items_out == 10


class TestConfigValidation:
    def test_bad_inputs(self):
        with pytest.raises(ValueError):
            PipelineConfig(horizon_weeks=0, arrivals=Arrivals())
        with pytest.raises(ValueError):
            PipelineConfig(horizon_weeks=1, arrivals=Arrivals(), queue_discipline="severity_priority")
        with pytest.raises(ValueError):
            PipelineConfig(horizon_weeks=1, arrivals=Arrivals(), severity_mix={"high": Fraction(1, 2)})
        with pytest.raises(ValueError):
            PipelineConfig(horizon_weeks=1, arrivals=Arrivals(), stages={"qa": StageConfig()})
        with pytest.raises(ValueError):
            Arrivals("bursty", 1)
        with pytest.raises(ValueError):
            ServiceTime(Interval(1, 2, "hours"), "point")
        with pytest.raises(ValueError):
            StageConfig(weekly_capacity_hours=-1)

    def test_digest_tracks_config(self):
        assert capacity_case().digest() == capacity_case().digest()
        assert capacity_case().digest() != capacity_case(cap=6).digest()

    def test_bottleneck_rejects_foreign_result(self):
        with pytest.raises(ValueError):
            bottleneck_report(simulate(capacity_case()), capacity_case(cap=6))


class TestStochastic:
    def test_reproducible(self):
        assert simulate(thinned_case(5)) == simulate(thinned_case(5))

    def test_sweep_matches_serial_and_is_worker_independent(self):
        serial = [simulate(thinned_case(s)) for s in range(20)]
        assert sweep(thinned_case(), range(20)) == serial
        assert sweep(thinned_case(), range(20), workers=4) == serial

    def test_thinned_mean_near_expected(self):
        shipped = [r.accepted_fixes_shipped for r in sweep(thinned_case(), range(300))]
        assert abs(np.mean(shipped) - 22) < 22 * 0.1

    def test_distributed_service_cost_is_exact_sum(self):
        config = PipelineConfig(
            horizon_weeks=2,
            arrivals=Arrivals("poisson", 20),
            seed=11,
            stages={"validation": StageConfig(ServiceTime(Interval(1, 3, "hours"), "uniform"), 30, RATE)},
        )
        r = simulate(config)
        assert r.total_cost.c_v.micros > 0
        assert r.total_cost.c_v.usd <= r.stage("validation").served * 3 * 100


@settings(max_examples=40, deadline=None)
@given(pipeline_configs())
def test_conservation(config):
    r = simulate(config)
    upstream_out = None
    for s in r.stages:
        assert s.items_in == s.items_out + s.items_dropped_by_thinning + s.end_backlog
        if upstream_out is not None:
            assert s.items_in == upstream_out
        upstream_out = s.items_out
        if s.stage not in ("validation", "impact"):
            assert s.items_dropped_by_thinning == 0
        if s.utilization is not None:
            assert 0 <= s.utilization <= 1 + 1e-12
