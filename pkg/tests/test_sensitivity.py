from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bugonomics.core import Interval, money_from_usd
from bugonomics.sensitivity import (
    FORMULAS,
    IntervalDivisionError,
    UncertainParam,
    analyze,
    draw_samples,
    interval_add,
    interval_div,
    interval_mul,
    interval_scale,
    lift_cost_model,
    monte_carlo,
)

H = Interval(Fraction(1, 2), 2, "hours")
W = Interval(100, 250, "rate")


def validation_params(n=112):
    return {"item_count": n, "hours_per_item": H, "rate": W}


class TestIntervalOps:
    def test_add_mul(self):
        assert interval_add(Interval(1, 2, "money"), Interval(3, 4, "money")) == Interval(4, 6, "money")
        assert interval_mul(H, W) == Interval(50, 500, "money")

    def test_add_needs_matching_units(self):
        with pytest.raises(ValueError):
            interval_add(Interval(1, 2, "money"), Interval(1, 2, "hours"))

    def test_div(self):
        assert interval_div(Interval(5600, 56000, "money"), Interval.point(22)) == Interval(
            Fraction(5600, 22), Fraction(56000, 22), "money"
        )

    def test_div_by_zero_interval(self):
        with pytest.raises(IntervalDivisionError, match="division by interval containing zero"):
            interval_div(Interval(1, 2, "money"), Interval(0, 3))

    def test_scale(self):
        assert interval_scale(Interval(1, 2, "money"), 3) == Interval(3, 6, "money")

    @given(
        st.fractions(0, 100), st.fractions(0, 100), st.fractions(0, 100), st.fractions(0, 100),
        st.fractions(0, 1), st.fractions(0, 1),
    )
    def test_mul_contains_every_product(self, a, b, c, d, s, t):
        x = Interval(min(a, b), max(a, b), "hours")
        y = Interval(min(c, d), max(c, d), "rate")
        px = x.lo + s * x.width
        py = y.lo + t * y.width
        assert px * py in interval_mul(x, y)


class TestLift:
    def test_validation_band(self):
        assert lift_cost_model("stage_cost", validation_params()) == Interval(5600, 56000, "money")

    def test_amortized_bands(self):
        band = lift_cost_model(
            "cost_per_validated_finding",
            {"c_g": 0, "c_v": Interval(5600, 56000, "money"), "n_c": 22, "pi_s": 1},
        )
        assert band == Interval(Fraction(5600, 22), Fraction(56000, 22), "money")
        band = lift_cost_model(
            "cost_per_validated_finding",
            {"c_g": 0, "c_v": Interval(5600, 56000, "money"), "n_c": 14, "pi_s": 1},
        )
        assert band == Interval(400, 4000, "money")

    def test_generation_band(self):
        band = lift_cost_model(
            "cost_per_validated_finding",
            {"c_g": Interval(5000, 20000, "money"), "c_v": 0, "n_c": 112, "pi_s": Fraction(22, 112)},
        )
        assert band == Interval(Fraction(5000, 22), Fraction(20000, 22), "money")

    def test_point_inputs_match_scalar_engine(self):
        band = lift_cost_model("stage_cost", {"item_count": 112, "hours_per_item": Interval.point("0.5", "hours"),
                                              "rate": money_from_usd("100")})
        assert band == Interval.point(5600, "money")

    def test_unit_mismatch(self):
        with pytest.raises(ValueError, match="expected unit"):
            lift_cost_model("stage_cost", {"item_count": 1, "hours_per_item": W, "rate": W})

    def test_missing_param(self):
        with pytest.raises(ValueError, match="missing"):
            lift_cost_model("stage_cost", {"item_count": 1})

    def test_denominator_interval_with_zero(self):
        with pytest.raises(IntervalDivisionError):
            lift_cost_model(
                "cost_per_validated_finding",
                {"c_g": 1, "c_v": 0, "n_c": Interval(0, 10), "pi_s": 1},
            )

    def test_every_formula_lifts_points_exactly(self):
        for name, formula in FORMULAS.items():
            params = {p: Interval.point(1, unit) for p, unit in formula.params}
            band = lift_cost_model(name, params)
            assert band.is_point


class TestMonteCarlo:
    def test_reproducible(self):
        a = monte_carlo(validation_params(), "stage_cost", 5000, seed=3)
        b = monte_carlo(validation_params(), "stage_cost", 5000, seed=3)
        assert a == b

    def test_workers_do_not_change_samples(self):
        base = draw_samples(validation_params(), "stage_cost", 20_001, seed=9)
        for workers in (2, 3, 8):
            assert (draw_samples(validation_params(), "stage_cost", 20_001, seed=9, workers=workers) == base).all()

    def test_seed_changes_samples(self):
        a = monte_carlo(validation_params(), "stage_cost", 1000, seed=1)
        b = monte_carlo(validation_params(), "stage_cost", 1000, seed=2)
        assert a.mean != b.mean

    def test_triangular_respects_bounds(self):
        params = {
            "item_count": 112,
            "hours_per_item": UncertainParam("hours_per_item", H, "triangular", Fraction(1)),
            "rate": W,
        }
        r = analyze(params, "stage_cost", 5000, seed=4)
        assert r.samples_outside == 0
        assert r.summary.within(r.lifted)

    @pytest.mark.parametrize("n", [0, -3])
    def test_bad_sample_count(self, n):
        with pytest.raises(ValueError):
            monte_carlo(validation_params(), "stage_cost", n)

    def test_bad_param(self):
        with pytest.raises(ValueError):
            UncertainParam("x", H, "triangular", Fraction(5))
        with pytest.raises(ValueError):
            UncertainParam("x", H, "lognormal")

    @settings(max_examples=25, deadline=None)
    @given(
        st.fractions(0, 10, max_denominator=8), st.fractions(0, 10, max_denominator=8),
        st.fractions(0, 300, max_denominator=4), st.fractions(0, 300, max_denominator=4),
        st.integers(0, 2**32),
    )
    def test_samples_inside_lifted_range(self, h1, h2, w1, w2, seed):
        params = {
            "item_count": Interval(1, 200),
            "hours_per_item": Interval(min(h1, h2), max(h1, h2), "hours"),
            "rate": Interval(min(w1, w2), max(w1, w2), "rate"),
        }
        r = analyze(params, "stage_cost", 2000, seed=seed)
        assert r.samples_outside == 0
