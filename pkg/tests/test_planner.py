from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from src.exceptions import UsageError
from src.planner import (
    MB,
    BudgetOverflowError,
    StrategyCosts,
    StrategyFormatError,
    best_strategy,
    brats_strategies,
    crossover_budget,
    export_size,
    fl_budget_check,
    lits_strategies,
    load_strategies,
    max_images,
    plan_export,
    table4_reproduction,
    with_preshared_decoder,
    with_quantized_decoder,
)

costs_strategy = st.builds(
    StrategyCosts,
    name=st.just("s"),
    fixed_bytes=st.integers(0, 10**12),
    per_image_bytes=st.integers(1, 10**9),
)


class TestArithmetic:
    def test_export_size(self):
        costs = StrategyCosts("x", fixed_bytes=100, per_image_bytes=7)
        assert export_size(costs, 0) == 100
        assert export_size(costs, 3) == 121

    def test_export_size_overflow(self):
        costs = StrategyCosts("x", fixed_bytes=1, per_image_bytes=2**63)
        with pytest.raises(BudgetOverflowError):
            export_size(costs, 2)

    def test_fixed_over_budget(self):
        costs = StrategyCosts("x", fixed_bytes=100, per_image_bytes=1)
        assert max_images(costs, 99) == 0
        plan = plan_export(costs, 99)
        assert not plan.feasible and plan.n_images == 0

    @given(costs_strategy, st.integers(0, 10**13))
    def test_max_images_is_tight(self, costs, budget):
        n = max_images(costs, budget)
        if budget >= costs.fixed_bytes:
            assert export_size(costs, n) <= budget < export_size(costs, n + 1)
        else:
            assert n == 0

    @given(costs_strategy, st.integers(0, 10**13), st.integers(0, 10**12))
    def test_max_images_is_monotone(self, costs, budget, extra):
        assert max_images(costs, budget) <= max_images(costs, budget + extra)

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"fixed_bytes": 0, "per_image_bytes": 0},
            {"fixed_bytes": -1, "per_image_bytes": 1},
            {"fixed_bytes": 5, "per_image_bytes": 1, "decoder_bytes": 6},
        ],
    )
    def test_invalid_costs(self, kwargs):
        with pytest.raises(UsageError):
            StrategyCosts("bad", **kwargs)


class TestBestStrategy:
    def test_most_images_wins(self):
        cheap = StrategyCosts("cheap", fixed_bytes=0, per_image_bytes=10)
        dear = StrategyCosts("dear", fixed_bytes=0, per_image_bytes=20)
        assert best_strategy([dear, cheap], 100).strategy == "cheap"

    def test_tie_goes_to_smaller_export_then_order(self):
        a = StrategyCosts("a", fixed_bytes=10, per_image_bytes=30)
        b = StrategyCosts("b", fixed_bytes=0, per_image_bytes=30)
        c = StrategyCosts("c", fixed_bytes=0, per_image_bytes=30)
        assert best_strategy([a, b, c], 100).strategy == "b"
        assert best_strategy([c, b], 100).strategy == "c"

    def test_nothing_feasible(self):
        plan = best_strategy([StrategyCosts("x", fixed_bytes=1000, per_image_bytes=1)], 10)
        assert plan.strategy == "none"
        assert not plan.feasible

    def test_empty_list(self):
        with pytest.raises(UsageError):
            best_strategy([], 10)

    def test_brats_crossover(self):
        high, zipped = brats_strategies()
        crossover = crossover_budget(high, zipped)
        assert float(crossover) / MB == pytest.approx(974.82, abs=0.01)
        assert best_strategy([high, zipped], 900 * MB).strategy == "brats-zip"
        assert best_strategy([high, zipped], 1100 * MB).strategy == "brats-high"

    def test_parallel_strategies_never_cross(self):
        a = StrategyCosts("a", fixed_bytes=0, per_image_bytes=5)
        assert crossover_budget(a, a) is None

    def test_crossover_is_exact(self):
        a = StrategyCosts("a", fixed_bytes=10, per_image_bytes=3)
        b = StrategyCosts("b", fixed_bytes=0, per_image_bytes=4)
        assert crossover_budget(a, b) == Fraction(40, 1)


class TestTable4:
    def test_reproduction(self):
        rows = {row.dataset: row.as_tuple() for row in table4_reproduction()}
        assert rows["LiTS"] == (598, 601, 2800, 828, 13466)
        assert rows["BraTS"] == (598, 601, 692, None, 260)

    def test_lits_per_image_sizes(self):
        high, low, zipped = lits_strategies()
        assert (high.per_image_bytes, low.per_image_bytes) == (21_990_000, 2_270_000)
        assert zipped.fixed_bytes == 66 * MB and not zipped.decoder_required

    def test_fl_budget_check(self):
        check = fl_budget_check()
        assert check["images"] == 42
        assert check["claimed_images"] == 50
        assert check["bytes_for_claimed"] == 116_500_000


class TestVariants:
    def test_quantized_decoder(self):
        _, low, _ = lits_strategies()
        quantized = with_quantized_decoder(low, 8)
        assert quantized.decoder_bytes == 598 * MB // 4
        assert quantized.fixed_bytes == 598 * MB // 4 + 3 * MB
        assert max_images(quantized, 1000 * MB) > max_images(low, 1000 * MB)

    def test_quantized_bits_range(self):
        with pytest.raises(UsageError):
            with_quantized_decoder(lits_strategies()[0], 0)

    def test_preshared_decoder(self):
        _, low, _ = lits_strategies()
        shared = with_preshared_decoder(low)
        assert shared.fixed_bytes == 3 * MB
        assert max_images(shared, 100 * MB) == 42


class TestLoading:
    def test_load_strategies(self):
        strategies = load_strategies(
            [
                {"name": "a", "fixed_bytes": 1, "per_image_bytes": 2},
                {"name": "b", "fixed_bytes": 3, "per_image_bytes": 4, "decoder_required": True, "decoder_bytes": 3},
            ]
        )
        assert [s.name for s in strategies] == ["a", "b"]
        assert strategies[1].decoder_required

    @pytest.mark.parametrize("payload", [{"name": "a"}, [{"name": "a"}], [{"name": "a", "fixed_bytes": "x", "per_image_bytes": 1}]])
    def test_malformed(self, payload):
        with pytest.raises(StrategyFormatError):
            load_strategies(payload)

    def test_dict_round_trip(self):
        costs = lits_strategies()[0]
        assert StrategyCosts.from_dict(costs.to_dict()) == costs
