#!/usr/bin/env python3
"""
🧪 预算约束下的贪心背包订货策略测试
"""

import os
import sys

import numpy as np
import pytest

# 添加项目路径
sys.path.insert(0, os.path.join(os.path.dirname(__file__), "src"))

from robust_newsvendor.core.knapsack import (
    Instance,
    Item,
    budget_breakpoints,
    build_coefficients,
    build_ranked_list,
    evaluate_lower,
    evaluate_upper,
    knapsack_allocate,
    lower_bound_policy,
    lower_coefficients,
    performance_interval,
)
from robust_newsvendor.core.moments import MomentSpec
from robust_newsvendor.core.single_item import ItemEconomics, robust_single_quantity
from robust_newsvendor.errors import MissingParameterError
from robust_newsvendor.evaluation.ground_truth import GroundTruthDistribution, item_cost, make_rng, true_cost
from robust_newsvendor.evaluation.policies import random_instance
from robust_newsvendor.lp.epigraph import LinearRows, pwl_epigraph, solve_epigraph

STANDARD = MomentSpec(10, 30, 50, 10, beta=0.5)


def two_item(budget=45.0):
    return Instance((Item(ItemEconomics(1, 1), STANDARD), Item(ItemEconomics(2, 1), STANDARD)), budget)


def lp_value(pwls, budget):
    result = solve_epigraph(pwl_epigraph(pwls, LinearRows.budget(pwls, budget)))
    assert result.solution.optimal
    return result.objective


def test_build_coefficients():
    inst = Instance((Item(ItemEconomics(1, 1), STANDARD),) * 2, 10.0)
    pwls = build_coefficients(inst)
    assert len(pwls) == 2
    for pwl in pwls:
        assert pwl.slopes == pytest.approx((-1, -0.5, 0.5))
    assert build_coefficients(Instance((), 0.0)) == []


def test_ranked_list_order():
    ranked = build_ranked_list(two_item())
    assert [(e.item, e.piece) for e in ranked] == [(1, 0), (1, 1), (0, 0), (0, 1)]
    assert [e.ratio for e in ranked] == pytest.approx([-2, -1.25, -1, -0.5])
    assert [e.capacity for e in ranked] == pytest.approx([10, 20, 10, 20])


def test_ranked_list_low_markup_keeps_first_piece_only():
    inst = Instance(tuple(Item(ItemEconomics(m, 0.8), STANDARD) for m in (0.05, 0.1, 0.2)), 0.0)
    assert {e.piece for e in build_ranked_list(inst)} == {0}


def test_ranked_list_zero_mad():
    inst = Instance((Item(ItemEconomics(1.5, 1), MomentSpec(10, 30, 50, 0)),), 0.0)
    ranked = build_ranked_list(inst)
    assert all(e.ratio == pytest.approx(-1.5) for e in ranked)
    assert sum(e.capacity for e in ranked) == pytest.approx(30)


def test_allocate_two_items():
    policy = knapsack_allocate(two_item(45))
    assert policy.q == pytest.approx((15, 30))
    assert policy.spent == pytest.approx(45)
    assert policy.objective == pytest.approx(17.5 + 15)
    assert policy.provenance == "robust-upper"
    assert policy.objective == pytest.approx(lp_value(build_coefficients(two_item()), 45), abs=1e-8)


def test_allocate_zero_budget():
    policy = knapsack_allocate(two_item(0))
    assert policy.q == (0.0, 0.0)
    assert policy.objective == pytest.approx(30 + 60)


def test_allocate_slack_budget_matches_single_item_rule():
    inst = two_item(1e6)
    policy = knapsack_allocate(inst)
    for item, q in zip(inst.items, policy.q):
        assert q == robust_single_quantity(item.econ, item.spec).q


def test_flat_middle_piece_stays_at_left_knot():
    # m = delta * d / (2 (mu - a) - delta) zeroes the slope on [a, mu] up to rounding
    spec = MomentSpec(10, 30, 50, 10)
    for d in np.linspace(0.1, 1.0, 400):
        econ = ItemEconomics(10 * d / (2 * 20 - 10), d)
        policy = knapsack_allocate(Instance((Item(econ, spec),), 1e6))
        expected = robust_single_quantity(econ, spec)
        assert expected.interval == pytest.approx((10, 30))
        assert policy.q[0] == expected.q == 10
        assert policy.spent == pytest.approx(10)


def test_knapsack_matches_simplex_on_random_instances():
    rng = make_rng(99)
    for k in range(200):
        n = int(rng.integers(1, 21))
        inst, _ = random_instance(seed=1000 + k, n=n)
        policy = knapsack_allocate(inst)
        assert policy.spent <= inst.budget + 1e-9
        oracle = lp_value(build_coefficients(inst), inst.budget)
        assert policy.objective == pytest.approx(oracle, rel=1e-10, abs=1e-8)
        assert evaluate_upper(inst, policy.q) == pytest.approx(policy.objective, abs=1e-9)


def _budget_consistency(inst, grid):
    ranked = build_ranked_list(inst)
    breaks = budget_breakpoints(ranked)
    prev = None
    for budget in grid:
        q = np.array(knapsack_allocate(inst.with_budget(budget)).q)
        assert build_ranked_list(inst.with_budget(budget)) == ranked
        if prev is not None:
            assert np.all(q >= prev[1])
            # items whose every ranked piece was lifted at the smaller budget do not move
            lifted = {e.item for e, cum in zip(ranked, breaks) if cum <= prev[0]}
            pending = {e.item for e, cum in zip(ranked, breaks) if cum > prev[0]}
            for i in lifted - pending:
                assert q[i] == prev[1][i]
        prev = (budget, q)


def test_budget_consistency_five_identical_items():
    spec = MomentSpec(10, 30, 50, 10)
    inst = Instance(tuple(Item(ItemEconomics(m, 1), spec) for m in (0.5, 1, 1.5, 2, 2.5)), 0.0)
    total = budget_breakpoints(build_ranked_list(inst))[-1]
    _budget_consistency(inst, np.linspace(0, total * 1.1, 101))


def test_budget_consistency_random():
    for k in range(50):
        inst, _ = random_instance(seed=5000 + k, n=6)
        total = sum(it.econ.c * it.spec.b for it in inst.items)
        _budget_consistency(inst, np.linspace(0, total, 101))


def test_value_nonincreasing_and_convex_in_budget():
    inst, _ = random_instance(seed=77, n=8)
    total = sum(it.econ.c * it.spec.b for it in inst.items)
    values = np.array([knapsack_allocate(inst.with_budget(b)).objective for b in np.linspace(0, total, 101)])
    steps = np.diff(values)
    assert np.all(steps <= 1e-9)
    assert np.all(np.diff(steps) >= -1e-8)


def test_pieces_appear_in_order_per_item():
    for k in range(30):
        inst, _ = random_instance(seed=300 + k, n=10)
        seen = {}
        for entry in build_ranked_list(inst):
            assert entry.piece == seen.get(entry.item, -1) + 1
            seen[entry.item] = entry.piece


def test_lower_bound_policy():
    inst = Instance((Item(ItemEconomics(1, 0.8), STANDARD),), 1e6)
    policy = lower_bound_policy(inst)
    assert policy.q[0] in (20.0, 40.0)
    assert policy.objective == pytest.approx(lp_value(lower_coefficients(inst), 1e6), abs=1e-9)

    zero = lower_bound_policy(two_item(0))
    assert zero.q == (0.0, 0.0)
    assert zero.objective == pytest.approx(1 * 30 + 2 * 30)

    point = lower_bound_policy(Instance((Item(ItemEconomics(1, 0.8), MomentSpec(10, 30, 50, 0, beta=0.5)),), 100))
    assert point.q == pytest.approx((30,))
    assert point.objective == pytest.approx(0, abs=1e-12)


def test_lower_bound_requires_beta():
    inst = Instance((Item(ItemEconomics(1, 1), MomentSpec(10, 30, 50, 10)),), 10)
    with pytest.raises(MissingParameterError, match="beta required for lower bound"):
        lower_bound_policy(inst)


def test_lower_below_upper_at_random_orders():
    rng = make_rng(3)
    inst = two_item()
    for _ in range(100):
        q = rng.uniform(0, 50, size=2)
        assert evaluate_lower(inst, q) <= evaluate_upper(inst, q) + 1e-12


def test_upper_at_mean():
    inst = Instance((Item(ItemEconomics(1, 0.8), STANDARD),), 100)
    assert evaluate_upper(inst, [30]) == pytest.approx(9)


def test_performance_interval():
    flat = Instance((Item(ItemEconomics(1, 1), MomentSpec(10, 30, 50, 0, beta=0.5)),) * 2, 1e6)
    assert performance_interval(flat) == pytest.approx((0, 0), abs=1e-12)

    inst = two_item(45)
    lower, upper = performance_interval(inst)
    assert lower <= upper
    assert upper == pytest.approx(lp_value(build_coefficients(inst), 45), abs=1e-8)
    assert lower == pytest.approx(lp_value(lower_coefficients(inst), 45), abs=1e-8)


def test_interval_contains_triangular_truth():
    truth = GroundTruthDistribution.triangular(10, 50, 30)
    econ = [ItemEconomics(1, 1), ItemEconomics(2, 1)]
    inst = Instance(tuple(Item(e, truth.moment_spec()) for e in econ), 45)
    lo = lower_bound_policy(inst)
    hi = knapsack_allocate(inst)
    assert lo.objective <= true_cost(econ, [truth] * 2, hi.q) + 1e-9
    assert true_cost(econ, [truth] * 2, hi.q) <= hi.objective + 1e-9


def test_two_item_triangular_sandwich_on_grid():
    truth = GroundTruthDistribution.triangular(10, 50, 30)
    econ = [ItemEconomics(1, 1), ItemEconomics(2, 1)]
    inst = Instance(tuple(Item(e, truth.moment_spec()) for e in econ), 45)
    grid = np.linspace(0, 50, 101)
    upper = [np.array([pwl.evaluate(q) for q in grid]) for pwl in build_coefficients(inst)]
    lower = [np.array([pwl.evaluate(q) for q in grid]) for pwl in lower_coefficients(inst)]
    true = [np.array([item_cost(e, truth, q) for q in grid]) for e in econ]

    total_upper = upper[0][:, None] + upper[1][None, :]
    total_lower = lower[0][:, None] + lower[1][None, :]
    total_true = true[0][:, None] + true[1][None, :]
    assert np.all(total_lower <= total_true + 1e-9)
    assert np.all(total_true <= total_upper + 1e-9)

    rng = make_rng(21)
    for i, j in rng.integers(0, 101, size=(25, 2)):
        q = [grid[i], grid[j]]
        assert evaluate_upper(inst, q) == pytest.approx(total_upper[i, j], abs=1e-9)
        assert evaluate_lower(inst, q) == pytest.approx(total_lower[i, j], abs=1e-9)
        assert true_cost(econ, [truth] * 2, q) == pytest.approx(total_true[i, j], abs=1e-9)


def main():
    tests = [(name, fn) for name, fn in globals().items() if name.startswith("test_") and callable(fn)]
    failed = 0
    for name, fn in tests:
        try:
            fn()
            print(f"✅ {name}")
        except Exception as e:
            failed += 1
            print(f"❌ {name}: {e}")
    print(f"\n{len(tests) - failed}/{len(tests)} passed")
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
