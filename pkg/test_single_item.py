#!/usr/bin/env python3
"""
🧪 单商品报童模型测试
"""

import math
import os
import sys

import numpy as np
import pytest

# 添加项目路径
sys.path.insert(0, os.path.join(os.path.dirname(__file__), "src"))

from robust_newsvendor.core.moments import DiscreteDistribution, MomentSpec, worst_case_three_point
from robust_newsvendor.core.single_item import (
    ItemEconomics,
    best_case_cost,
    classical_optimal_quantity,
    expected_cost,
    pwl_pieces,
    robust_single_quantity,
    scarf_cost,
    scarf_quantity,
    worst_case_cost,
)
from robust_newsvendor.evaluation.ground_truth import DEMAND_CASES, GroundTruthDistribution, item_cost, make_rng

STANDARD = MomentSpec(10, 30, 50, 10)


def test_economics_derived_prices():
    econ = ItemEconomics(m=0.5, d=0.25, c=2.0)
    assert econ.p == pytest.approx(3.0)
    assert econ.s == pytest.approx(1.5)
    with pytest.raises(ValueError):
        ItemEconomics(m=0.0, d=1.0)


def test_pwl_slopes():
    assert pwl_pieces(ItemEconomics(1, 1), STANDARD).slopes == pytest.approx((-1, -0.5, 0.5))
    assert pwl_pieces(ItemEconomics(2, 1), STANDARD).slopes == pytest.approx((-2, -1.25, 0.25))


def test_pwl_scales_with_c():
    one = pwl_pieces(ItemEconomics(1, 1, 1), STANDARD)
    two = pwl_pieces(ItemEconomics(1, 1, 2), STANDARD)
    assert two.slopes == pytest.approx(tuple(2 * s for s in one.slopes))
    assert two.intercepts == pytest.approx(tuple(2 * v for v in one.intercepts))


def test_pwl_convex_and_continuous():
    pwl = pwl_pieces(ItemEconomics(1, 0.8), STANDARD)
    assert pwl.is_convex()
    assert pwl.slopes[0] == pytest.approx(-1)
    for j, knot in enumerate(pwl.knots[:-1]):
        left = pwl.slopes[j] * knot + pwl.intercepts[j]
        right = pwl.slopes[j + 1] * knot + pwl.intercepts[j + 1]
        assert left == pytest.approx(right, abs=1e-9)


def test_worst_case_cost_examples():
    econ = ItemEconomics(1, 0.8)
    assert worst_case_cost(econ, STANDARD, 30) == pytest.approx(9)
    assert worst_case_cost(econ, STANDARD, 10) == pytest.approx(20)
    assert worst_case_cost(econ, MomentSpec(10, 30, 50, 0), 30) == pytest.approx(0, abs=1e-12)


def test_worst_case_cost_matches_expectation_on_grid():
    rng = make_rng(11)
    for _ in range(20):
        a = rng.uniform(0, 20)
        b = a + rng.uniform(5, 60)
        mu = rng.uniform(a, b)
        delta = rng.uniform(0, 1) * 2 * (b - mu) * (mu - a) / (b - a)
        spec = MomentSpec(a, mu, b, delta)
        econ = ItemEconomics(rng.uniform(0.1, 5), rng.uniform(0.1, 1), rng.uniform(0.5, 2))
        pwl = pwl_pieces(econ, spec)
        dist = worst_case_three_point(spec)
        for q in np.linspace(0, b, 1001):
            assert pwl.evaluate(q) == pytest.approx(expected_cost(econ, dist, q), abs=1e-9)


def test_cost_extends_beyond_b_with_overage_slope():
    econ = ItemEconomics(1, 0.8)
    base = worst_case_cost(econ, STANDARD, 50)
    assert worst_case_cost(econ, STANDARD, 60) == pytest.approx(base + 0.8 * 10)


def test_touching_property_uniform_and_triangular():
    # uniform cases 1-3, triangular cases 7-9
    for case in (1, 2, 3, 7, 8, 9):
        truth = DEMAND_CASES[case]
        spec = truth.moment_spec()
        for econ in (ItemEconomics(1, 0.8), ItemEconomics(0.3, 1.0, 2.0), ItemEconomics(4.0, 0.5)):
            for q in (spec.a, spec.mu, spec.b):
                gap = abs(worst_case_cost(econ, spec, q) - item_cost(econ, truth, q))
                assert gap <= 1e-9, f"case {case}, q={q}: gap {gap:.3g}"


def test_upper_bounds_true_cost_for_every_family():
    econ = ItemEconomics(1.5, 0.6)
    for truth in DEMAND_CASES.values():
        spec = truth.moment_spec()
        for q in np.linspace(0, spec.b, 201):
            true = item_cost(econ, truth, q)
            assert worst_case_cost(econ, spec, q) >= true - 1e-9
            assert best_case_cost(econ, spec, q) <= true + 1e-9


def test_classical_quantity():
    uniform01 = GroundTruthDistribution.uniform(0, 1)
    assert classical_optimal_quantity(ItemEconomics(1, 1), uniform01.cdf, (0, 1)) == pytest.approx(0.5, abs=1e-9)
    u = GroundTruthDistribution.uniform(10, 50)
    q = classical_optimal_quantity(ItemEconomics(1, 0.8), u.cdf, (10, 50))
    assert q == pytest.approx(10 + 40 / 1.8, abs=1e-9)
    point = GroundTruthDistribution.discrete([30], [1])
    assert classical_optimal_quantity(ItemEconomics(3, 0.2), point.cdf, (30, 30)) == 30


def test_classical_quantity_unreachable_ratio():
    assert classical_optimal_quantity(ItemEconomics(1, 1), lambda x: 0.3, (0, 5)) == 5


def test_robust_quantity_examples():
    spec = GroundTruthDistribution.beta(1, 1).moment_spec(with_beta=False, with_sigma=False)
    assert spec.mu == pytest.approx(0.5) and spec.delta == pytest.approx(0.25)
    assert robust_single_quantity(ItemEconomics(1, 0.8), spec).q == pytest.approx(0.5)
    assert robust_single_quantity(ItemEconomics(3, 0.8), spec).q == pytest.approx(1.0)
    assert robust_single_quantity(ItemEconomics(0.1, 0.8), STANDARD).q == 10


def test_robust_quantity_flat_piece_reports_interval():
    # alpha_1 = 10(m+1)/40 - m = 0 at m = 1/3
    res = robust_single_quantity(ItemEconomics(1 / 3, 1), STANDARD)
    assert res.q == 10
    assert res.interval == (10, 30)
    assert not res.unique


def test_robust_quantity_agrees_with_breakpoint_argmin():
    rng = make_rng(2024)
    for _ in range(1000):
        a = rng.uniform(0, 30)
        b = a + rng.uniform(1, 100)
        mu = rng.uniform(a, b)
        delta = rng.uniform(0, 1) * 2 * (b - mu) * (mu - a) / (b - a)
        spec = MomentSpec(a, mu, b, delta)
        econ = ItemEconomics(rng.uniform(0.05, 10), rng.uniform(0.05, 1), rng.uniform(0.5, 3))
        costs = {x: worst_case_cost(econ, spec, x) for x in (a, mu, b)}
        best = min(costs.values())
        res = robust_single_quantity(econ, spec)
        assert res.q in costs
        assert costs[res.q] == pytest.approx(best, abs=1e-9 * max(1.0, abs(best)))
        assert res.interval[0] <= res.q <= res.interval[1]


def test_scarf_quantity():
    assert scarf_quantity(ItemEconomics(2, 2), 30, 10) == pytest.approx(30)
    sigma = 40 / math.sqrt(12)
    q = scarf_quantity(ItemEconomics(1, 0.8), 30, sigma)
    assert q == pytest.approx(30 + sigma / 2 * (math.sqrt(1.25) - math.sqrt(0.8)))
    assert q == pytest.approx(31.291, abs=1e-3)
    assert scarf_quantity(ItemEconomics(1, 0.8), 30, 0) == 30
    assert scarf_cost(ItemEconomics(1, 0.8), 30, 0, 30) == pytest.approx(0)


def test_scarf_quantity_clamped():
    assert scarf_quantity(ItemEconomics(0.01, 1), 1, 10) == 0.0


def test_scarf_cost_bounds_two_point_laws():
    econ = ItemEconomics(1.3, 0.7)
    mu, sigma = 30, 8
    for beta in (0.1, 0.3, 0.5, 0.8):
        lo = mu - sigma * math.sqrt(beta / (1 - beta))
        hi = mu + sigma * math.sqrt((1 - beta) / beta)
        dist = DiscreteDistribution((lo, hi), (1 - beta, beta))
        for q in np.linspace(0, 60, 121):
            assert scarf_cost(econ, mu, sigma, q) >= expected_cost(econ, dist, q) - 1e-9


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
