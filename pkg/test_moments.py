#!/usr/bin/env python3
"""
🧪 矩信息与极值分布测试

校验 MomentSpec 可行性检查、最坏/最好情形分布以及各分布族的 MAD 公式
"""

import math
import os
import sys

import numpy as np
import pytest

# 添加项目路径
sys.path.insert(0, os.path.join(os.path.dirname(__file__), "src"))

from robust_newsvendor.core.moments import (
    DiscreteDistribution,
    MomentSpec,
    best_case_two_point,
    discrete_moments,
    em_two_point,
    mad_of_named_distribution,
    mad_variance_bounds,
    validate_moment_spec,
    worst_case_three_point,
)
from robust_newsvendor.errors import InfeasibleMomentsError, MissingParameterError
from robust_newsvendor.evaluation.ground_truth import make_rng
from robust_newsvendor.lp.simplex import EQ, LinearProgram, solve_lp


def _random_spec(rng):
    a = rng.uniform(0, 20)
    b = a + rng.uniform(1, 80)
    mu = rng.uniform(a, b)
    delta = rng.uniform(0, 1) * 2 * (b - mu) * (mu - a) / (b - a)
    return MomentSpec(a, mu, b, delta)


def test_validate_ok():
    assert validate_moment_spec(MomentSpec(10, 30, 50, 10)).ok
    assert validate_moment_spec(MomentSpec(0, 0, 0, 0)).ok


def test_validate_delta_bound():
    report = validate_moment_spec(MomentSpec(10, 30, 50, 25))
    assert not report.ok
    assert any("delta exceeds 2(b−μ)(μ−a)/(b−a)=20" in v for v in report.violations)


def test_validate_reports_every_violation():
    report = validate_moment_spec(MomentSpec(-1, 60, 50, -2, beta=1.5, sigma=0.5))
    assert len(report.violations) >= 4


def test_validate_beta_and_sigma():
    assert validate_moment_spec(MomentSpec(10, 30, 50, 10, beta=0.5, sigma=40 / math.sqrt(12))).ok
    assert not validate_moment_spec(MomentSpec(10, 30, 50, 10, beta=0.2)).ok  # below 10/40
    assert not validate_moment_spec(MomentSpec(10, 30, 50, 10, sigma=5)).ok  # delta > sigma


def test_validate_flags_delta_at_bound():
    report = validate_moment_spec(MomentSpec(10, 30, 50, 20))
    assert report.ok
    assert report.notes


def test_worst_case_three_point_standard():
    dist = worst_case_three_point(MomentSpec(10, 30, 50, 10))
    assert dist.points == (10.0, 30.0, 50.0)
    assert dist.probs == pytest.approx((0.25, 0.5, 0.25), abs=1e-15)


def test_worst_case_three_point_zero_mad():
    dist = worst_case_three_point(MomentSpec(10, 30, 50, 0))
    assert dist.points == (30.0,)
    assert dist.probs == (1.0,)


def test_worst_case_three_point_uniform_unit():
    dist = worst_case_three_point(MomentSpec(0, 0.5, 1, 0.25))
    assert dist.points == (0.0, 0.5, 1.0)
    assert dist.probs == pytest.approx((0.25, 0.5, 0.25), abs=1e-15)


def test_worst_case_drops_mean_point_at_bound():
    dist = worst_case_three_point(MomentSpec(10, 30, 50, 20))
    assert dist.points == (10.0, 50.0)


def test_worst_case_invalid_raises():
    with pytest.raises(InfeasibleMomentsError, match="infeasible moments"):
        worst_case_three_point(MomentSpec(10, 30, 50, 25))


def test_worst_case_moments_exact():
    rng = make_rng(7)
    for _ in range(200):
        spec = _random_spec(rng)
        mom = discrete_moments(worst_case_three_point(spec))
        assert mom.mean == pytest.approx(spec.mu, abs=1e-12 * max(1.0, spec.b))
        assert mom.mad == pytest.approx(spec.delta, abs=1e-12 * max(1.0, spec.b))


def test_worst_case_independent_of_q():
    """Maximizing E(D-q)^+ over a fine support grid recovers the three-point law for every q"""
    spec = MomentSpec(10, 30, 50, 10)
    grid = np.linspace(spec.a, spec.b, 81)
    dist = worst_case_three_point(spec)
    for q in (spec.a, (spec.a + spec.mu) / 2, spec.mu, (spec.mu + spec.b) / 2, spec.b):
        lp = LinearProgram(
            -np.maximum(grid - q, 0.0),
            np.vstack([np.ones_like(grid), grid, np.abs(grid - spec.mu)]),
            [EQ, EQ, EQ],
            [1.0, spec.mu, spec.delta],
        )
        sol = solve_lp(lp)
        assert sol.optimal
        assert -sol.objective == pytest.approx(dist.shortfall(q), abs=1e-6)


def test_best_case_two_point():
    dist = best_case_two_point(MomentSpec(10, 30, 50, 10, beta=0.5))
    assert dist.points == pytest.approx((20, 40))
    assert dist.probs == pytest.approx((0.5, 0.5))

    dist = best_case_two_point(MomentSpec(10, 30, 50, 10, beta=0.25))
    assert dist.points == pytest.approx((30 - 10 / 1.5, 50))
    assert dist.probs == pytest.approx((0.75, 0.25))
    mom = discrete_moments(dist)
    assert mom.mean == pytest.approx(30, abs=1e-12)
    assert mom.mad == pytest.approx(10, abs=1e-12)
    assert mom.beta == pytest.approx(0.25, abs=1e-12)


def test_best_case_zero_mad_and_missing_beta():
    assert best_case_two_point(MomentSpec(10, 30, 50, 0, beta=0.5)).points == (30.0,)
    with pytest.raises(MissingParameterError, match="beta required for lower bound"):
        best_case_two_point(MomentSpec(10, 30, 50, 10))


def test_em_two_point():
    dist = em_two_point(MomentSpec(10, 30, 50, 10))
    assert dist.points == (10.0, 50.0)
    assert dist.probs == pytest.approx((0.5, 0.5))
    assert em_two_point(MomentSpec(0, 0, 1, 0)).points == (0.0,)
    dist = em_two_point(MomentSpec(0, 0.75, 1, 0))
    assert dist.probs == pytest.approx((0.25, 0.75))
    assert em_two_point(MomentSpec(5, 5, 5, 0)).points == (5.0,)


def test_mad_of_named_distribution():
    assert mad_of_named_distribution("uniform", a=10, b=50) == pytest.approx(10)
    assert mad_of_named_distribution("normal", sigma=1) == pytest.approx(0.7978845608, abs=1e-9)
    assert mad_of_named_distribution("triangular", a=10, b=50, c=30) == pytest.approx(20 / 3)
    # beta(1,1) is uniform
    assert mad_of_named_distribution("beta", k=1, lam=1, a=0, b=1) == pytest.approx(0.25)
    # exponential: gamma(1, lam) has MAD 2/(e lam)
    assert mad_of_named_distribution("gamma", k=1, lam=2) == pytest.approx(1 / math.e)
    with pytest.raises(ValueError):
        mad_of_named_distribution("cauchy")


def test_triangular_branches_agree_near_symmetry():
    left = mad_of_named_distribution("triangular", a=10, b=50, c=30 - 1e-9)
    right = mad_of_named_distribution("triangular", a=10, b=50, c=30 + 1e-9)
    assert left == pytest.approx(right, abs=1e-6)


def test_mad_variance_bounds():
    lo, hi = mad_variance_bounds(MomentSpec(10, 30, 50, 10, beta=0.5))
    assert lo == pytest.approx(100)
    assert hi == pytest.approx(200)
    assert 100 <= 1600 / 12 <= 200


def test_discrete_distribution_invariants():
    with pytest.raises(ValueError):
        DiscreteDistribution((1.0, 0.5), (0.5, 0.5))
    with pytest.raises(ValueError):
        DiscreteDistribution((1.0, 2.0), (0.5, 0.6))
    dist = DiscreteDistribution.from_atoms((3, 1, 3, 2), (0.25, 0.25, 0.25, 1e-16))
    assert dist.points == (1.0, 3.0)
    assert sum(dist.probs) == pytest.approx(1.0, abs=1e-12)


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
