"""
Benchmark ordering policies and the EVAI regret measure.
"""

import math
from collections import defaultdict
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from robust_newsvendor.core.knapsack import (
    FULL_INFO,
    MEAN_RANGE,
    MEAN_VARIANCE,
    Instance,
    Item,
    OrderingPolicy,
    atom_knapsack,
)
from robust_newsvendor.core.moments import ensure_valid, em_two_point
from robust_newsvendor.core.single_item import ItemEconomics, pwl_from_atoms, scarf_cost
from robust_newsvendor.errors import EvaiUndefinedError
from robust_newsvendor.evaluation.ground_truth import (
    GroundTruthDistribution,
    make_rng,
    random_triangular,
    true_cost,
)


MAX_BISECTIONS = 200


def _lagrange_allocate(
    quantities: Callable[[float], np.ndarray],
    unit_costs: np.ndarray,
    budget: float,
    lam_max: float,
) -> Tuple[np.ndarray, float]:
    """
    Bisect the budget multiplier of a separable convex problem.

    ``quantities(lam)`` gives the per-item minimizers of cost + lam * c * q;
    it is nonincreasing in lam and may jump. Budget left at a jump is filled
    into the jumping items, whose marginal value equals the multiplier there.
    """
    q0 = quantities(0.0)
    if unit_costs @ q0 <= budget:
        return q0, 0.0

    lo, hi = 0.0, lam_max
    for _ in range(MAX_BISECTIONS):
        if hi - lo <= 1e-14 * max(1.0, lam_max):
            break
        mid = 0.5 * (lo + hi)
        if unit_costs @ quantities(mid) > budget:
            lo = mid
        else:
            hi = mid

    q_hi, q_lo = quantities(hi), quantities(lo)
    residual = budget - unit_costs @ q_hi
    q = q_hi.copy()
    for i in np.flatnonzero(q_lo > q_hi):
        if residual <= 0.0:
            break
        room = (q_lo[i] - q_hi[i]) * unit_costs[i]
        take = min(room, residual)
        q[i] += take / unit_costs[i]
        residual -= take
    return q, hi


def full_info_optimal(
    economics: Sequence[ItemEconomics],
    dists: Sequence[GroundTruthDistribution],
    budget: float,
) -> OrderingPolicy:
    """
    Budget-constrained optimum with the true demand laws known.

    q_i(lam) is the (m_i - lam) / (m_i + d_i) quantile, or 0 once lam >= m_i.
    """
    n = len(economics)
    if n == 0:
        return OrderingPolicy((), 0.0, 0.0, FULL_INFO)
    m = np.array([e.m for e in economics])
    d = np.array([e.d for e in economics])
    c = np.array([e.c for e in economics])

    groups = defaultdict(list)
    for i, dist in enumerate(dists):
        groups[dist].append(i)

    def quantities(lam: float) -> np.ndarray:
        ratio = (m - lam) / (m + d)
        q = np.zeros(n)
        for dist, idx in groups.items():
            idx = np.asarray(idx)
            q[idx] = dist.ppf(ratio[idx])
        q[lam >= m] = 0.0
        return q

    q, lam = _lagrange_allocate(quantities, c, budget, float(np.max(m)))
    objective = true_cost(economics, dists, q)
    return OrderingPolicy(tuple(float(x) for x in q), objective, float(c @ q), FULL_INFO, {"lambda": lam})


def _gm_quantity(econ: ItemEconomics, mu: float, sigma: float, lam: float) -> float:
    if lam >= econ.m:
        return 0.0
    r = (econ.m - econ.d - 2.0 * lam) / (econ.m + econ.d)
    return max(0.0, mu + sigma * r / math.sqrt(1.0 - r * r))


def mean_variance_cost(
    economics: Sequence[ItemEconomics],
    moments: Sequence[Tuple[float, float]],
    q: Sequence[float],
) -> float:
    """Worst-case cost over all laws with the given (mean, std) per item"""
    return math.fsum(scarf_cost(e, mu, sigma, qi) for e, (mu, sigma), qi in zip(economics, moments, q))


def gallego_moon_policy(
    economics: Sequence[ItemEconomics],
    moments: Sequence[Tuple[float, float]],
    budget: float,
) -> OrderingPolicy:
    """
    Budgeted mean-variance robust policy.

    With multiplier lam the per-item first-order condition gives
    q = mu + sigma * r / sqrt(1 - r^2), r = (m - d - 2 lam) / (m + d).
    """
    n = len(economics)
    if n == 0:
        return OrderingPolicy((), 0.0, 0.0, MEAN_VARIANCE)
    c = np.array([e.c for e in economics])

    def quantities(lam: float) -> np.ndarray:
        return np.array([_gm_quantity(e, mu, s, lam) for e, (mu, s) in zip(economics, moments)])

    lam_max = max(e.m for e in economics)
    q, lam = _lagrange_allocate(quantities, c, budget, lam_max)
    objective = mean_variance_cost(economics, moments, q)
    return OrderingPolicy(tuple(float(x) for x in q), objective, float(c @ q), MEAN_VARIANCE, {"lambda": lam})


def em_coefficients(instance: Instance):
    pwls = []
    for item in instance.items:
        spec = item.spec
        dist = em_two_point(spec)
        pwls.append(pwl_from_atoms(item.econ, dist.points, dist.probs, spec.mu))
    return pwls


def em_policy(instance: Instance) -> OrderingPolicy:
    """Robust policy when only mean and range are known"""
    for i, item in enumerate(instance.items):
        ensure_valid(item.spec, i)
    return atom_knapsack(em_coefficients(instance), instance.budget, MEAN_RANGE)


def evai(
    q: Sequence[float],
    reference_q: Sequence[float],
    economics: Sequence[ItemEconomics],
    dists: Sequence[GroundTruthDistribution],
) -> float:
    """Relative regret (C(q) - C(q*)) / C(q*) under the true laws"""
    reference = true_cost(economics, dists, reference_q)
    if reference <= 1e-15:
        raise EvaiUndefinedError("EVAI undefined at zero optimal cost")
    return (true_cost(economics, dists, q) - reference) / reference


def random_instance(
    seed: int,
    n: int,
    budget: Optional[float] = None,
) -> Tuple[Instance, List[GroundTruthDistribution]]:
    """
    Random instance whose ambiguity data matches random triangular laws.

    Economics are drawn with c in [0.5, 3], m in [0.1, 9] and d in [0.2, 1];
    the budget defaults to a uniform draw below the cost of ordering every b.
    """
    rng = make_rng(seed)
    items, dists = [], []
    for _ in range(n):
        dist = random_triangular(rng)
        econ = ItemEconomics(
            m=float(rng.uniform(0.1, 9.0)),
            d=float(rng.uniform(0.2, 1.0)),
            c=float(rng.uniform(0.5, 3.0)),
        )
        items.append(Item(econ, dist.moment_spec()))
        dists.append(dist)
    if budget is None:
        budget = float(rng.uniform(0.0, sum(it.econ.c * it.spec.b for it in items))) if items else 0.0
    return Instance(tuple(items), budget), dists
