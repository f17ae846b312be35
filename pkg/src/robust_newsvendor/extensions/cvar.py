"""
Risk-averse robust ordering: minimize the CVaR of the cost under the
product of the per-item extremal laws.

    min  theta + 1/(1-gamma) * sum_s pi_s * eta_s
    s.t. eta_s >= G(q, xi_s) - theta,  eta_s >= 0
         tau_ik >= xi_ik - q_i,        tau_ik >= 0
         sum_i c_i q_i <= B

G(q, xi_s) = sum_i c_i * (d_i * (q_i - xi_is) + (m_i + d_i) * tau_i,s_i). One
tau per (item, support point) is shared by all scenarios using that point.
"""

import itertools
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from robust_newsvendor.config import config
from robust_newsvendor.core.knapsack import ROBUST_LOWER, ROBUST_UPPER, Item, OrderingPolicy
from robust_newsvendor.core.moments import best_case_two_point, ensure_valid, worst_case_three_point
from robust_newsvendor.errors import ScenarioExplosionError
from robust_newsvendor.lp.simplex import LE, LinearProgram, solve_lp, stack_rows
from robust_newsvendor.logger import logger


WORST = "worst"
BEST = "best"


@dataclass(frozen=True)
class CvarSpec:
    gamma: float

    def __post_init__(self):
        if not 0.0 <= self.gamma < 1.0:
            raise ValueError(f"gamma must lie in [0, 1), got {self.gamma}")


@dataclass
class CvarResult:
    status: str
    policy: OrderingPolicy
    theta: Optional[float]
    scenarios: int


def discrete_cvar(costs: Sequence[float], probs: Sequence[float], gamma: float) -> float:
    """Exact CVaR of a finite cost law: min over theta at the outcomes"""
    CvarSpec(gamma)
    costs = np.asarray(costs, dtype=float)
    probs = np.asarray(probs, dtype=float)
    values = [t + probs @ np.maximum(costs - t, 0.0) / (1.0 - gamma) for t in costs]
    return float(min(values))


def scenario_table(items: Sequence[Item], extremal: str = WORST) -> Tuple[List[Tuple[float, ...]], List[Tuple[float, ...]]]:
    """Support points and masses of the extremal law of every item"""
    points, probs = [], []
    for i, item in enumerate(items):
        spec = ensure_valid(item.spec, i)
        dist = worst_case_three_point(spec) if extremal == WORST else best_case_two_point(spec)
        points.append(dist.points)
        probs.append(dist.probs)
    return points, probs


def cvar_robust_policy(
    items: Sequence[Item],
    budget: float,
    gamma: float,
    extremal: str = WORST,
    fixed_q: Optional[Sequence[float]] = None,
) -> CvarResult:
    """
    Minimize CVaR_gamma of the cost over the scenario product.

    extremal="worst" uses the three-point laws, "best" the two-point laws
    (every item then needs beta).

    Raises:
        ScenarioExplosionError: for more than CVAR_MAX_ITEMS items, or when
            the scenario product exceeds CVAR_MAX_SCENARIOS
    """
    spec = CvarSpec(gamma)
    if extremal not in (WORST, BEST):
        raise ValueError(f"extremal must be '{WORST}' or '{BEST}', got {extremal}")
    n = len(items)
    if n > config.CVAR_MAX_ITEMS:
        raise ScenarioExplosionError("scenario explosion; use smaller n")

    points, probs = scenario_table(items, extremal)
    n_s = math.prod(len(p) for p in points)
    if n_s > config.CVAR_MAX_SCENARIOS:
        # dense tableau is about (n_s + 3n)^2 entries
        raise ScenarioExplosionError(
            f"scenario explosion; use smaller n ({n_s} scenarios, CVAR_MAX_SCENARIOS={config.CVAR_MAX_SCENARIOS})"
        )
    offsets = np.cumsum([0] + [len(p) for p in points])
    n_tau = int(offsets[-1])
    scenarios = list(itertools.product(*[range(len(p)) for p in points]))
    logger.debug(f"CVaR LP: {n} items, {n_s} scenarios, gamma={spec.gamma}")

    # columns: q (n) | tau (n_tau) | theta | eta (n_s)
    theta_col = n + n_tau
    eta0 = theta_col + 1
    width = eta0 + n_s
    c = np.zeros(width)
    lower = np.zeros(width)
    upper = np.full(width, np.inf)
    upper[:n] = [p[-1] for p in points]
    lower[theta_col] = -np.inf
    c[theta_col] = 1.0

    rows: List[np.ndarray] = []
    rhs: List[float] = []
    for i, item_points in enumerate(points):
        for k, x in enumerate(item_points):
            row = np.zeros(width)
            row[i], row[n + offsets[i] + k] = -1.0, -1.0
            rows.append(row)
            rhs.append(-x)

    for s, combo in enumerate(scenarios):
        pi = math.prod(probs[i][k] for i, k in enumerate(combo))
        c[eta0 + s] = pi / (1.0 - spec.gamma)
        row = np.zeros(width)
        bound = 0.0
        for i, k in enumerate(combo):
            econ = items[i].econ
            row[i] += econ.c * econ.d
            row[n + offsets[i] + k] += econ.c * (econ.m + econ.d)
            bound += econ.c * econ.d * points[i][k]
        row[theta_col], row[eta0 + s] = -1.0, -1.0
        rows.append(row)
        rhs.append(bound)

    budget_row = np.zeros(width)
    budget_row[:n] = [item.econ.c for item in items]
    rows.append(budget_row)
    rhs.append(float(budget))
    if fixed_q is not None:
        lower[:n] = upper[:n] = np.asarray(fixed_q, dtype=float)

    lp = LinearProgram(c, stack_rows(rows, width), [LE] * len(rows), np.array(rhs), lower, upper)
    solution = solve_lp(lp)
    tag = ROBUST_UPPER if extremal == WORST else ROBUST_LOWER
    if not solution.optimal:
        logger.warning(f"CVaR LP {solution.status}")
        return CvarResult(solution.status, OrderingPolicy(tuple([0.0] * n), math.nan, 0.0, tag), None, n_s)

    q = tuple(float(x) for x in solution.x[:n])
    spent = math.fsum(item.econ.c * qi for item, qi in zip(items, q))
    policy = OrderingPolicy(q, solution.objective, spent, tag, {"gamma": spec.gamma})
    return CvarResult(solution.status, policy, float(solution.x[theta_col]), n_s)
