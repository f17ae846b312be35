"""
Robust ordering under several linear resource constraints
sum_i w_ij * q_i <= B_j, solved as an LP with row shadow prices.
"""

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from robust_newsvendor.core.knapsack import ROBUST_UPPER, Instance, Item, OrderingPolicy, upper_coefficients
from robust_newsvendor.lp.epigraph import TAU, LinearRows, pwl_epigraph, solve_epigraph
from robust_newsvendor.lp.simplex import LE
from robust_newsvendor.logger import logger


@dataclass
class MultiConstraintResult:
    status: str
    policy: Optional[OrderingPolicy]
    shadow_prices: Optional[np.ndarray]  # worst-case cost saved per unit of each budget


def multi_constraint_policy(
    items: Sequence[Item],
    weights: Sequence[Sequence[float]],
    budgets: Sequence[float],
) -> MultiConstraintResult:
    """
    Args:
        items: economics and ambiguity data per item
        weights: n x k matrix, weights[i][j] = resource j used per unit of item i
        budgets: k budget levels

    Returns:
        MultiConstraintResult: LP status, the policy and one shadow price per row
    """
    W = np.asarray(weights, dtype=float).reshape(len(items), -1)
    B = np.asarray(budgets, dtype=float).reshape(-1)
    if W.shape[1] != B.size:
        raise ValueError(f"{W.shape[1]} weight columns but {B.size} budgets")
    if np.any(W < 0):
        raise ValueError("resource weights must be nonnegative")

    pwls = upper_coefficients(Instance(tuple(items), 0.0))
    rows = LinearRows(W.T, tuple([LE] * B.size), B)
    result = solve_epigraph(pwl_epigraph(pwls, rows, encoding=TAU))
    if not result.solution.optimal:
        logger.warning(f"multi-constraint LP {result.solution.status}")
        return MultiConstraintResult(result.solution.status, None, None)

    q = tuple(float(x) for x in result.q)
    spent = float(sum(item.econ.c * qi for item, qi in zip(items, q)))
    policy = OrderingPolicy(q, result.objective, spent, ROBUST_UPPER)
    return MultiConstraintResult(result.solution.status, policy, -result.row_duals)
