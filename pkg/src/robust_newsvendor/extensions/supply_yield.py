"""
Robust ordering when only a random fraction Z of each order arrives.

Demand and yield are independent and each carries mean-MAD-range data;
the worst case pairs the two three-point laws, so every item contributes
nine shortfall terms (xi_k - zeta_l * q)^+.
"""

import math
from typing import List, Optional, Sequence, Tuple

import numpy as np

from robust_newsvendor.core.knapsack import ROBUST_UPPER, Item, OrderingPolicy
from robust_newsvendor.core.moments import (
    BOUND_TOL,
    MomentSpec,
    best_case_points,
    ensure_valid,
    worst_case_probabilities,
)
from robust_newsvendor.core.single_item import ItemEconomics
from robust_newsvendor.errors import InfeasibleMomentsError, MissingParameterError
from robust_newsvendor.lp.simplex import LE, LinearProgram, solve_lp, stack_rows
from robust_newsvendor.logger import logger


YieldSpec = MomentSpec

Atoms = Tuple[Tuple[float, ...], Tuple[float, ...]]


def validate_yield(spec: YieldSpec, item: Optional[int] = None) -> YieldSpec:
    if spec.a < -BOUND_TOL or spec.b > 1.0 + BOUND_TOL:
        raise InfeasibleMomentsError([f"yield support [{spec.a:g}, {spec.b:g}] must lie in [0, 1]"], item)
    return ensure_valid(spec, item)


def _worst_atoms(spec: MomentSpec) -> Atoms:
    return (spec.a, spec.mu, spec.b), worst_case_probabilities(spec)


def _best_atoms(spec: MomentSpec) -> Atoms:
    return best_case_points(spec)


def yield_expected_cost(econ: ItemEconomics, demand: Atoms, supply: Atoms, q: float) -> float:
    """c * (d * (E[Z] q - E[D]) + (m + d) * E(D - Z q)^+) over the product law"""
    xs, ps = demand
    zs, rs = supply
    mu = math.fsum(x * p for x, p in zip(xs, ps))
    mu_z = math.fsum(z * r for z, r in zip(zs, rs))
    shortfall = math.fsum(p * r * max(x - z * q, 0.0) for x, p in zip(xs, ps) for z, r in zip(zs, rs))
    return econ.c * (econ.d * (mu_z * q - mu) + (econ.m + econ.d) * shortfall)


def yield_cost_bounds(item: Item, yield_spec: YieldSpec, q: float) -> Tuple[Optional[float], float]:
    """
    Best-case and worst-case expected cost at order q.

    The best case needs beta on both demand and yield; otherwise it is None.
    """
    spec = ensure_valid(item.spec)
    yield_spec = validate_yield(yield_spec)
    upper = yield_expected_cost(item.econ, _worst_atoms(spec), _worst_atoms(yield_spec), q)
    lower = None
    if spec.beta is not None and yield_spec.beta is not None:
        lower = yield_expected_cost(item.econ, _best_atoms(spec), _best_atoms(yield_spec), q)
    return lower, upper


def yield_robust_policy(
    items: Sequence[Item],
    yields: Sequence[YieldSpec],
    budget: float,
    fixed_q: Optional[Sequence[float]] = None,
) -> OrderingPolicy:
    """
    Worst-case optimal orders under multiplicative yield and a budget.

    Columns are q_1..q_n followed by nine tau per item; fixed_q pins the
    orders so the LP only evaluates the worst-case cost.
    """
    if len(yields) != len(items):
        raise MissingParameterError("one yield spec per item is required")
    n = len(items)
    width = n + 9 * n
    c = np.zeros(width)
    lower = np.zeros(width)
    upper = np.full(width, np.inf)
    rows: List[np.ndarray] = []
    rhs: List[float] = []
    constant = 0.0

    for i, (item, ys) in enumerate(zip(items, yields)):
        spec = ensure_valid(item.spec, i)
        ys = validate_yield(ys, i)
        econ = item.econ
        xs, ps = _worst_atoms(spec)
        zs, rs = _worst_atoms(ys)
        c[i] = econ.c * econ.d * ys.mu
        constant -= econ.c * econ.d * spec.mu
        col = n + 9 * i
        for x, p in zip(xs, ps):
            for z, r in zip(zs, rs):
                c[col] = econ.c * (econ.m + econ.d) * p * r
                row = np.zeros(width)
                row[i], row[col] = -z, -1.0
                rows.append(row)
                rhs.append(-x)
                col += 1

    budget_row = np.zeros(width)
    budget_row[:n] = [item.econ.c for item in items]
    rows.append(budget_row)
    rhs.append(float(budget))
    if fixed_q is not None:
        lower[:n] = upper[:n] = np.asarray(fixed_q, dtype=float)

    lp = LinearProgram(c, stack_rows(rows, width), [LE] * len(rows), np.array(rhs), lower, upper)
    solution = solve_lp(lp)
    if not solution.optimal:
        logger.warning(f"yield LP {solution.status}")
        return OrderingPolicy(tuple([0.0] * n), math.nan, 0.0, ROBUST_UPPER, {"status": solution.status})
    q = tuple(float(x) for x in solution.x[:n])
    spent = math.fsum(item.econ.c * qi for item, qi in zip(items, q))
    return OrderingPolicy(q, solution.objective + constant, spent, ROBUST_UPPER, {"status": solution.status})
