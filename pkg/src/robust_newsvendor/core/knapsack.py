"""
Budget-constrained multi-item robust ordering.

Every item's worst-case cost is convex piecewise linear, so the budgeted
problem is a continuous knapsack over the decreasing pieces: sort them by
slope per unit of capital and lift items piece by piece until the budget
binds. The same greedy runs on any convex PWL costs (best-case two-point
laws, mean-range two-point laws, discrete ground truths).
"""

import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

from robust_newsvendor.core.moments import (
    MomentSpec,
    best_case_points,
    ensure_valid,
    worst_case_probabilities,
)
from robust_newsvendor.core.single_item import FLAT_SLOPE_TOL, ItemEconomics, PwlCost, pwl_from_atoms
from robust_newsvendor.errors import MissingParameterError
from robust_newsvendor.logger import logger


ROBUST_UPPER = "robust-upper"
ROBUST_LOWER = "robust-lower"
MEAN_RANGE = "mean-range"
MEAN_VARIANCE = "mean-variance"
FULL_INFO = "full-info"
POLICY_TAGS = (ROBUST_UPPER, ROBUST_LOWER, MEAN_RANGE, MEAN_VARIANCE, FULL_INFO)

RESIDUAL_GUARD = 1e-12


@dataclass(frozen=True)
class Item:
    econ: ItemEconomics
    spec: MomentSpec


@dataclass(frozen=True)
class Instance:
    """Items with their ambiguity data and a capital budget B >= 0"""

    items: Tuple[Item, ...]
    budget: float

    def __post_init__(self):
        if not self.budget >= 0.0:
            raise ValueError(f"budget must be nonnegative, got {self.budget}")

    @property
    def n(self) -> int:
        return len(self.items)

    def with_budget(self, budget: float) -> "Instance":
        return Instance(self.items, budget)


@dataclass(frozen=True)
class RankedEntry:
    item: int
    piece: int
    ratio: float  # slope per unit of capital
    capacity: float
    unit_cost: float
    left: float  # order quantity where the piece starts
    right: float


@dataclass(frozen=True)
class RankedList:
    entries: Tuple[RankedEntry, ...]

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)


@dataclass(frozen=True)
class OrderingPolicy:
    q: Tuple[float, ...]
    objective: float
    spent: float
    provenance: str
    extra: dict = field(default_factory=dict, compare=False)


def upper_coefficients(instance: Instance) -> List[PwlCost]:
    pwls = []
    for i, item in enumerate(instance.items):
        spec = ensure_valid(item.spec, i)
        pwls.append(
            pwl_from_atoms(item.econ, (spec.a, spec.mu, spec.b), worst_case_probabilities(spec), spec.mu)
        )
    return pwls


# per-item three-piece worst-case coefficients
build_coefficients = upper_coefficients


def lower_coefficients(instance: Instance) -> List[PwlCost]:
    pwls = []
    for i, item in enumerate(instance.items):
        if item.spec.beta is None:
            raise MissingParameterError(f"beta required for lower bound (item {i})")
        spec = ensure_valid(item.spec, i)
        points, probs = best_case_points(spec)
        pwls.append(pwl_from_atoms(item.econ, points, probs, spec.mu))
    return pwls


def rank_pieces(pwls: Sequence[PwlCost]) -> RankedList:
    """
    All strictly decreasing pieces sorted by (slope / c, item, piece).

    Pieces with |slope| <= FLAT_SLOPE_TOL * max(1, c) count as flat and are
    left out, so cost-neutral budget stays unspent.
    """
    entries = []
    for i, pwl in enumerate(pwls):
        lefts = (0.0,) + pwl.knots[:-1]
        flat = FLAT_SLOPE_TOL * max(1.0, pwl.econ.c)
        for j, (slope, cap) in enumerate(zip(pwl.slopes, pwl.capacities())):
            if slope < -flat:
                entries.append(
                    RankedEntry(i, j, slope / pwl.econ.c, cap, pwl.econ.c, lefts[j], pwl.knots[j])
                )
    entries.sort(key=lambda e: (e.ratio, e.item, e.piece))
    return RankedList(tuple(entries))


def build_ranked_list(instance: Instance) -> RankedList:
    return rank_pieces(upper_coefficients(instance))


def budget_breakpoints(ranked: RankedList) -> List[float]:
    """Cumulative budget at which each ranked entry is fully lifted"""
    total, out = 0.0, []
    for entry in ranked:
        total += entry.unit_cost * entry.capacity
        out.append(total)
    return out


def greedy_fill(ranked: RankedList, n: int, budget: float) -> List[float]:
    q = [0.0] * n
    spent = 0.0
    for entry in ranked:
        residual = budget - spent
        if residual <= RESIDUAL_GUARD:
            break
        need = entry.unit_cost * entry.capacity
        if need <= residual:
            q[entry.item] = entry.right
            spent += need
        else:
            q[entry.item] = min(entry.left + residual / entry.unit_cost, entry.right)
            spent = budget
            logger.debug(f"budget binds on item {entry.item} piece {entry.piece}: q={q[entry.item]:.10g}")
            break
    return q


def atom_knapsack(pwls: Sequence[PwlCost], budget: float, provenance: str) -> OrderingPolicy:
    """Greedy continuous knapsack over convex PWL costs"""
    ranked = rank_pieces(pwls)
    q = greedy_fill(ranked, len(pwls), budget)
    spent = math.fsum(pwl.econ.c * qi for pwl, qi in zip(pwls, q))
    if budget - spent > 1e-9 and ranked.entries:
        logger.debug(f"{provenance}: {budget - spent:.6g} of budget left unspent")
    objective = math.fsum(pwl.evaluate(qi) for pwl, qi in zip(pwls, q))
    return OrderingPolicy(tuple(q), objective, spent, provenance)


def knapsack_allocate(instance: Instance) -> OrderingPolicy:
    """Robust (worst-case) ordering policy for the instance budget"""
    return atom_knapsack(upper_coefficients(instance), instance.budget, ROBUST_UPPER)


def lower_bound_policy(instance: Instance) -> OrderingPolicy:
    """Best-case ordering policy; every item needs beta"""
    return atom_knapsack(lower_coefficients(instance), instance.budget, ROBUST_LOWER)


def evaluate_upper(instance: Instance, q: Sequence[float]) -> float:
    return math.fsum(pwl.evaluate(qi) for pwl, qi in zip(upper_coefficients(instance), q))


def evaluate_lower(instance: Instance, q: Sequence[float]) -> float:
    return math.fsum(pwl.evaluate(qi) for pwl, qi in zip(lower_coefficients(instance), q))


def performance_interval(instance: Instance) -> Tuple[float, float]:
    """Optimal best-case and worst-case values at the instance budget"""
    return lower_bound_policy(instance).objective, knapsack_allocate(instance).objective


def piece_reached(pwl: PwlCost, q: float, tol: float = 1e-9) -> Optional[int]:
    """Index of the piece containing q; None beyond the last knot"""
    for j, knot in enumerate(pwl.knots):
        if q <= knot + tol:
            return j
    return None
