"""
Budget sweeps: every policy on a grid of budgets from 0 to the budget the
full-information optimum would spend without a constraint.
"""

import math
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from tqdm import tqdm

from robust_newsvendor.config import config
from robust_newsvendor.core.knapsack import (
    POLICY_TAGS,
    Instance,
    Item,
    evaluate_lower,
    evaluate_upper,
    knapsack_allocate,
    lower_bound_policy,
)
from robust_newsvendor.core.single_item import ItemEconomics
from robust_newsvendor.errors import EvaiUndefinedError
from robust_newsvendor.evaluation.ground_truth import (
    DEMAND_CASES,
    GroundTruthDistribution,
    make_rng,
    random_triangular,
    true_cost,
)
from robust_newsvendor.evaluation.policies import (
    em_policy,
    evai,
    full_info_optimal,
    gallego_moon_policy,
)
from robust_newsvendor.logger import logger


COLUMNS = ["B", "policy", "item", "q", "cost_upper", "cost_lower", "cost_true", "evai"]

# 25 个商品的加价率 (低/中/高利润)
MARKUPS: Dict[str, Tuple[float, ...]] = {
    "low": (
        0.1, 0.14, 0.18, 0.21, 0.25, 0.29, 0.33, 0.36, 0.4, 0.44, 0.48, 0.51, 0.55,
        0.59, 0.63, 0.66, 0.7, 0.74, 0.78, 0.81, 0.85, 0.89, 0.93, 0.96, 1.0,
    ),
    "average": (
        1.0, 1.13, 1.25, 1.38, 1.5, 1.63, 1.75, 1.88, 2.0, 2.13, 2.25, 2.38, 2.5,
        2.63, 2.75, 2.88, 3.0, 3.13, 3.25, 3.38, 3.5, 3.63, 3.75, 3.88, 4.0,
    ),
    "high": (
        4.0, 4.21, 4.42, 4.63, 4.83, 5.04, 5.25, 5.46, 5.67, 5.88, 6.08, 6.29, 6.5,
        6.71, 6.92, 7.12, 7.33, 7.54, 7.75, 7.96, 8.17, 8.37, 8.58, 8.79, 9.0,
    ),
}


@dataclass
class ExperimentConfig:
    """
    Multi-item experiment: case 1-9 picks a shared demand law, case 0 draws
    a random triangular law per item from ``seed``. c = d = 1 throughout.
    """

    case: int = 1
    margin: str = "low"
    n: int = 25
    grid_points: int = field(default_factory=lambda: config.GRID_POINTS)
    seed: int = field(default_factory=lambda: config.SEED)
    threads: int = field(default_factory=lambda: config.THREADS)
    progress: bool = field(default_factory=lambda: config.SWEEP_PROGRESS)

    def __post_init__(self):
        if self.margin not in MARKUPS:
            raise ValueError(f"margin must be one of {sorted(MARKUPS)}, got {self.margin}")
        if self.case != 0 and self.case not in DEMAND_CASES:
            raise ValueError(f"case must be 0-9, got {self.case}")
        if not 1 <= self.n <= len(MARKUPS[self.margin]):
            raise ValueError(f"n must lie in 1..{len(MARKUPS[self.margin])}, got {self.n}")
        if self.grid_points < 2:
            raise ValueError("grid_points must be at least 2")

    def markups(self) -> List[float]:
        row = MARKUPS[self.margin]
        if self.n == len(row):
            return list(row)
        picks = np.round(np.linspace(0, len(row) - 1, self.n)).astype(int)
        return [row[k] for k in picks]

    def build(self) -> Tuple[Instance, List[GroundTruthDistribution]]:
        if self.case == 0:
            rng = make_rng(self.seed)
            dists = [random_triangular(rng) for _ in range(self.n)]
        else:
            dists = [DEMAND_CASES[self.case]] * self.n
        items = tuple(
            Item(ItemEconomics(m=m, d=1.0, c=1.0), dist.moment_spec())
            for m, dist in zip(self.markups(), dists)
        )
        return Instance(items, 0.0), dists


def complete_moments(instance: Instance, dists: Sequence[GroundTruthDistribution]) -> Instance:
    """Fill missing beta and sigma from the ground-truth laws"""
    items = []
    for item, dist in zip(instance.items, dists):
        spec = item.spec
        if spec.beta is None:
            spec = replace(spec, beta=dist.prob_above_mean)
        if spec.sigma is None:
            spec = replace(spec, sigma=dist.sigma)
        items.append(Item(item.econ, spec))
    return Instance(tuple(items), instance.budget)


def unconstrained_budget(instance: Instance, dists: Sequence[GroundTruthDistribution]) -> float:
    """B_opt: capital spent by the full-information optimum without a budget"""
    economics = [item.econ for item in instance.items]
    return full_info_optimal(economics, dists, math.inf).spent


def evaluate_budget(instance: Instance, dists: Sequence[GroundTruthDistribution], budget: float) -> List[dict]:
    """All five policies at one budget, one row per (policy, item)"""
    inst = instance.with_budget(budget)
    economics = [item.econ for item in inst.items]
    moments = [(item.spec.mu, item.spec.sigma) for item in inst.items]

    reference = full_info_optimal(economics, dists, budget)
    policies = [
        knapsack_allocate(inst),
        lower_bound_policy(inst),
        em_policy(inst),
        gallego_moon_policy(economics, moments, budget),
        reference,
    ]

    rows = []
    for policy in policies:
        try:
            regret = evai(policy.q, reference.q, economics, dists)
        except EvaiUndefinedError:
            logger.warning(f"EVAI undefined at B={budget:g} for {policy.provenance}")
            regret = float("nan")
        cost_upper = evaluate_upper(inst, policy.q)
        cost_lower = evaluate_lower(inst, policy.q)
        cost_true = true_cost(economics, dists, policy.q)
        for i, qi in enumerate(policy.q):
            rows.append(
                {
                    "B": budget,
                    "policy": policy.provenance,
                    "item": i,
                    "q": qi,
                    "cost_upper": cost_upper,
                    "cost_lower": cost_lower,
                    "cost_true": cost_true,
                    "evai": regret,
                }
            )
    return rows


def sweep_instance(
    instance: Instance,
    dists: Sequence[GroundTruthDistribution],
    grid_points: Optional[int] = None,
    budgets: Optional[Sequence[float]] = None,
    threads: Optional[int] = None,
    progress: Optional[bool] = None,
) -> pd.DataFrame:
    """
    Evaluate every policy on a budget grid.

    Args:
        instance: items with ambiguity data; its own budget is ignored
        dists: true demand law per item
        grid_points: evenly spaced budgets on [0, B_opt] when ``budgets`` is not given
        budgets: explicit budget grid
        threads: worker threads, defaults to ROBUST_NV_THREADS
        progress: show a tqdm progress bar

    Returns:
        pd.DataFrame: one row per (B, policy, item), sorted by B, policy tag and item
    """
    if len(dists) != instance.n:
        raise ValueError("one ground-truth law per item is required")
    instance = complete_moments(instance, dists)
    if budgets is None:
        b_opt = unconstrained_budget(instance, dists)
        budgets = np.linspace(0.0, b_opt, grid_points or config.GRID_POINTS)
        logger.info(f"budget sweep: {len(budgets)} budgets on [0, {b_opt:.6g}], {instance.n} items")
    budgets = [float(b) for b in budgets]
    threads = threads or config.THREADS
    progress = config.SWEEP_PROGRESS if progress is None else progress

    rows: List[dict] = []
    with ThreadPoolExecutor(max_workers=max(1, threads)) as executor:
        futures = [executor.submit(evaluate_budget, instance, dists, b) for b in budgets]
        for future in tqdm(as_completed(futures), total=len(futures), desc="budget sweep", disable=not progress):
            rows.extend(future.result())

    df = pd.DataFrame(rows, columns=COLUMNS)
    df["policy"] = pd.Categorical(df["policy"], categories=list(POLICY_TAGS), ordered=True)
    df = df.sort_values(["B", "policy", "item"], kind="mergesort").reset_index(drop=True)
    df["policy"] = df["policy"].astype(str)
    logger.info(f"budget sweep finished: {len(df)} rows")
    return df


def budget_sweep(experiment: ExperimentConfig) -> pd.DataFrame:
    instance, dists = experiment.build()
    return sweep_instance(
        instance,
        dists,
        grid_points=experiment.grid_points,
        threads=experiment.threads,
        progress=experiment.progress,
    )
