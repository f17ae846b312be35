from .ground_truth import DEMAND_CASES, GroundTruthDistribution, expected_shortfall, true_cost
from .policies import em_policy, evai, full_info_optimal, gallego_moon_policy, mean_variance_cost
from .sweep import ExperimentConfig, budget_sweep, sweep_instance

__all__ = [
    "DEMAND_CASES",
    "GroundTruthDistribution",
    "expected_shortfall",
    "true_cost",
    "em_policy",
    "evai",
    "full_info_optimal",
    "gallego_moon_policy",
    "mean_variance_cost",
    "ExperimentConfig",
    "budget_sweep",
    "sweep_instance",
]
