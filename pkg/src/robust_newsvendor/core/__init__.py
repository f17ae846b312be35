from .moments import (
    DiscreteDistribution,
    MomentSpec,
    ValidationReport,
    best_case_two_point,
    em_two_point,
    mad_of_named_distribution,
    validate_moment_spec,
    worst_case_three_point,
)
from .single_item import (
    ItemEconomics,
    PwlCost,
    classical_optimal_quantity,
    pwl_pieces,
    robust_single_quantity,
    scarf_cost,
    scarf_quantity,
    worst_case_cost,
)
from .knapsack import (
    Instance,
    Item,
    OrderingPolicy,
    RankedList,
    build_coefficients,
    build_ranked_list,
    evaluate_lower,
    evaluate_upper,
    knapsack_allocate,
    lower_bound_policy,
    performance_interval,
)

__all__ = [
    "DiscreteDistribution",
    "MomentSpec",
    "ValidationReport",
    "best_case_two_point",
    "em_two_point",
    "mad_of_named_distribution",
    "validate_moment_spec",
    "worst_case_three_point",
    "ItemEconomics",
    "PwlCost",
    "classical_optimal_quantity",
    "pwl_pieces",
    "robust_single_quantity",
    "scarf_cost",
    "scarf_quantity",
    "worst_case_cost",
    "Instance",
    "Item",
    "OrderingPolicy",
    "RankedList",
    "build_coefficients",
    "build_ranked_list",
    "evaluate_lower",
    "evaluate_upper",
    "knapsack_allocate",
    "lower_bound_policy",
    "performance_interval",
]
