from .cvar import CvarSpec, cvar_robust_policy, discrete_cvar
from .multi_constraint import multi_constraint_policy
from .supply_yield import YieldSpec, yield_cost_bounds, yield_robust_policy

__all__ = [
    "CvarSpec",
    "cvar_robust_policy",
    "discrete_cvar",
    "multi_constraint_policy",
    "YieldSpec",
    "yield_cost_bounds",
    "yield_robust_policy",
]
