"""
Exception hierarchy for the robust newsvendor solver
"""

from typing import List, Optional


class NewsvendorError(Exception):
    """Root of every error raised by this package"""


class InfeasibleMomentsError(NewsvendorError, ValueError):
    """Moment data outside the feasible region of its ambiguity set"""

    def __init__(self, violations: List[str], item: Optional[int] = None):
        self.violations = list(violations)
        self.item = item
        where = f" (item {item})" if item is not None else ""
        super().__init__(f"infeasible moments{where}: " + "; ".join(self.violations))


class MissingParameterError(NewsvendorError, ValueError):
    """An optional moment (beta, sigma) is required by the requested model"""


class LpError(NewsvendorError):
    """Malformed linear program, non-convex input or iteration limit"""


class ScenarioExplosionError(NewsvendorError, ValueError):
    """Too many items for full scenario enumeration"""


class EvaiUndefinedError(NewsvendorError, ZeroDivisionError):
    """EVAI asked for a reference policy with zero expected cost"""


class InstanceFileError(NewsvendorError):
    """Instance file could not be loaded; carries the CLI exit code"""

    PARSE = 2
    SCHEMA = 3
    MOMENTS = 4

    def __init__(self, message: str, exit_code: int):
        super().__init__(message)
        self.exit_code = exit_code


class UsageError(NewsvendorError):
    """Bad command-line arguments; the CLI exits with code 1"""
