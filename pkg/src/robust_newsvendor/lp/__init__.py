from .simplex import LinearProgram, LpSolution, solve_lp
from .epigraph import LinearRows, pwl_epigraph, solve_epigraph

__all__ = ["LinearProgram", "LpSolution", "solve_lp", "LinearRows", "pwl_epigraph", "solve_epigraph"]
