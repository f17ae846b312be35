"""
LP reformulations of a sum of convex piecewise-linear item costs.

Two encodings are available:

- ``epigraph``: one free variable t_i per item bounded below by every piece,
  alpha_ij * q_i + nu_ij <= t_i.
- ``tau``: one shortfall variable per support point, tau_ik >= x_k - q_i,
  with objective c*d*(q - mu) + c*(m+d) * sum_k p_k tau_ik.

Order quantities occupy the first n columns and are bounded by the last
knot of their item.
"""

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from robust_newsvendor.core.single_item import PwlCost
from robust_newsvendor.errors import LpError
from robust_newsvendor.lp.simplex import LE, LinearProgram, LpSolution, solve_lp, stack_rows


EPIGRAPH = "epigraph"
TAU = "tau"


@dataclass(frozen=True)
class LinearRows:
    """Extra constraints on the order vector: coeffs @ q (sense) rhs"""

    coeffs: np.ndarray
    senses: Tuple[str, ...]
    rhs: np.ndarray

    @classmethod
    def budget(cls, pwls: Sequence[PwlCost], budget: float) -> "LinearRows":
        return cls(np.array([[p.econ.c for p in pwls]]), (LE,), np.array([float(budget)]))

    @classmethod
    def empty(cls, n: int) -> "LinearRows":
        return cls(np.zeros((0, n)), (), np.zeros(0))


@dataclass
class EpigraphModel:
    lp: LinearProgram
    n: int
    constant: float
    first_extra_row: int  # rows from here on are the caller's LinearRows


@dataclass
class EpigraphResult:
    solution: LpSolution
    q: Optional[np.ndarray]
    objective: Optional[float]
    row_duals: Optional[np.ndarray]  # duals of the caller's rows


def pwl_epigraph(
    pwls: Sequence[PwlCost],
    rows: Optional[LinearRows] = None,
    encoding: str = EPIGRAPH,
    fixed_q: Optional[Sequence[float]] = None,
) -> EpigraphModel:
    """
    Build the LP minimizing sum_i C_i(q_i) subject to ``rows``.

    Raises:
        LpError: if a cost is not convex or the encoding is unknown
    """
    n = len(pwls)
    rows = rows if rows is not None else LinearRows.empty(n)
    for i, pwl in enumerate(pwls):
        if not pwl.is_convex():
            raise LpError(f"item {i}: piecewise-linear cost is not convex")

    if encoding == EPIGRAPH:
        n_aux = n  # one t per item
    elif encoding == TAU:
        n_aux = sum(len(p.knots) for p in pwls)
    else:
        raise LpError(f"unknown encoding: {encoding}")

    width = n + n_aux
    c = np.zeros(width)
    lower = np.zeros(width)
    upper = np.full(width, np.inf)
    for i, pwl in enumerate(pwls):
        upper[i] = pwl.knots[-1] if pwl.knots else 0.0
    if fixed_q is not None:
        for i, qi in enumerate(fixed_q):
            lower[i] = upper[i] = float(qi)

    A_rows: List[np.ndarray] = []
    b: List[float] = []
    constant = 0.0
    col = n
    for i, pwl in enumerate(pwls):
        if encoding == EPIGRAPH:
            c[col] = 1.0
            lower[col] = -np.inf
            for slope, intercept in zip(pwl.slopes, pwl.intercepts):
                row = np.zeros(width)
                row[i], row[col] = slope, -1.0
                A_rows.append(row)
                b.append(-intercept)
            col += 1
        else:
            econ = pwl.econ
            c[i] = econ.c * econ.d
            constant -= econ.c * econ.d * pwl.mean
            for x, p in zip(pwl.knots, pwl.probs):
                c[col] = econ.c * (econ.m + econ.d) * p
                row = np.zeros(width)
                row[i], row[col] = -1.0, -1.0
                A_rows.append(row)
                b.append(-x)
                col += 1

    first_extra = len(A_rows)
    for k in range(rows.coeffs.shape[0]):
        row = np.zeros(width)
        row[:n] = rows.coeffs[k]
        A_rows.append(row)
        b.append(float(rows.rhs[k]))

    senses = [LE] * first_extra + list(rows.senses)
    lp = LinearProgram(c, stack_rows(A_rows, width), senses, np.array(b), lower, upper)
    return EpigraphModel(lp, n, constant, first_extra)


def solve_epigraph(model: EpigraphModel) -> EpigraphResult:
    solution = solve_lp(model.lp)
    if not solution.optimal:
        return EpigraphResult(solution, None, None, None)
    return EpigraphResult(
        solution,
        solution.x[: model.n],
        solution.objective + model.constant,
        solution.duals[model.first_extra_row :],
    )
