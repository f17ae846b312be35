"""
Dense two-phase primal simplex with bounded variables.

Problems are always minimizations:

    min c.x  s.t.  A_i.x (<= | = | >=) b_i,  lower <= x <= upper

Variables are mapped onto [0, u] columns (shift, negation or a free split),
every row gets a slack or surplus column, and rows are flipped so the
right-hand side is nonnegative. Rows whose slack cannot start basic get an
artificial column; phase 1 drives the artificials to zero.
"""

from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np

from robust_newsvendor.config import config
from robust_newsvendor.errors import LpError
from robust_newsvendor.logger import logger


OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"

LE, EQ, GE = "<=", "=", ">="


@dataclass
class LinearProgram:
    c: np.ndarray
    A: np.ndarray
    senses: List[str]
    b: np.ndarray
    lower: Optional[np.ndarray] = None
    upper: Optional[np.ndarray] = None

    def __post_init__(self):
        self.c = np.asarray(self.c, dtype=float).reshape(-1)
        n = self.c.size
        self.A = np.asarray(self.A, dtype=float).reshape(-1, n) if n else np.zeros((len(self.senses), 0))
        self.b = np.asarray(self.b, dtype=float).reshape(-1)
        self.senses = list(self.senses)
        self.lower = np.zeros(n) if self.lower is None else np.asarray(self.lower, dtype=float).reshape(-1)
        self.upper = np.full(n, np.inf) if self.upper is None else np.asarray(self.upper, dtype=float).reshape(-1)

        m = self.A.shape[0]
        if self.b.size != m or len(self.senses) != m:
            raise LpError(f"row count mismatch: A has {m} rows, b {self.b.size}, senses {len(self.senses)}")
        if self.lower.size != n or self.upper.size != n:
            raise LpError("bound vectors must match the number of variables")
        if any(s not in (LE, EQ, GE) for s in self.senses):
            raise LpError(f"unknown constraint sense in {self.senses}")
        if np.any(self.lower > self.upper):
            raise LpError("variable lower bound exceeds upper bound")
        if not (np.all(np.isfinite(self.A)) and np.all(np.isfinite(self.b)) and np.all(np.isfinite(self.c))):
            raise LpError("objective, matrix and right-hand side must be finite")
        if np.any(self.lower == np.inf) or np.any(self.upper == -np.inf):
            raise LpError("variable bounds point the wrong way")

    @property
    def shape(self):
        return self.A.shape


@dataclass
class LpSolution:
    status: str
    x: Optional[np.ndarray] = None
    objective: Optional[float] = None
    duals: Optional[np.ndarray] = None  # d(objective) / d(b_i)
    iterations: int = 0

    @property
    def optimal(self) -> bool:
        return self.status == OPTIMAL


class _BoundedSimplex:
    """Tableau state for min c.x, A x = b, 0 <= x <= u with b >= 0"""

    def __init__(self, A, b, u, basis, banned):
        self.T = A.copy()
        self.u = u.copy()
        self.basis = list(basis)
        self.init_cols = list(basis)
        self.at_upper = np.zeros(A.shape[1], dtype=bool)
        self.banned = banned
        self.A = A
        self.b = b
        self.xB = b.copy()
        self.iterations = 0
        self.feas_tol = config.LP_FEASIBILITY_TOL
        self.piv_tol = config.LP_PIVOT_TOL

    def refresh_values(self):
        rhs = self.b - self.A[:, self.at_upper] @ self.u[self.at_upper]
        self.xB = self.T[:, self.init_cols] @ rhs

    def binv(self) -> np.ndarray:
        return self.T[:, self.init_cols]

    def values(self) -> np.ndarray:
        x = np.where(self.at_upper, self.u, 0.0)
        x[self.basis] = self.xB
        return x

    def run(self, cost: np.ndarray) -> str:
        m, N = self.T.shape
        is_basic = np.zeros(N, dtype=bool)
        is_basic[self.basis] = True
        degenerate_run = 0
        bland = False
        bland_after = 2 * (m + N)

        while True:
            if self.iterations >= config.LP_MAX_ITERATIONS:
                raise LpError(f"simplex iteration limit {config.LP_MAX_ITERATIONS} reached")

            reduced = cost - cost[self.basis] @ self.T if m else cost.copy()
            can_rise = ~is_basic & ~self.at_upper & ~self.banned & (reduced < -self.feas_tol)
            can_fall = ~is_basic & self.at_upper & ~self.banned & (reduced > self.feas_tol)
            eligible = np.flatnonzero(can_rise | can_fall)
            if eligible.size == 0:
                return OPTIMAL

            if bland:
                j = int(eligible[0])
            else:
                j = int(eligible[np.argmax(np.abs(reduced[eligible]))])
            direction = 1.0 if can_rise[j] else -1.0
            col = self.T[:, j] * direction

            best, leave_row, leave_to_upper = np.inf, -1, False
            for i in range(m):
                if col[i] > self.piv_tol:
                    ratio = max(self.xB[i], 0.0) / col[i]
                    to_upper = False
                elif col[i] < -self.piv_tol and np.isfinite(self.u[self.basis[i]]):
                    ratio = max(self.u[self.basis[i]] - self.xB[i], 0.0) / -col[i]
                    to_upper = True
                else:
                    continue
                if leave_row < 0 or ratio < best - self.feas_tol:
                    take = True
                elif abs(ratio - best) <= self.feas_tol:
                    if bland:
                        take = self.basis[i] < self.basis[leave_row]
                    else:
                        take = abs(col[i]) > abs(col[leave_row])
                else:
                    take = False
                if take:
                    best, leave_row, leave_to_upper = ratio, i, to_upper

            # the entering column may hit its own opposite bound first
            if self.u[j] <= best:
                step, leave_row = self.u[j], -1
            else:
                step = best
            if not np.isfinite(step):
                return UNBOUNDED

            self.iterations += 1
            if step <= self.feas_tol:
                degenerate_run += 1
                if not bland and degenerate_run > bland_after:
                    bland = True
                    logger.debug(f"simplex: {degenerate_run} degenerate pivots, switching to Bland's rule")
            else:
                degenerate_run = 0

            self.xB = self.xB - col * step
            if leave_row < 0:
                self.at_upper[j] = not self.at_upper[j]
                continue

            entering_value = step if direction > 0 else self.u[j] - step
            leaving = self.basis[leave_row]
            pivot = self.T[leave_row, j]
            self.T[leave_row] /= pivot
            for i in range(m):
                if i != leave_row and self.T[i, j] != 0.0:
                    self.T[i] -= self.T[i, j] * self.T[leave_row]
            self.basis[leave_row] = j
            self.xB[leave_row] = entering_value
            is_basic[j], is_basic[leaving] = True, False
            self.at_upper[j] = False
            self.at_upper[leaving] = leave_to_upper


def _column_map(lower: np.ndarray, upper: np.ndarray):
    """x = offset + M @ x' with every x' in [0, ub]"""
    n = lower.size
    blocks, offset, ub = [], np.zeros(n), []
    for j in range(n):
        lo, hi = lower[j], upper[j]
        if np.isfinite(lo):
            offset[j] = lo
            blocks.append((j, 1.0))
            ub.append(hi - lo)
        elif np.isfinite(hi):
            offset[j] = hi
            blocks.append((j, -1.0))
            ub.append(np.inf)
        else:
            blocks.append((j, 1.0))
            ub.append(np.inf)
            blocks.append((j, -1.0))
            ub.append(np.inf)
    M = np.zeros((n, len(blocks)))
    for k, (j, sign) in enumerate(blocks):
        M[j, k] = sign
    return offset, M, np.asarray(ub, dtype=float)


def solve_lp(lp: LinearProgram) -> LpSolution:
    """
    Solve a LinearProgram.

    Returns:
        LpSolution: status optimal, infeasible or unbounded; for optimal
        solves also the primal point, objective and row duals.

    Raises:
        LpError: if the iteration limit is reached
    """
    m, n = lp.shape
    offset, M, col_ub = _column_map(lp.lower, lp.upper)
    A = lp.A @ M
    b = lp.b - lp.A @ offset
    c = M.T @ lp.c
    n_cols = A.shape[1]

    # slack / surplus columns
    slack_sign = np.array([1.0 if s == LE else -1.0 if s == GE else 0.0 for s in lp.senses])
    slack_rows = np.flatnonzero(slack_sign != 0.0)
    S = np.zeros((m, slack_rows.size))
    S[slack_rows, np.arange(slack_rows.size)] = slack_sign[slack_rows]

    row_sign = np.where(b < 0.0, -1.0, 1.0)
    A_std = np.hstack([A, S]) * row_sign[:, None]
    b_std = b * row_sign

    basis: List[int] = [-1] * m
    for k, i in enumerate(slack_rows):
        if A_std[i, n_cols + k] > 0.0:
            basis[i] = n_cols + k
    art_rows = [i for i in range(m) if basis[i] < 0]
    R = np.zeros((m, len(art_rows)))
    first_art = n_cols + slack_rows.size
    for k, i in enumerate(art_rows):
        R[i, k] = 1.0
        basis[i] = first_art + k
    A_full = np.hstack([A_std, R])
    N = A_full.shape[1]
    u = np.concatenate([col_ub, np.full(slack_rows.size, np.inf), np.full(len(art_rows), np.inf)])
    is_art = np.zeros(N, dtype=bool)
    is_art[first_art:] = True

    tab = _BoundedSimplex(A_full, b_std, u, basis, banned=np.zeros(N, dtype=bool))

    if art_rows:
        phase1 = np.where(is_art, 1.0, 0.0)
        tab.run(phase1)
        tab.refresh_values()
        infeasibility = float(phase1[tab.basis] @ tab.xB)
        if infeasibility > config.LP_FEASIBILITY_TOL * max(1.0, float(np.max(np.abs(b_std), initial=0.0))):
            logger.debug(f"simplex: infeasible, phase-1 residual {infeasibility:.3g}")
            return LpSolution(INFEASIBLE, iterations=tab.iterations)
        tab.u[is_art] = 0.0
        tab.at_upper[is_art] = False
        tab.banned = is_art

    cost = np.concatenate([c, np.zeros(N - n_cols)])
    status = tab.run(cost)
    if status == UNBOUNDED:
        logger.debug("simplex: unbounded direction found")
        return LpSolution(UNBOUNDED, iterations=tab.iterations)
    tab.refresh_values()

    x_std = tab.values()
    x = offset + M @ x_std[:n_cols]
    duals = (cost[tab.basis] @ tab.binv()) * row_sign if m else np.zeros(0)
    objective = float(lp.c @ x)
    logger.debug(f"simplex: optimal after {tab.iterations} iterations, objective {objective:.10g}")
    return LpSolution(OPTIMAL, x, objective, duals, tab.iterations)


def stack_rows(rows: Sequence[np.ndarray], n: int) -> np.ndarray:
    return np.vstack(rows) if rows else np.zeros((0, n))
