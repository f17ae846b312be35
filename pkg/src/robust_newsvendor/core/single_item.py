"""
Single-item newsvendor: classical quantile rule, worst/best-case expected
cost in piecewise-linear form, the mean-MAD order rule and Scarf's rule.

Costs are expressed as c * (d * (q - mu) + (m + d) * E(D - q)^+), which is
the expected cost up to the constant -c*m*mu dropped from revenue.
"""

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Tuple

import numpy as np

from robust_newsvendor.core.moments import (
    DiscreteDistribution,
    MomentSpec,
    best_case_points,
    ensure_valid,
    worst_case_probabilities,
)
from robust_newsvendor.logger import logger


QUANTITY_TOL = 1e-10
FLAT_SLOPE_TOL = 1e-12


@dataclass(frozen=True)
class ItemEconomics:
    """Purchase cost c with mark-up m and discount d: p = c(1+m), s = (1-d)c"""

    m: float
    d: float
    c: float = 1.0

    def __post_init__(self):
        if not (self.c > 0 and self.m > 0 and self.d > 0):
            raise ValueError(f"c, m, d must be positive, got c={self.c}, m={self.m}, d={self.d}")

    @property
    def p(self) -> float:
        return self.c * (1.0 + self.m)

    @property
    def s(self) -> float:
        return (1.0 - self.d) * self.c

    @property
    def critical_ratio(self) -> float:
        return self.m / (self.m + self.d)


@dataclass(frozen=True)
class PwlCost:
    """
    Convex piecewise-linear expected cost of one item under a discrete law.

    Piece j has slope ``slopes[j]`` and intercept ``intercepts[j]`` and ends at
    ``knots[j]``; piece 0 starts at 0. Beyond the last knot the cost grows with
    slope c*d.
    """

    econ: ItemEconomics
    knots: Tuple[float, ...]
    probs: Tuple[float, ...]
    slopes: Tuple[float, ...]
    intercepts: Tuple[float, ...]
    mean: float

    @property
    def tail_slope(self) -> float:
        return self.econ.c * self.econ.d

    @property
    def tail_intercept(self) -> float:
        return -self.econ.c * self.econ.d * self.mean

    def capacities(self) -> Tuple[float, ...]:
        """Length of every piece on [0, last knot]"""
        lefts = (0.0,) + self.knots[:-1]
        return tuple(max(right - left, 0.0) for left, right in zip(lefts, self.knots))

    def is_convex(self, tol: float = 1e-12) -> bool:
        chain = self.slopes + (self.tail_slope,)
        return all(s2 >= s1 - tol for s1, s2 in zip(chain, chain[1:]))

    def evaluate(self, q: float) -> float:
        """Pointwise maximum of the pieces and the tail line"""
        slopes = np.append(np.asarray(self.slopes), self.tail_slope)
        intercepts = np.append(np.asarray(self.intercepts), self.tail_intercept)
        return float(np.max(slopes * q + intercepts))


def pwl_from_atoms(
    econ: ItemEconomics,
    points: Sequence[float],
    probs: Sequence[float],
    mean: Optional[float] = None,
) -> PwlCost:
    """
    Build the PWL cost for demand on ``points`` with masses ``probs``.

    Points must be nondecreasing; zero-mass points are kept as knots so the
    piece structure is fixed by the support.
    """
    xs = [float(x) for x in points]
    ps = [float(p) for p in probs]
    if any(x2 < x1 for x1, x2 in zip(xs, xs[1:])):
        raise ValueError("atom points must be nondecreasing")
    if mean is None:
        mean = math.fsum(x * p for x, p in zip(xs, ps))

    c, m, d = econ.c, econ.m, econ.d
    slopes, intercepts = [], []
    for j in range(len(xs)):
        upper_mass = math.fsum(ps[j:])
        upper_first = math.fsum(p * x for p, x in zip(ps[j:], xs[j:]))
        slopes.append(c * (d - (m + d) * upper_mass))
        intercepts.append(c * (-d * mean + (m + d) * upper_first))
    return PwlCost(econ, tuple(xs), tuple(ps), tuple(slopes), tuple(intercepts), mean)


def pwl_pieces(econ: ItemEconomics, spec: MomentSpec) -> PwlCost:
    """Three-piece worst-case cost on knots (a, mu, b)"""
    ensure_valid(spec)
    return pwl_from_atoms(econ, (spec.a, spec.mu, spec.b), worst_case_probabilities(spec), spec.mu)


def best_case_pwl(econ: ItemEconomics, spec: MomentSpec) -> PwlCost:
    """Two-piece best-case cost on the two-point support"""
    ensure_valid(spec)
    points, probs = best_case_points(spec)
    return pwl_from_atoms(econ, points, probs, spec.mu)


def worst_case_cost(econ: ItemEconomics, spec: MomentSpec, q: float) -> float:
    return pwl_pieces(econ, spec).evaluate(q)


def best_case_cost(econ: ItemEconomics, spec: MomentSpec, q: float) -> float:
    return best_case_pwl(econ, spec).evaluate(q)


def expected_cost(econ: ItemEconomics, dist: DiscreteDistribution, q: float) -> float:
    return econ.c * (econ.d * (q - dist.mean) + (econ.m + econ.d) * dist.shortfall(q))


def classical_optimal_quantity(
    econ: ItemEconomics,
    cdf: Callable[[float], float],
    support: Tuple[float, float],
) -> float:
    """
    Smallest q in [a, b] with F(q) >= m / (m + d), by bisection to 1e-10.

    If F(b) never reaches the critical ratio, b is returned with a warning.
    """
    a, b = support
    ratio = econ.critical_ratio
    if cdf(b) < ratio:
        logger.warning(f"critical ratio {ratio:.6g} unreachable (F(b)={cdf(b):.6g}); ordering b={b:g}")
        return float(b)
    if cdf(a) >= ratio:
        return float(a)
    lo, hi = float(a), float(b)
    while hi - lo > QUANTITY_TOL:
        mid = 0.5 * (lo + hi)
        if cdf(mid) >= ratio:
            hi = mid
        else:
            lo = mid
    return hi


@dataclass(frozen=True)
class RobustQuantity:
    q: float
    interval: Tuple[float, float]

    @property
    def unique(self) -> bool:
        return self.interval[0] == self.interval[1]


def robust_single_quantity(econ: ItemEconomics, spec: MomentSpec) -> RobustQuantity:
    """
    Minimizer of the worst-case cost: a, mu or b depending on the signs of the
    middle slopes. A flat piece makes the optimum an interval; its left end
    is returned.
    """
    pwl = pwl_pieces(econ, spec)
    tol = FLAT_SLOPE_TOL * max(1.0, econ.c)
    knots = pwl.knots
    slopes = pwl.slopes + (pwl.tail_slope,)

    # first piece that stops decreasing
    j = next(k for k, slope in enumerate(slopes) if slope >= -tol)
    if j == len(knots):
        return RobustQuantity(knots[-1], (knots[-1], knots[-1]))
    left = knots[j - 1] if j > 0 else 0.0
    right = left
    k = j
    while k < len(knots) and abs(slopes[k]) <= tol:
        right = knots[k]
        k += 1
    return RobustQuantity(left, (left, right))


def scarf_quantity(econ: ItemEconomics, mu: float, sigma: float) -> float:
    """Minimax order under mean and standard deviation only"""
    q = mu + 0.5 * sigma * (math.sqrt(econ.m / econ.d) - math.sqrt(econ.d / econ.m))
    if q < 0.0:
        logger.warning(f"Scarf quantity {q:.6g} negative; clamped to 0")
        return 0.0
    return q


def scarf_cost(econ: ItemEconomics, mu: float, sigma: float, q: float) -> float:
    """Worst-case cost over all laws with mean mu and standard deviation sigma"""
    gap = mu - q
    shortfall = 0.5 * (math.sqrt(sigma**2 + gap**2) + gap)
    return econ.c * (econ.d * (q - mu) + (econ.m + econ.d) * shortfall)
