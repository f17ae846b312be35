"""
Ground-truth demand families with exact expected shortfall and cost.
"""

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Dict, Optional, Sequence, Tuple

import numpy as np
from scipy import integrate, stats
from scipy.special import betainc

from robust_newsvendor.core.moments import (
    DiscreteDistribution,
    MomentSpec,
    discrete_moments,
    mad_of_named_distribution,
)
from robust_newsvendor.core.single_item import ItemEconomics


UNIFORM = "uniform"
BETA = "beta"
TRIANGULAR = "triangular"
DISCRETE = "discrete"
FAMILIES = (UNIFORM, BETA, TRIANGULAR, DISCRETE)


@dataclass(frozen=True)
class GroundTruthDistribution:
    """
    A demand law on [a, b].

    params holds (k, lam) for beta and (mode,) for triangular; discrete
    laws carry their atoms in ``atoms``.
    """

    family: str
    a: float
    b: float
    params: Tuple[float, ...] = ()
    atoms: Optional[DiscreteDistribution] = None

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown ground-truth family: {self.family}")
        if self.family == DISCRETE:
            if self.atoms is None:
                raise ValueError("discrete ground truth needs atoms")
        elif not self.b > self.a:
            raise ValueError(f"support [{self.a}, {self.b}] must have positive width")
        if self.family == TRIANGULAR and not self.a <= self.params[0] <= self.b:
            raise ValueError("triangular mode outside support")
        if self.family == BETA and not (self.params[0] > 0 and self.params[1] > 0):
            raise ValueError("beta shape parameters must be positive")

    @classmethod
    def uniform(cls, a: float, b: float) -> "GroundTruthDistribution":
        return cls(UNIFORM, float(a), float(b))

    @classmethod
    def beta(cls, k: float, lam: float, a: float = 0.0, b: float = 1.0) -> "GroundTruthDistribution":
        return cls(BETA, float(a), float(b), (float(k), float(lam)))

    @classmethod
    def triangular(cls, a: float, b: float, mode: float) -> "GroundTruthDistribution":
        return cls(TRIANGULAR, float(a), float(b), (float(mode),))

    @classmethod
    def discrete(cls, points: Sequence[float], probs: Sequence[float]) -> "GroundTruthDistribution":
        atoms = DiscreteDistribution.from_atoms(points, probs)
        return cls(DISCRETE, atoms.points[0], atoms.points[-1], (), atoms)

    @cached_property
    def rv(self):
        width = self.b - self.a
        if self.family == UNIFORM:
            return stats.uniform(loc=self.a, scale=width)
        if self.family == BETA:
            return stats.beta(self.params[0], self.params[1], loc=self.a, scale=width)
        if self.family == TRIANGULAR:
            return stats.triang((self.params[0] - self.a) / width, loc=self.a, scale=width)
        return None

    @cached_property
    def mean(self) -> float:
        if self.family == UNIFORM:
            return 0.5 * (self.a + self.b)
        if self.family == BETA:
            k, lam = self.params
            return self.a + (self.b - self.a) * k / (k + lam)
        if self.family == TRIANGULAR:
            return (self.a + self.b + self.params[0]) / 3.0
        return self.atoms.mean

    @cached_property
    def mad(self) -> float:
        if self.family == UNIFORM:
            return mad_of_named_distribution(UNIFORM, a=self.a, b=self.b)
        if self.family == BETA:
            k, lam = self.params
            return mad_of_named_distribution(BETA, k=k, lam=lam, a=self.a, b=self.b)
        if self.family == TRIANGULAR:
            return mad_of_named_distribution(TRIANGULAR, a=self.a, b=self.b, c=self.params[0])
        return discrete_moments(self.atoms).mad

    @cached_property
    def sigma(self) -> float:
        if self.family == DISCRETE:
            return math.sqrt(discrete_moments(self.atoms).variance)
        return float(self.rv.std())

    @cached_property
    def prob_above_mean(self) -> float:
        """P(D >= mu)"""
        if self.family == DISCRETE:
            return discrete_moments(self.atoms).beta
        return float(self.rv.sf(self.mean))

    def moment_spec(self, with_beta: bool = True, with_sigma: bool = True) -> MomentSpec:
        """(a, mu, b, delta) of this law, optionally with beta and sigma"""
        return MomentSpec(
            self.a,
            self.mean,
            self.b,
            self.mad,
            self.prob_above_mean if with_beta else None,
            self.sigma if with_sigma else None,
        )

    def cdf(self, x: float) -> float:
        if self.family == DISCRETE:
            return math.fsum(p for xk, p in zip(self.atoms.points, self.atoms.probs) if xk <= x)
        return float(self.rv.cdf(x))

    def ppf(self, u):
        """Generalized inverse CDF; accepts scalars or arrays"""
        u = np.clip(np.asarray(u, dtype=float), 0.0, 1.0)
        if self.family == DISCRETE:
            cum = np.cumsum(self.atoms.probs)
            idx = np.searchsorted(cum, u - 1e-15, side="left")
            idx = np.minimum(idx, len(self.atoms.points) - 1)
            return np.asarray(self.atoms.points)[idx]
        return self.rv.ppf(u)

    def shortfall(self, q: float) -> float:
        """E(D - q)^+"""
        if self.family == DISCRETE:
            return self.atoms.shortfall(q)
        a, b = self.a, self.b
        if q <= a:
            return self.mean - q
        if q >= b:
            return 0.0
        if self.family == UNIFORM:
            return (b - q) ** 2 / (2.0 * (b - a))
        if self.family == TRIANGULAR:
            mode = self.params[0]
            if q >= mode:
                return (b - q) ** 3 / (3.0 * (b - a) * (b - mode))
            return self.mean - q + (q - a) ** 3 / (3.0 * (b - a) * (mode - a))
        return self._beta_shortfall(q)

    def _beta_shortfall(self, q: float) -> float:
        k, lam = self.params
        width = self.b - self.a
        x = (q - self.a) / width
        value = k / (k + lam) * (1.0 - betainc(k + 1.0, lam, x)) - x * (1.0 - betainc(k, lam, x))
        if not math.isfinite(value):
            value, _ = integrate.quad(lambda t: self.rv.sf(t), q, self.b, epsabs=1e-10)
            return max(value, 0.0)
        return max(value * width, 0.0)


def expected_shortfall(dist: GroundTruthDistribution, q: float) -> float:
    return dist.shortfall(q)


def item_cost(econ: ItemEconomics, dist: GroundTruthDistribution, q: float) -> float:
    return econ.c * (econ.d * (q - dist.mean) + (econ.m + econ.d) * dist.shortfall(q))


def true_cost(
    economics: Sequence[ItemEconomics],
    dists: Sequence[GroundTruthDistribution],
    q: Sequence[float],
) -> float:
    """Expected cost of an order vector under the true demand laws"""
    if not len(economics) == len(dists) == len(q):
        raise ValueError("economics, distributions and order vector differ in length")
    return math.fsum(item_cost(econ, dist, qi) for econ, dist, qi in zip(economics, dists, q))


# 九种真实需求分布
DEMAND_CASES: Dict[int, GroundTruthDistribution] = {
    1: GroundTruthDistribution.uniform(10, 50),
    2: GroundTruthDistribution.uniform(10, 100),
    3: GroundTruthDistribution.uniform(10, 200),
    4: GroundTruthDistribution.beta(1, 3, 0, 50),
    5: GroundTruthDistribution.beta(2, 2, 0, 50),
    6: GroundTruthDistribution.beta(3, 1, 0, 50),
    7: GroundTruthDistribution.triangular(10, 50, 18),
    8: GroundTruthDistribution.triangular(10, 50, 30),
    9: GroundTruthDistribution.triangular(10, 50, 42),
}


def random_triangular(rng: np.random.Generator) -> GroundTruthDistribution:
    a = float(rng.uniform(0.0, 20.0))
    b = a + float(rng.uniform(10.0, 80.0))
    return GroundTruthDistribution.triangular(a, b, float(rng.uniform(a, b)))


def make_rng(seed: int) -> np.random.Generator:
    """Counter-based generator; identical streams for identical seeds"""
    return np.random.Generator(np.random.Philox(seed))
