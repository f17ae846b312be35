"""
Ambiguity-set data for a single demand (or yield) variable and the
extremal distributions that attain its tight cost bounds.
"""

import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

from scipy.special import gammaln

from robust_newsvendor.errors import InfeasibleMomentsError, MissingParameterError
from robust_newsvendor.logger import logger


BOUND_TOL = 1e-9
PROB_DROP_TOL = 1e-14
PROB_SUM_TOL = 1e-12


@dataclass(frozen=True)
class MomentSpec:
    """Mean, MAD and range of one demand variable, optionally with beta and sigma"""

    a: float
    mu: float
    b: float
    delta: float
    beta: Optional[float] = None  # P(D >= mu)
    sigma: Optional[float] = None  # only the mean-variance baseline reads it

    @property
    def degenerate(self) -> bool:
        """True when the only feasible law is the point mass at mu"""
        return self.mu - self.a <= 0.0 or self.b - self.mu <= 0.0 or self.delta <= 0.0

    def mad_upper_bound(self) -> float:
        if self.b <= self.a:
            return 0.0
        return 2.0 * (self.b - self.mu) * (self.mu - self.a) / (self.b - self.a)

    def beta_bounds(self) -> Tuple[float, float]:
        lower = self.delta / (2.0 * (self.b - self.mu)) if self.b > self.mu else 0.0
        upper = 1.0 - self.delta / (2.0 * (self.mu - self.a)) if self.mu > self.a else 1.0
        return lower, upper

    def with_beta(self, beta: Optional[float]) -> "MomentSpec":
        return MomentSpec(self.a, self.mu, self.b, self.delta, beta, self.sigma)


@dataclass
class ValidationReport:
    """Outcome of validate_moment_spec: every violated invariant, plus non-fatal notes"""

    violations: List[str] = field(default_factory=list)
    notes: List[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


@dataclass(frozen=True)
class DiscreteDistribution:
    """Finite support with strictly increasing points"""

    points: Tuple[float, ...]
    probs: Tuple[float, ...]

    def __post_init__(self):
        if len(self.points) != len(self.probs) or not self.points:
            raise ValueError("points and probs must be non-empty and of equal length")
        if any(p < 0.0 for p in self.probs):
            raise ValueError("probabilities must be nonnegative")
        if abs(math.fsum(self.probs) - 1.0) > PROB_SUM_TOL:
            raise ValueError(f"probabilities sum to {math.fsum(self.probs)!r}, not 1")
        if any(x1 >= x2 for x1, x2 in zip(self.points, self.points[1:])):
            raise ValueError("support points must be strictly increasing")

    @classmethod
    def from_atoms(cls, points: Sequence[float], probs: Sequence[float]) -> "DiscreteDistribution":
        """Merge equal points, drop near-zero mass and renormalize"""
        merged: dict = {}
        for x, p in zip(points, probs):
            merged[float(x)] = merged.get(float(x), 0.0) + float(p)
        kept = sorted((x, p) for x, p in merged.items() if p >= PROB_DROP_TOL)
        if not kept:
            raise ValueError("distribution has no mass")
        total = math.fsum(p for _, p in kept)
        return cls(tuple(x for x, _ in kept), tuple(p / total for _, p in kept))

    @classmethod
    def point_mass(cls, x: float) -> "DiscreteDistribution":
        return cls((float(x),), (1.0,))

    @property
    def mean(self) -> float:
        return math.fsum(x * p for x, p in zip(self.points, self.probs))

    def shortfall(self, q: float) -> float:
        """E(D - q)^+"""
        return math.fsum(p * max(x - q, 0.0) for x, p in zip(self.points, self.probs))


@dataclass(frozen=True)
class DiscreteMoments:
    mean: float
    mad: float
    variance: float
    beta: float  # P(D >= mean)


def discrete_moments(dist: DiscreteDistribution) -> DiscreteMoments:
    """Mean, MAD, variance and P(D >= mean) of a finite distribution"""
    mu = dist.mean
    pairs = list(zip(dist.points, dist.probs))
    mad = math.fsum(p * abs(x - mu) for x, p in pairs)
    variance = math.fsum(p * (x - mu) ** 2 for x, p in pairs)
    beta = math.fsum(p for x, p in pairs if x >= mu - 1e-12)
    return DiscreteMoments(mu, mad, variance, beta)


def mad_variance_bounds(spec: MomentSpec) -> Tuple[Optional[float], float]:
    """
    Bounds on the variance implied by (mu, delta, [a, b]) and, when known, beta:
    delta^2 / (4 beta (1 - beta)) <= sigma^2 <= delta (b - a) / 2
    """
    upper = spec.delta * (spec.b - spec.a) / 2.0
    lower = None
    if spec.beta is not None and 0.0 < spec.beta < 1.0:
        lower = spec.delta**2 / (4.0 * spec.beta * (1.0 - spec.beta))
    return lower, upper


def validate_moment_spec(spec: MomentSpec) -> ValidationReport:
    """
    Check every invariant of a MomentSpec and report all violations.

    Never raises. Comparisons use an absolute tolerance of 1e-9 because
    user-entered moments are usually rounded.
    """
    report = ValidationReport()
    tol = BOUND_TOL
    a, mu, b, delta = spec.a, spec.mu, spec.b, spec.delta

    values = {"a": a, "mu": mu, "b": b, "delta": delta}
    bad = [name for name, v in values.items() if v is None or not math.isfinite(v)]
    if bad:
        report.violations.append(f"{', '.join(bad)} must be finite numbers")
        return report

    if a < -tol:
        report.violations.append(f"a={a:g} must be nonnegative")
    if mu < a - tol or mu > b + tol:
        report.violations.append(f"mu={mu:g} outside support [{a:g}, {b:g}]")
    if b < a - tol:
        report.violations.append(f"b={b:g} below a={a:g}")
    if delta < -tol:
        report.violations.append(f"delta={delta:g} must be nonnegative")

    if b - a <= tol:
        if delta > tol:
            report.violations.append("delta must be 0 when a = b")
    else:
        bound = spec.mad_upper_bound()
        if delta > bound + tol:
            report.violations.append(f"delta exceeds 2(b−μ)(μ−a)/(b−a)={bound:g}")
        elif delta > tol and abs(delta - bound) <= tol:
            report.notes.append(
                f"delta equals its upper bound {bound:g}; the worst case puts no mass on mu"
            )

    if spec.beta is not None:
        beta = spec.beta
        if not 0.0 <= beta <= 1.0:
            report.violations.append(f"beta={beta:g} must lie in [0, 1]")
        else:
            lo, hi = spec.beta_bounds()
            if beta < lo - tol or beta > hi + tol:
                report.violations.append(
                    f"beta={beta:g} outside [δ/(2(b−μ)), 1−δ/(2(μ−a))]=[{lo:g}, {hi:g}]"
                )

    if spec.sigma is not None:
        sigma = spec.sigma
        if sigma < -tol:
            report.violations.append(f"sigma={sigma:g} must be nonnegative")
        elif delta > sigma + tol:
            report.violations.append(f"delta={delta:g} exceeds sigma={sigma:g}")
        else:
            var_lo, var_hi = mad_variance_bounds(spec)
            slack = tol * max(1.0, sigma**2)
            if sigma**2 > var_hi + slack:
                report.violations.append(
                    f"sigma^2={sigma**2:g} exceeds δ(b−a)/2={var_hi:g}"
                )
            if var_lo is not None and sigma**2 < var_lo - slack:
                report.violations.append(
                    f"sigma^2={sigma**2:g} below δ²/(4β(1−β))={var_lo:g}"
                )

    return report


def ensure_valid(spec: MomentSpec, item: Optional[int] = None) -> MomentSpec:
    """Raise InfeasibleMomentsError unless the spec validates"""
    report = validate_moment_spec(spec)
    if not report.ok:
        raise InfeasibleMomentsError(report.violations, item)
    for note in report.notes:
        logger.warning(note if item is None else f"item {item}: {note}")
    return spec


def worst_case_probabilities(spec: MomentSpec) -> Tuple[float, float, float]:
    """
    Raw masses on (a, mu, b) of the worst-case law, zero entries kept.

    Degenerate specs give (0, 1, 0).
    """
    if spec.degenerate:
        return 0.0, 1.0, 0.0
    p_a = spec.delta / (2.0 * (spec.mu - spec.a))
    p_b = spec.delta / (2.0 * (spec.b - spec.mu))
    p_mu = max(1.0 - p_a - p_b, 0.0)
    return p_a, p_mu, p_b


def worst_case_three_point(spec: MomentSpec) -> DiscreteDistribution:
    """Three-point law on {a, mu, b} maximizing E(D - q)^+ for every q"""
    ensure_valid(spec)
    if spec.degenerate:
        return DiscreteDistribution.point_mass(spec.mu)
    probs = worst_case_probabilities(spec)
    return DiscreteDistribution.from_atoms((spec.a, spec.mu, spec.b), probs)


def best_case_points(spec: MomentSpec) -> Tuple[Tuple[float, float], Tuple[float, float]]:
    """
    Raw two-point law ((lo, hi), (1 - beta, beta)) minimizing E(D - q)^+.

    Requires beta; degenerate specs collapse both points onto mu.
    """
    if spec.beta is None:
        raise MissingParameterError("beta required for lower bound")
    beta = spec.beta
    if spec.degenerate:
        return (spec.mu, spec.mu), (1.0 - beta, beta)
    # within tolerance of the beta bounds the clipped points stay in [a, b]
    beta = min(max(beta, 1e-300), 1.0 - 1e-16)
    hi = min(spec.mu + spec.delta / (2.0 * beta), spec.b)
    lo = max(spec.mu - spec.delta / (2.0 * (1.0 - beta)), spec.a)
    return (lo, hi), (1.0 - spec.beta, spec.beta)


def best_case_two_point(spec: MomentSpec) -> DiscreteDistribution:
    """Two-point law with mean mu, MAD delta and P(D >= mu) = beta"""
    if spec.beta is None:
        raise MissingParameterError("beta required for lower bound")
    ensure_valid(spec)
    if spec.degenerate:
        return DiscreteDistribution.point_mass(spec.mu)
    points, probs = best_case_points(spec)
    return DiscreteDistribution.from_atoms(points, probs)


def em_two_point(spec: MomentSpec) -> DiscreteDistribution:
    """Mean-range extremal law on {a, b} (Edmundson-Madansky)"""
    if spec.mu < spec.a - BOUND_TOL or spec.mu > spec.b + BOUND_TOL:
        raise InfeasibleMomentsError([f"mu={spec.mu:g} outside support [{spec.a:g}, {spec.b:g}]"])
    if spec.b <= spec.a:
        return DiscreteDistribution.point_mass(spec.a)
    width = spec.b - spec.a
    p_a = min(max((spec.b - spec.mu) / width, 0.0), 1.0)
    return DiscreteDistribution.from_atoms((spec.a, spec.b), (p_a, 1.0 - p_a))


def mad_of_named_distribution(name: str, **params: float) -> float:
    """
    Closed-form MAD of a named family.

    uniform(a, b); beta(k, lam, a=0, b=1); triangular(a, b, c) with mode c;
    normal(sigma); gamma(k, lam) with rate lam.
    """
    family = name.lower()
    if family == "uniform":
        return (params["b"] - params["a"]) / 4.0
    if family == "beta":
        k, lam = params["k"], params["lam"]
        width = params.get("b", 1.0) - params.get("a", 0.0)
        log_ratio = (
            math.log(2.0)
            + k * math.log(k)
            + lam * math.log(lam)
            + gammaln(k + lam)
            - (k + lam + 1.0) * math.log(k + lam)
            - gammaln(k)
            - gammaln(lam)
        )
        return math.exp(log_ratio) * width
    if family == "triangular":
        a, b, c = params["a"], params["b"], params["c"]
        if b <= a:
            return 0.0
        # both branches agree in the limit a + b = 2c
        if a + b <= 2.0 * c:
            return 2.0 * (b + c - 2.0 * a) ** 3 / (81.0 * (a - b) * (a - c))
        return 2.0 * (a + c - 2.0 * b) ** 3 / (81.0 * (a - b) * (b - c))
    if family == "normal":
        return math.sqrt(2.0 / math.pi) * params["sigma"]
    if family == "gamma":
        k, lam = params["k"], params["lam"]
        return 2.0 * math.exp(k * math.log(k) - gammaln(k) - k) / lam
    raise ValueError(f"unknown distribution family: {name}")
