"""Finitely supported distributions over cube functions and their deviation.

The deviation at k is E || (1/k) sum_i (f_i - f_bar) ||_inf for k independent
draws; kappa(eps) is the largest k at which it stays above eps. Both are
estimated by Monte Carlo with exact sup-norms over the whole cube.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .config import LIMITS, TOL
from .fourier import (
    BooleanFunction,
    FourierSpectrum,
    fourier_transform,
    inverse_transform,
    smoothness,
    truncate_spectrum,
)


@dataclass(frozen=True, eq=False)
class OutlawDistribution:
    """Weighted support of functions on {-1,1}^n, stored as a (m, 2^n) table."""

    n: int
    weights: np.ndarray
    table: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=np.float64).reshape(-1)
        t = np.asarray(self.table, dtype=np.float64)
        if len(w) == 0:
            raise ValueError("empty support")
        if t.shape != (len(w), 1 << self.n):
            raise ValueError(f"table must have shape {(len(w), 1 << self.n)}, got {t.shape}")
        if np.any(w < -TOL) or abs(w.sum() - 1.0) > TOL:
            raise ValueError("weights must be nonnegative and sum to 1")
        for a in (w, t):
            a.setflags(write=False)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "table", t)

    @classmethod
    def from_functions(cls, functions, weights=None) -> "OutlawDistribution":
        functions = list(functions)
        if not functions:
            raise ValueError("empty support")
        n = functions[0].n
        if weights is None:
            weights = np.full(len(functions), 1.0 / len(functions))
        return cls(n, np.asarray(weights, dtype=np.float64), np.array([f.values for f in functions]))

    @property
    def support(self) -> list[tuple[float, BooleanFunction]]:
        return [(float(w), BooleanFunction(self.n, row)) for w, row in zip(self.weights, self.table)]

    @property
    def mean(self) -> BooleanFunction:
        return BooleanFunction(self.n, self.weights @ self.table)

    def spectra(self) -> list[FourierSpectrum]:
        return [fourier_transform(BooleanFunction(self.n, row)) for row in self.table]

    def scaled(self, factor: float) -> "OutlawDistribution":
        return OutlawDistribution(self.n, self.weights, self.table * factor)


def point_mass(f: BooleanFunction) -> OutlawDistribution:
    return OutlawDistribution.from_functions([f])


def dictator_distribution(n: int) -> OutlawDistribution:
    """Uniform over x -> x_i; an (n/2, 1)-outlaw that is far from smooth."""
    from .fourier import cube_points

    return OutlawDistribution(n, np.full(n, 1.0 / n), cube_points(n).T.astype(np.float64))


@dataclass
class DeviationEstimate:
    k: int
    mean_deviation: float
    std_error: float
    trials: int
    seed: int

    def to_dict(self) -> dict:
        return asdict(self)


def _chunk_rows(n: int) -> int:
    return max(1, (1 << 22) // (1 << n))


def sample_deviations(mu: OutlawDistribution, k: int, trials: int, rng: np.random.Generator) -> np.ndarray:
    """One exact sup-norm deviation per trial, each from k weighted draws."""
    if k < 1:
        raise ValueError("k must be at least 1")
    m = len(mu.weights)
    centered = mu.table - mu.weights @ mu.table
    out = np.empty(trials)
    step = _chunk_rows(mu.n)
    for start in range(0, trials, step):
        t = min(step, trials - start)
        counts = rng.multinomial(k, mu.weights, size=t) if m > 1 else np.full((t, 1), k)
        avg = (counts / k) @ centered
        out[start:start + t] = np.abs(avg).max(axis=1)
    return out


def deviation(mu: OutlawDistribution, k: int, trials: int = 1000, seed: int = 0) -> DeviationEstimate:
    """Monte Carlo estimate of E || (1/k) sum (f_i - f_bar) ||_inf."""
    vals = sample_deviations(mu, k, trials, np.random.default_rng(seed))
    se = float(vals.std(ddof=1) / math.sqrt(trials)) if trials > 1 else 0.0
    return DeviationEstimate(k, float(vals.mean()), se, trials, seed)


@dataclass
class KappaScan:
    epsilon: float
    conservative: int
    optimistic: int
    scan: list[DeviationEstimate] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "epsilon": self.epsilon,
            "conservative": self.conservative,
            "optimistic": self.optimistic,
            "scan": [e.to_dict() for e in self.scan],
        }


def kappa_scan(mu: OutlawDistribution, epsilon: float, trials: int = 1000, seed: int = 0, k_max: int = 32) -> KappaScan:
    """Bracket kappa_mu(epsilon) by scanning k = 1..k_max.

    ``conservative`` is the largest k whose estimate minus the configured
    standard-error slack reaches epsilon; ``optimistic`` uses the estimate plus
    the slack. No monotonicity in k is assumed.
    """
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    ss = np.random.SeedSequence(seed)
    child_seeds = ss.generate_state(k_max, dtype=np.uint64)
    scan, lo, hi = [], 0, 0
    for k in range(1, k_max + 1):
        est = deviation(mu, k, trials, int(child_seeds[k - 1]))
        scan.append(est)
        slack = LIMITS.slack_sigmas * est.std_error
        if est.mean_deviation - slack >= epsilon - TOL:
            lo = k
        if est.mean_deviation + slack >= epsilon - TOL:
            hi = k
    return KappaScan(epsilon, lo, hi, scan)


def kappa(mu: OutlawDistribution, epsilon: float, trials: int = 1000, seed: int = 0, k_max: int = 32) -> int:
    """Conservative estimate of kappa_mu(epsilon); 0 when no k qualifies."""
    return kappa_scan(mu, epsilon, trials, seed, k_max).conservative


def max_smoothness(mu: OutlawDistribution) -> float:
    return max(smoothness(s) for s in mu.spectra())


def normalize_smooth(mu: OutlawDistribution) -> OutlawDistribution:
    """Scale the whole support by 1/sigma so every function is 1-smooth.

    Supports that are already 1-smooth (including constants) are returned as is.
    """
    sigma = max_smoothness(mu)
    if sigma <= 1.0 + TOL:
        return mu
    return mu.scaled(1.0 / sigma)


def truncation_degree(epsilon: float) -> int:
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    return math.ceil(4.0 / epsilon - 1e-12)


def truncate_distribution(mu: OutlawDistribution, epsilon: float) -> OutlawDistribution:
    """Replace every support function by its degree-ceil(4/eps) truncation."""
    q = truncation_degree(epsilon)
    spectra = mu.spectra()
    worst = max(smoothness(s) for s in spectra)
    if worst > 1.0 + 1e-7:
        raise ValueError(f"support is not 1-smooth (sigma = {worst:.6g})")
    rows = [inverse_transform(truncate_spectrum(s, q)).values for s in spectra]
    return OutlawDistribution(mu.n, mu.weights, np.array(rows))
