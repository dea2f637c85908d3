"""Statistical verdicts shared by all experiments.

Every check ends in a StatReport: an estimate, an optional confidence
interval and p-value, the declared tolerance, and the pass/fail verdict
against it.  Tolerances are always declared by the caller; nothing here
invents a threshold.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np
from scipy import special as sp_special
from scipy import stats as sp_stats


@dataclass(frozen=True)
class StatReport:
    name: str
    estimate: float
    ci_low: float | None = None
    ci_high: float | None = None
    statistic: float | None = None
    p_value: float | None = None
    tolerance: float | None = None
    passed: bool | None = None

    def __post_init__(self):
        if self.ci_low is not None and self.ci_high is not None:
            if not (self.ci_low <= self.estimate <= self.ci_high):
                raise ValueError(
                    f"CI [{self.ci_low}, {self.ci_high}] does not bracket "
                    f"estimate {self.estimate}"
                )
        if self.p_value is not None and not (0.0 <= self.p_value <= 1.0):
            raise ValueError(f"p-value {self.p_value} outside [0, 1]")

    def to_dict(self) -> dict:
        # Fixed key order for byte-stable serialization.
        return {
            "name": self.name,
            "estimate": self.estimate,
            "ci_low": self.ci_low,
            "ci_high": self.ci_high,
            "statistic": self.statistic,
            "p_value": self.p_value,
            "tolerance": self.tolerance,
            "passed": self.passed,
        }


def reports_to_json(reports) -> str:
    return json.dumps([r.to_dict() for r in reports], indent=2) + "\n"


@dataclass(frozen=True)
class TailBoundParams:
    """Threshold b, quadratic-variation rate bound k, duration T."""

    b: float
    k: float
    T: float

    def __post_init__(self):
        if not (self.b > 0 and self.k > 0 and self.T > 0):
            raise ValueError("b, k, T must all be positive")

    def bound(self) -> float:
        return 2.0 * np.exp(-self.b**2 / (2.0 * self.k**2 * self.T))


def kolmogorov_p_value(lam: float, tol: float = 1e-12, max_terms: int = 1000) -> float:
    """Asymptotic KS survival probability 2*sum (-1)^(j-1) exp(-2 j^2 lam^2).

    Terms are accumulated until they drop below `tol`; the partial sum is
    clipped into [0, 1].
    """
    if lam <= 0.0:
        return 1.0
    total = 0.0
    sign = 1.0
    for j in range(1, max_terms + 1):
        term = np.exp(-2.0 * j * j * lam * lam)
        total += sign * term
        if term < tol:
            break
        sign = -sign
    return float(min(1.0, max(0.0, 2.0 * total)))


def ks_normal(
    samples,
    mean: float,
    variance: float,
    name: str = "ks_normal",
    p_threshold: float | None = None,
) -> StatReport:
    """One-sample Kolmogorov-Smirnov test against N(mean, variance).

    The statistic is the exact sup-distance between the empirical CDF and
    the Gaussian CDF; the p-value uses the asymptotic series with
    lambda = sqrt(n) * D.
    """
    samples = np.sort(np.asarray(samples, dtype=float))
    n = samples.size
    if n < 20:
        raise ValueError(f"need at least 20 samples, got {n}")
    if not variance > 0.0:
        raise ValueError("variance must be positive")
    z = (samples - mean) / np.sqrt(variance)
    cdf = sp_special.ndtr(z)
    i = np.arange(1, n + 1)
    d_plus = np.max(i / n - cdf)
    d_minus = np.max(cdf - (i - 1) / n)
    d = float(max(d_plus, d_minus))
    p = kolmogorov_p_value(np.sqrt(n) * d)
    passed = None if p_threshold is None else bool(p > p_threshold)
    return StatReport(
        name=name,
        estimate=d,
        statistic=d,
        p_value=p,
        tolerance=p_threshold,
        passed=passed,
    )


def cross_variation(path_a, path_b) -> np.ndarray:
    """Cumulative sum of products of increments of two aligned paths.

    Entry j is the cross-variation accumulated over the first j steps
    (entry 0 is 0).  With path_a is path_b this is the quadratic variation.
    """
    path_a = np.asarray(path_a, dtype=float)
    path_b = np.asarray(path_b, dtype=float)
    if path_a.shape != path_b.shape:
        raise ValueError("mismatched grids")
    if path_a.ndim != 1 or path_a.size < 2:
        raise ValueError("paths must be 1-d with at least 2 samples")
    prod = np.diff(path_a) * np.diff(path_b)
    return np.concatenate(([0.0], np.cumsum(prod)))


def increment_correlations(columns) -> np.ndarray:
    """Pearson correlation matrix of increment columns across an ensemble.

    `columns` has one row per ensemble member (field seed) and one column
    per increment series (a particle's increment over a block, or one
    particle's increments over consecutive periods).
    """
    columns = np.asarray(columns, dtype=float)
    if columns.ndim != 2:
        raise ValueError("need a 2-d (members x series) array")
    if columns.shape[0] < 100:
        raise ValueError(f"need at least 100 ensemble members, got {columns.shape[0]}")
    return np.corrcoef(columns, rowvar=False)


def binomial_upper_confidence(successes: int, trials: int, level: float = 0.99) -> float:
    """One-sided Clopper-Pearson upper bound for a binomial proportion."""
    if trials < 1 or successes < 0 or successes > trials:
        raise ValueError("invalid binomial counts")
    if successes == trials:
        return 1.0
    return float(sp_stats.beta.ppf(level, successes + 1, trials - successes))


def tail_bound_check(
    paths,
    dt: float,
    params: TailBoundParams,
    name: str = "tail_bound",
    qv_rate_slack: float = 0.3,
) -> StatReport:
    """Check the sup-tail of martingale paths against 2*exp(-b^2/(2 k^2 T)).

    Estimates the frequency of sup_t |M_t - M_0| >= b over the ensemble and
    passes iff its one-sided 99% binomial upper confidence stays below the
    bound.  Precondition: each path's empirical quadratic-variation rate
    must not exceed k^2; the slack absorbs the chi-square noise of the
    discrete estimate (an exact-rate path lands above k^2 half the time).
    """
    paths = np.asarray(paths, dtype=float)
    if paths.ndim != 2 or paths.shape[1] < 2:
        raise ValueError("need a (n_paths, n_samples) ensemble")
    duration = (paths.shape[1] - 1) * dt
    if duration > params.T * (1.0 + 1e-9):
        raise ValueError(f"path duration {duration} exceeds declared T={params.T}")
    qv_rate = np.sum(np.diff(paths, axis=1) ** 2, axis=1) / duration
    limit = params.k**2 * (1.0 + qv_rate_slack)
    if np.any(qv_rate > limit):
        worst = float(qv_rate.max())
        raise ValueError(
            f"quadratic-variation rate {worst:.4g} exceeds k^2 (+{qv_rate_slack:.0%} slack)"
        )
    sup = np.max(np.abs(paths - paths[:, :1]), axis=1)
    exceed = int(np.count_nonzero(sup >= params.b))
    n = paths.shape[0]
    freq = exceed / n
    upper = binomial_upper_confidence(exceed, n, 0.99)
    bound = params.bound()
    return StatReport(
        name=name,
        estimate=freq,
        ci_low=0.0,
        ci_high=upper,
        statistic=float(exceed),
        tolerance=bound,
        passed=bool(upper <= bound),
    )
