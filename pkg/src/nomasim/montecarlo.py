"""Monte Carlo engine: outage capacity, outage probability, diversity order.

Every estimator is bit-reproducible for a fixed seed: trial values depend
only on (seed, trial index), blocks are aggregated into preallocated slots,
and the bootstrap runs on its own seeded generator. Worker count never
changes a result.
"""

from __future__ import annotations

import math
import struct
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

METRICS = ("min_user_rate", "per_user", "sum_rate")

_BLOCK_TRIALS = 32768
_BOOTSTRAP_RESAMPLES = 1000
_BOOTSTRAP_TAG = 0xB00757  # salts the bootstrap stream away from channel streams


class EstimationError(RuntimeError):
    """An estimate could not be formed from the configured trial budget."""


@dataclass(frozen=True)
class TrialPlan:
    """How many fading trials to run and which per-trial metric to track."""

    num_trials: int
    epsilon: float = 0.1
    metric: str = "min_user_rate"
    per_user_index: int = 0
    power_sweep: np.ndarray | None = None
    seed: int = 0
    workers: int = 1

    def __post_init__(self):
        if self.num_trials < 1:
            raise ValueError("num_trials must be >= 1")
        if not 0.0 < self.epsilon < 1.0:
            raise ValueError("epsilon must lie strictly between 0 and 1")
        if self.metric not in METRICS:
            raise ValueError(f"unknown metric: {self.metric!r}")
        if self.per_user_index < 0:
            raise ValueError("per_user_index must be >= 0")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
        if self.power_sweep is not None:
            sweep = np.asarray(self.power_sweep, dtype=np.float64)
            if sweep.ndim != 1 or sweep.size == 0 or np.any(sweep <= 0):
                raise ValueError("power sweep values must be positive")
            object.__setattr__(self, "power_sweep", sweep)


def _apply_metric(rates: np.ndarray, plan: TrialPlan) -> np.ndarray:
    if plan.metric == "min_user_rate":
        return rates.min(axis=1)
    if plan.metric == "sum_rate":
        return rates.sum(axis=1)
    if plan.per_user_index >= rates.shape[1]:
        raise ValueError(
            f"per_user_index {plan.per_user_index} out of range for {rates.shape[1]} users"
        )
    return rates[:, plan.per_user_index].copy()


def run_trials(scenario, plan: TrialPlan, p_t: float) -> np.ndarray:
    """Per-trial metric values for trials 0..num_trials-1, in trial order."""
    if not p_t > 0:
        raise ValueError("p_t must be > 0")
    n = plan.num_trials
    out = np.empty(n)
    spans = [(lo, min(lo + _BLOCK_TRIALS, n)) for lo in range(0, n, _BLOCK_TRIALS)]

    def fill(span):
        lo, hi = span
        trials = np.arange(lo, hi, dtype=np.uint64)
        out[lo:hi] = _apply_metric(scenario.rates_block(p_t, trials), plan)

    if plan.workers == 1 or len(spans) == 1:
        for span in spans:
            fill(span)
    else:
        with ThreadPoolExecutor(max_workers=plan.workers) as pool:
            list(pool.map(fill, spans))
    return out


def _quantile_index(n: int, q: float) -> int:
    # ceil(q*n) in real arithmetic; the epsilon absorbs float noise like 0.7*10
    k = int(math.ceil(q * n - 1e-9))
    return min(max(k, 1), n)


def empirical_quantile(series: np.ndarray, q: float) -> float:
    """Lower empirical quantile: order statistic at index ceil(q*n) - 1."""
    series = np.asarray(series, dtype=np.float64)
    if series.size == 0:
        raise ValueError("series must be non-empty")
    if not 0.0 < q < 1.0:
        raise ValueError("q must lie strictly between 0 and 1")
    idx = _quantile_index(series.size, q) - 1
    return float(np.partition(series, idx)[idx])


@dataclass(frozen=True)
class OutagePoint:
    """One sweep point of an outage-capacity curve."""

    power: float
    power_db: float
    c_eps: float
    ci_halfwidth: float
    outage_at_ceps: float


@dataclass(frozen=True)
class OutageCurve:
    """Outage capacity across a power sweep, with bootstrap confidence."""

    power_db: np.ndarray
    c_eps: np.ndarray
    ci_halfwidth: np.ndarray
    outage_at_ceps: np.ndarray

    def __len__(self) -> int:
        return len(self.power_db)

    @property
    def points(self) -> list[OutagePoint]:
        return [
            OutagePoint(10 ** (db / 10.0), db, c, w, o)
            for db, c, w, o in zip(
                self.power_db, self.c_eps, self.ci_halfwidth, self.outage_at_ceps
            )
        ]


def _bootstrap_halfwidth(sorted_metrics: np.ndarray, k: int, seed: int, p_t: float) -> float:
    """95% percentile-bootstrap half-width of the k-th order statistic.

    The k-th order statistic of a size-n resample equals the empirical
    inverse CDF at a Beta(k, n-k+1) variate, so one Beta draw per resample
    replaces materializing the resamples themselves.
    """
    n = sorted_metrics.size
    (p_bits,) = struct.unpack("<Q", struct.pack("<d", float(p_t)))
    rng = np.random.default_rng(np.random.SeedSequence([int(seed), _BOOTSTRAP_TAG, p_bits]))
    u = rng.beta(k, n - k + 1, size=_BOOTSTRAP_RESAMPLES)
    idx = np.clip(np.ceil(u * n - 1e-9).astype(np.int64) - 1, 0, n - 1)
    reps = sorted_metrics[idx]
    lo, hi = np.percentile(reps, [2.5, 97.5])
    return float(hi - lo) / 2.0


def outage_capacity(scenario, plan: TrialPlan, p_t: float) -> OutagePoint:
    """Epsilon-outage capacity estimate at one power budget.

    Returns the largest rate whose empirical outage stays at or below
    epsilon, plus a seeded 1000-resample bootstrap confidence half-width.
    """
    metrics = np.sort(run_trials(scenario, plan, p_t))
    n = metrics.size
    k = _quantile_index(n, plan.epsilon)
    c_eps = float(metrics[k - 1])
    outage = float(np.searchsorted(metrics, c_eps, side="left")) / n
    half = _bootstrap_halfwidth(metrics, k, plan.seed, p_t)
    return OutagePoint(p_t, 10.0 * math.log10(p_t), c_eps, half, outage)


def outage_curve(scenario, plan: TrialPlan) -> OutageCurve:
    """Outage capacity at every point of the plan's power sweep."""
    if plan.power_sweep is None:
        raise ValueError("plan.power_sweep is required for a curve")
    pts = [outage_capacity(scenario, plan, p) for p in plan.power_sweep]
    return OutageCurve(
        power_db=np.array([p.power_db for p in pts]),
        c_eps=np.array([p.c_eps for p in pts]),
        ci_halfwidth=np.array([p.ci_halfwidth for p in pts]),
        outage_at_ceps=np.array([p.outage_at_ceps for p in pts]),
    )


def outage_probability(scenario, plan: TrialPlan, p_t: float, target_rate: float) -> float:
    """Fraction of trials whose metric falls below the target rate."""
    if target_rate < 0:
        raise ValueError("target_rate must be >= 0")
    metrics = run_trials(scenario, plan, p_t)
    return float(np.count_nonzero(metrics < target_rate)) / metrics.size


@dataclass(frozen=True)
class DiversityOrderEstimate:
    """Least-squares slope of -log10(outage) against log10(power)."""

    slope: float
    power_db: np.ndarray
    outage: np.ndarray


def estimate_diversity_order(
    scenario,
    plan: TrialPlan,
    target_rate: float,
    powers=None,
) -> DiversityOrderEstimate:
    """High-SNR diversity order from an outage-probability sweep.

    Requires at least three sweep points and a nonzero outage count at each;
    a zero count is an estimation failure, not a silent data point.
    """
    sweep = np.asarray(powers if powers is not None else plan.power_sweep, dtype=np.float64)
    if sweep is None or sweep.ndim != 1 or sweep.size < 3:
        raise ValueError("diversity estimation needs a sweep of at least 3 power points")
    p_out = np.empty(sweep.size)
    for i, p_t in enumerate(sweep):
        p_out[i] = outage_probability(scenario, plan, p_t, target_rate)
        if p_out[i] == 0.0:
            raise EstimationError(
                f"zero outage count at p_t={10 * math.log10(p_t):.2f} dB with "
                f"{plan.num_trials} trials; increase trials or lower the sweep"
            )
    slope = float(np.polyfit(np.log10(sweep), -np.log10(p_out), 1)[0])
    return DiversityOrderEstimate(slope, 10.0 * np.log10(sweep), p_out)


def required_power_db(
    scenario,
    plan: TrialPlan,
    target_c_eps: float,
    lo_db: float,
    hi_db: float,
    tol_db: float = 0.05,
) -> float:
    """Smallest budget (dB) whose outage capacity reaches the target.

    Bisection is sound because, for a fixed seed, every per-trial rate is
    monotone in the budget, hence so is the epsilon-quantile.
    """

    def c_eps(db: float) -> float:
        metrics = run_trials(scenario, plan, 10 ** (db / 10.0))
        return empirical_quantile(metrics, plan.epsilon)

    if c_eps(lo_db) >= target_c_eps:
        return lo_db
    if c_eps(hi_db) < target_c_eps:
        raise EstimationError(
            f"target C_eps={target_c_eps} unreachable at {hi_db} dB; widen the bracket"
        )
    lo, hi = lo_db, hi_db
    while hi - lo > tol_db:
        mid = 0.5 * (lo + hi)
        if c_eps(mid) >= target_c_eps:
            hi = mid
        else:
            lo = mid
    return hi
