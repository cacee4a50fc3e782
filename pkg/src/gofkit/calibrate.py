"""Null-distribution quantiles and p-values for the three tests."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy import special


@dataclass(frozen=True)
class NullCalibration:
    """A calibrated rejection threshold plus enough state for p-values.

    For Monte-Carlo methods the replicate statistics are kept so that
    p-values are tail fractions consistent with the stored quantile.
    """

    method: str  # chisq-mixture-mc | normal | empirical-mc | theory-loglog
    alpha: float
    quantile: float
    reps: Optional[int]
    seed: Optional[int]
    replicates: Optional[np.ndarray] = None
    truncation_bias: float = 0.0

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise ValueError("alpha must lie in (0, 1)")
        if self.method.endswith("-mc") and (self.reps is None or self.reps < 100):
            raise ValueError("Monte-Carlo calibration requires reps >= 100")

    def p_value(self, statistic: float) -> Optional[float]:
        """Upper-tail p-value; None when the method admits none."""
        if self.method == "normal":
            return float(special.ndtr(-statistic))
        if self.replicates is not None:
            # plain tail fraction: exactly consistent with the stored
            # ceil((1-alpha) reps) order-statistic threshold
            return float(np.sum(self.replicates >= statistic)) / self.replicates.size
        return None


def _order_stat_quantile(values: np.ndarray, alpha: float) -> float:
    """Order statistic at 1-based index ceil((1-alpha) * len(values))."""
    values = np.sort(np.asarray(values, dtype=float))
    idx = min(math.ceil((1.0 - alpha) * values.size), values.size)
    return float(values[idx - 1])


def normal_quantile(alpha: float) -> float:
    """z_{1-alpha} of the standard normal (Cephes ndtri rational approximation)."""
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie in (0, 1)")
    return float(special.ndtri(1.0 - alpha))


def normal_calibration(alpha: float) -> NullCalibration:
    return NullCalibration(method="normal", alpha=alpha,
                           quantile=normal_quantile(alpha), reps=None, seed=None)


def chisq_mix_quantile(eigenvalues, alpha: float, reps: int = 100_000,
                       seed: Optional[int] = None, *,
                       tail_mass: float = 0.0,
                       chunk: int = 8192) -> NullCalibration:
    """Empirical (1-alpha) quantile of W = sum_k lambda_k Z_k^2 over MC draws.

    The simulation is truncated at the given spectrum; ``tail_mass`` reports
    the bias bound sum_{k>K} lambda_k when the caller knows it.
    """
    lam = np.asarray(eigenvalues, dtype=float)
    if np.any(lam <= 0):
        raise ValueError("eigenvalues must be positive")
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie in (0, 1)")
    if reps < 100:
        raise ValueError("reps must be at least 100")
    rng = np.random.default_rng(seed)
    draws = np.empty(reps)
    done = 0
    while done < reps:
        m = min(chunk, reps - done)
        z = rng.standard_normal((m, lam.size))
        draws[done:done + m] = (z * z) @ lam
        done += m
    return NullCalibration(
        method="chisq-mixture-mc", alpha=alpha,
        quantile=_order_stat_quantile(draws, alpha),
        reps=reps, seed=seed, replicates=draws, truncation_bias=tail_mass)


def empirical_null_quantile(statistic: Callable, null_sampler: Callable,
                            n: int, alpha: float, reps: int = 200,
                            seed: Optional[int] = None) -> NullCalibration:
    """Sample (1-alpha) quantile of ``statistic`` over null replications.

    Replicate RNG streams are spawned from a SeedSequence keyed by
    (seed, replicate index), so aggregation is order-independent.
    """
    if reps < 100:
        raise ValueError("reps must be at least 100")
    children = np.random.SeedSequence(seed).spawn(reps)
    stats = np.empty(reps)
    for i, child in enumerate(children):
        rng = np.random.default_rng(child)
        stats[i] = statistic(null_sampler(n, rng))
    return NullCalibration(
        method="empirical-mc", alpha=alpha,
        quantile=_order_stat_quantile(stats, alpha),
        reps=reps, seed=seed, replicates=stats)
