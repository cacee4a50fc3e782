"""Test statistics: MMD, moderated MMD, studentization and the adaptive maximum."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np

from .spectrum import (
    ModeratedSpectrum,
    SampleSummary,
    SpectralBasis,
    effective_variance,
    moderate,
)

GRAM_SIZE_LIMIT = 4096


@dataclass(frozen=True)
class Sample:
    """An ordered batch of observations; rows are points."""

    points: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim == 1:
            pts = pts[:, None]
        if pts.ndim != 2 or pts.shape[0] < 1:
            raise ValueError("sample must contain at least one point")
        object.__setattr__(self, "points", pts)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    @classmethod
    def from_csv(cls, path) -> "Sample":
        pts = np.loadtxt(path, delimiter=",", ndmin=2)
        return cls(pts)


@dataclass(frozen=True)
class RhoGrid:
    """Dyadic moderation grid rho_*, 2 rho_*, ..., 2^{m_*} rho_*."""

    rho_star: float
    m_star: int
    values: np.ndarray = field(default=None)

    def __post_init__(self):
        if self.rho_star <= 0:
            raise ValueError("rho_star must be positive")
        if self.m_star < 0:
            raise ValueError("m_star must be nonnegative")
        values = self.rho_star * np.exp2(np.arange(self.m_star + 1))
        object.__setattr__(self, "values", values)


@dataclass(frozen=True)
class TestReport:
    __test__ = False  # keep pytest from collecting this as a test class

    kind: str
    statistic: float
    threshold: float
    reject: bool
    p_value: Optional[float]
    alpha: float
    calibration_method: str
    calibration_reps: Optional[int]
    calibration_seed: Optional[int]
    parameters: dict

    def __post_init__(self):
        if self.reject != (self.statistic > self.threshold):
            raise ValueError("decision inconsistent with threshold")
        if self.p_value is not None and (self.p_value <= self.alpha) != self.reject:
            raise ValueError("p-value inconsistent with decision")

    def to_dict(self) -> dict:
        out = {
            "kind": self.kind,
            "statistic": self.statistic,
            "threshold": self.threshold,
            "reject": self.reject,
            "p_value": self.p_value,
            "alpha": self.alpha,
            "calibration": {
                "method": self.calibration_method,
                "reps": self.calibration_reps,
                "seed": self.calibration_seed,
            },
            "parameters": {
                k: (v.tolist() if isinstance(v, np.ndarray) else v)
                for k, v in self.parameters.items()
            },
        }
        return out

    def to_text(self) -> str:
        lines = [
            "kind: %s" % self.kind,
            "statistic: %.10g" % self.statistic,
            "threshold: %.10g" % self.threshold,
            "p_value: %s" % ("n/a" if self.p_value is None else "%.6g" % self.p_value),
            "reject: %s" % self.reject,
            "alpha: %g" % self.alpha,
            "calibration: %s (reps=%s, seed=%s)"
            % (self.calibration_method, self.calibration_reps, self.calibration_seed),
        ]
        for k, v in sorted(self.parameters.items()):
            lines.append("%s: %s" % (k, v))
        return "\n".join(lines)


class AdaptiveStat(NamedTuple):
    value: float
    argmax_rho: float


# ---------------------------------------------------------------------------
# statistics


def _summary(basis: SpectralBasis, sample: Sample) -> SampleSummary:
    return basis.summary(sample.points)


def mmd_vstat(basis: SpectralBasis, sample: Sample) -> float:
    """Empirical squared MMD, sum_k lambda_k (mean_i phi_k(X_i))^2."""
    if not basis.degenerate:
        raise ValueError("MMD requires a degenerate (centered) basis")
    s = _summary(basis, sample)
    return float(np.sum(s.group_eigenvalues * s.mean_sq))


def eta_sq(ms: ModeratedSpectrum, sample: Sample) -> float:
    """Empirical squared moderated MMD."""
    s = _summary(ms.basis, sample)
    return _eta_from_summary(s, ms.rho)


def _eta_from_summary(s: SampleSummary, rho: float) -> float:
    return float(np.sum(moderate(s.group_eigenvalues, rho) * s.mean_sq))


def _diag_from_summary(s: SampleSummary, rho: float) -> float:
    return float(np.sum(moderate(s.group_eigenvalues, rho) * s.diag_mean))


def eta_sq_gram(ms: ModeratedSpectrum, sample: Sample,
                limit: int = GRAM_SIZE_LIMIT) -> float:
    """Gram-form n^-2 sum_{i,j} K~_rho(X_i, X_j); equals :func:`eta_sq`."""
    if sample.n > limit:
        raise ValueError("sample exceeds the Gram-size limit (%d)" % limit)
    weights = ms.moderated_eigenvalues
    gram = ms.basis.kernel_matrix(sample.points, weights=weights)
    return float(gram.sum()) / (sample.n ** 2)


def diag_term(ms: ModeratedSpectrum, sample: Sample) -> float:
    """n^-1 sum_i K~_rho(X_i, X_i)."""
    weights = ms.moderated_eigenvalues
    return float(ms.basis.kernel_diag(sample.points, weights=weights).mean())


def studentized_stat(ms: ModeratedSpectrum, sample: Sample) -> float:
    """(2 v)^{-1/2} (n eta^2 - diag term); asymptotically N(0,1) under the null."""
    v = effective_variance(ms)
    if v <= 0:
        raise ValueError("effective variance must be positive")
    s = _summary(ms.basis, sample)
    return _studentized_from_summary(ms.basis, s, sample.n, ms.rho)


def _studentized_from_summary(basis, s: SampleSummary, n: int, rho: float) -> float:
    ms = ModeratedSpectrum(basis, rho)
    v = effective_variance(ms)
    num = n * _eta_from_summary(s, rho) - _diag_from_summary(s, rho)
    return num / math.sqrt(2.0 * v)


def rho_schedule(n: int, s: float, theta: float = 0.0, c: float = 1.0) -> float:
    """Rate-optimal moderation c n^{-2 s (theta+1) / (4 s + theta + 1)}."""
    if n < 2:
        raise ValueError("n must be at least 2")
    if s <= 0.5:
        raise ValueError("decay exponent s must exceed 1/2")
    if theta < 0:
        raise ValueError("theta must be nonnegative")
    if c <= 0:
        raise ValueError("c must be positive")
    return c * n ** (-2.0 * s * (theta + 1.0) / (4.0 * s + theta + 1.0))


def adaptive_grid(n: int, s: float) -> RhoGrid:
    """Dyadic grid from rho_* = (sqrt(log log n)/n)^{2s} up past the target scale."""
    if n < 16:
        raise ValueError("adaptive grid requires n >= 16")
    if s <= 0.5:
        raise ValueError("decay exponent s must exceed 1/2")
    root = math.sqrt(math.log(math.log(n))) / n
    rho_star = root ** (2.0 * s)
    top = root ** (2.0 * s / (4.0 * s + 1.0))
    m_star = math.ceil(math.log2(top / rho_star))
    return RhoGrid(rho_star=rho_star, m_star=m_star)


def theory_threshold(n: int) -> float:
    """sqrt(3 log log n), the theoretical adaptive rejection threshold."""
    if n < 16:
        raise ValueError("requires n >= 16")
    return math.sqrt(3.0 * math.log(math.log(n)))


def adaptive_stat(basis: SpectralBasis, grid: RhoGrid, sample: Sample) -> AdaptiveStat:
    """Maximum of the studentized statistic over the moderation grid."""
    if grid.values.size == 0:
        raise ValueError("grid must be nonempty")
    s = _summary(basis, sample)
    best = -math.inf
    best_rho = grid.values[0]
    for rho in grid.values:
        t = _studentized_from_summary(basis, s, sample.n, float(rho))
        if t > best:
            best = t
            best_rho = float(rho)
    return AdaptiveStat(value=best, argmax_rho=best_rho)


# ---------------------------------------------------------------------------
# test runner


def run_test(kind: str, basis: SpectralBasis, sample: Sample, alpha: float, *,
             rho: Optional[float] = None,
             theta: Optional[float] = None,
             grid: Optional[RhoGrid] = None,
             calibration=None,
             calibrate_reps: Optional[int] = None,
             seed: Optional[int] = None,
             threshold: str = "mc") -> TestReport:
    """Run one goodness-of-fit test and assemble its report.

    ``calibration`` may be a precomputed NullCalibration; otherwise it is
    built here (mmd: chi-square-mixture MC; m3d: normal; adaptive: empirical
    MC over null replications, or the theoretical threshold for
    ``threshold='theory'``).
    """
    from . import calibrate as _cal
    from . import dists as _dists

    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie in (0, 1)")
    n = sample.n
    params: dict = {"K": basis.truncation, "alpha": alpha}

    if kind == "mmd":
        stat = n * mmd_vstat(basis, sample)
        if calibration is None:
            if seed is None:
                raise ValueError("Monte-Carlo calibration requires a seed")
            calibration = _cal.chisq_mix_quantile(
                basis.eigenvalues, alpha, reps=calibrate_reps or 100_000, seed=seed)
        thr = calibration.quantile
        pval = calibration.p_value(stat)
    elif kind == "m3d":
        if rho is None:
            if theta is None:
                raise ValueError("m3d requires rho (or theta for the schedule)")
            rho = rho_schedule(n, basis.decay_exponent, theta)
        params["rho"] = rho
        stat = studentized_stat(ModeratedSpectrum(basis, rho), sample)
        if calibration is None:
            calibration = _cal.normal_calibration(alpha)
        thr = calibration.quantile
        pval = calibration.p_value(stat)
    elif kind == "adaptive":
        if grid is None:
            grid = adaptive_grid(n, basis.decay_exponent)
        params["rho_star"] = grid.rho_star
        params["m_star"] = grid.m_star
        res = adaptive_stat(basis, grid, sample)
        stat = res.value
        params["argmax_rho"] = res.argmax_rho
        params["theory_threshold"] = theory_threshold(n)
        if threshold == "theory":
            calibration = _cal.NullCalibration(
                method="theory-loglog", alpha=alpha,
                quantile=theory_threshold(n), reps=None, seed=None)
        elif calibration is None:
            if seed is None:
                raise ValueError("Monte-Carlo calibration requires a seed")
            sampler = _dists.null_sampler(basis.null_id)
            calibration = _cal.empirical_null_quantile(
                lambda smp: adaptive_stat(basis, grid, smp).value,
                lambda size, rng: Sample(sampler(size, rng)),
                n, alpha, reps=calibrate_reps or 200, seed=seed)
        thr = calibration.quantile
        pval = calibration.p_value(stat)
    else:
        raise ValueError("unknown test kind: %r" % kind)

    return TestReport(
        kind=kind,
        statistic=float(stat),
        threshold=float(thr),
        reject=bool(stat > thr),
        p_value=pval,
        alpha=alpha,
        calibration_method=calibration.method,
        calibration_reps=calibration.reps,
        calibration_seed=calibration.seed,
        parameters=params,
    )
