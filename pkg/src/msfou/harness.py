"""Reproducible Monte Carlo experiments over the drift estimators.

Each replication simulates one mixed sub-fractional OU path from a
deterministically derived seed and applies the configured estimator.
Replication seeds come from the master seed through the same SeedSequence
spawn-key derivation the noise generators use, so streams are disjoint and
the whole experiment is a pure function of its config: results are
bit-identical across reruns and worker counts (aggregation always walks
replications in index order; parallel execution only reorders the work,
never the reduction).

Failed replications (degenerate denominators, non-converged solves) are
counted in ``n_failed`` and excluded from the statistics, never imputed.
"""

from __future__ import annotations

import concurrent.futures
import math
from dataclasses import dataclass, replace

import numpy as np

from .estimators import (
    Method,
    lse_skorohod,
    nonergodic_estimator,
    phi_statistic,
    practical_estimator,
)
from .mle import mle
from .noise import HurstParam
from .paths import SamplePath, euler_msfou

__all__ = [
    "ExperimentConfig",
    "SummaryStats",
    "summarize",
    "run_table_experiment",
    "run_clt_experiment",
    "run_rate_experiment",
]


@dataclass(frozen=True)
class ExperimentConfig:
    """Full description of one Monte Carlo experiment.

    N = round(T/d) sampling steps per path. ``mle_mesh`` sizes the
    estimation mesh used when estimator = MLE; ``noise_scale`` is a test
    hook (0 zeroes both noise streams, leaving the deterministic drift
    recursion).
    """

    theta_true: float
    H: float
    d: float
    T: float
    replications: int
    master_seed: int
    estimator: Method
    x0: float = 0.0
    mle_mesh: int = 128
    noise_scale: float = 1.0

    def __post_init__(self) -> None:
        if not isinstance(self.estimator, Method):
            raise TypeError(f"estimator must be a Method, got {self.estimator!r}")
        if not 0.0 < self.H < 1.0:
            raise ValueError(f"H must lie in (0, 1), got {self.H}")
        if int(self.replications) < 1:
            raise ValueError(f"replications must be >= 1, got {self.replications}")
        if not 0 <= int(self.master_seed) < 2**64:
            raise ValueError(f"master_seed must fit in 64 unsigned bits, got {self.master_seed}")
        if not self.d > 0.0 or not self.T > 0.0:
            raise ValueError(f"d and T must be positive, got d={self.d}, T={self.T}")
        if self.n_steps < 2:
            raise ValueError(f"N = round(T/d) must be >= 2, got {self.n_steps}")
        object.__setattr__(self, "replications", int(self.replications))
        object.__setattr__(self, "master_seed", int(self.master_seed))
        object.__setattr__(self, "mle_mesh", int(self.mle_mesh))

    @property
    def n_steps(self) -> int:
        return int(round(self.T / self.d))

    @property
    def hurst(self) -> HurstParam:
        return HurstParam(self.H)

    @classmethod
    def from_dict(cls, raw: dict) -> "ExperimentConfig":
        """Build from a plain mapping (JSON config); estimator by CLI name."""
        known = {
            "theta_true",
            "H",
            "d",
            "T",
            "replications",
            "master_seed",
            "estimator",
            "x0",
            "mle_mesh",
            "noise_scale",
        }
        unknown = set(raw) - known
        if unknown:
            raise ValueError(f"unknown config fields: {sorted(unknown)}")
        data = dict(raw)
        data["estimator"] = Method(data["estimator"])
        return cls(**data)


@dataclass(frozen=True)
class SummaryStats:
    """Moment summary of the successful replications of one experiment."""

    mean: float
    median: float
    sdev: float
    skewness: float
    kurtosis: float
    n_failed: int

    def __post_init__(self) -> None:
        if self.sdev < 0.0:
            raise ValueError(f"sdev must be nonnegative, got {self.sdev}")
        if int(self.n_failed) < 0:
            raise ValueError(f"n_failed must be nonnegative, got {self.n_failed}")
        object.__setattr__(self, "n_failed", int(self.n_failed))


def summarize(sample, n_failed: int = 0) -> SummaryStats:
    """Moment statistics of a sample; median by exact lower-middle selection.

    Skewness is m3/m2^(3/2) and kurtosis m4/m2^2 (plain, not excess) with
    central moments m_k; a constant sample reports both as 0. The standard
    deviation uses the n-1 normalization (0 for a single point).
    """
    arr = np.sort(np.asarray(sample, dtype=float))
    n = arr.size
    if n < 1:
        raise ValueError("cannot summarize an empty sample")
    if not np.all(np.isfinite(arr)):
        raise ValueError("sample contains non-finite entries")
    mean = float(np.mean(arr))
    median = float(arr[(n - 1) // 2])
    sdev = float(np.std(arr, ddof=1)) if n > 1 else 0.0
    centered = arr - mean
    m2 = float(np.mean(centered**2))
    if m2 > 0.0:
        skewness = float(np.mean(centered**3)) / m2**1.5
        kurtosis = float(np.mean(centered**4)) / (m2 * m2)
    else:
        skewness = 0.0
        kurtosis = 0.0
    return SummaryStats(
        mean=mean,
        median=median,
        sdev=sdev,
        skewness=skewness,
        kurtosis=kurtosis,
        n_failed=n_failed,
    )


def _replication_seed(master_seed: int, rep: int) -> int:
    """Disjoint per-replication seed via the spawn-key stream derivation."""
    ss = np.random.SeedSequence(entropy=master_seed, spawn_key=(rep,))
    return int(ss.generate_state(1, np.uint64)[0])


def _simulate_one(cfg: ExperimentConfig, rep: int) -> SamplePath:
    return euler_msfou(
        theta=cfg.theta_true,
        H=cfg.hurst,
        d=cfg.d,
        N=cfg.n_steps,
        seed=_replication_seed(cfg.master_seed, rep),
        x0=cfg.x0,
        noise_scale=cfg.noise_scale,
    )


def _estimate_one(cfg: ExperimentConfig, rep: int) -> float:
    """One replication: simulate, estimate, return theta_hat (may raise)."""
    path = _simulate_one(cfg, rep)
    method = cfg.estimator
    if method is Method.PRACTICAL:
        return practical_estimator(path, cfg.hurst).theta_hat
    if method is Method.LSE_SKOROHOD:
        return lse_skorohod(path, cfg.hurst, cfg.theta_true).theta_hat
    if method is Method.NONERGODIC:
        return nonergodic_estimator(path).theta_hat
    if method is Method.MLE:
        return mle(path, cfg.hurst, cfg.mle_mesh).theta_hat
    raise ValueError(f"unknown estimator {method!r}")


def _guarded_estimate(args: tuple) -> tuple[int, float | None]:
    cfg, rep = args
    try:
        return rep, _estimate_one(cfg, rep)
    except (ValueError, RuntimeError, FloatingPointError, np.linalg.LinAlgError):
        return rep, None


def _run_replications(cfg: ExperimentConfig, workers: int) -> tuple[np.ndarray, int]:
    """Estimates in replication order plus the failure count."""
    jobs = [(cfg, rep) for rep in range(cfg.replications)]
    if workers <= 1:
        results = [_guarded_estimate(job) for job in jobs]
    else:
        with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_guarded_estimate, jobs, chunksize=8))
    results.sort(key=lambda pair: pair[0])
    estimates = [value for _, value in results if value is not None]
    n_failed = cfg.replications - len(estimates)
    return np.array(estimates, dtype=float), n_failed


def run_table_experiment(cfg: ExperimentConfig, workers: int = 1) -> SummaryStats:
    """Monte Carlo summary of the configured estimator (table row)."""
    estimates, n_failed = _run_replications(cfg, workers)
    if estimates.size == 0:
        raise RuntimeError(f"all {cfg.replications} replications failed")
    return summarize(estimates, n_failed)


def run_clt_experiment(
    cfg: ExperimentConfig, workers: int = 1, estimate_fn=None
) -> tuple[np.ndarray, SummaryStats]:
    """Standardized-error sample for the moment estimator plus its summary.

    Per replication, Phi = phi_statistic(theta_tilde, theta_true, ...) with
    theta_tilde from the practical estimator; requires 1/2 < H < 3/4 and
    estimator = PRACTICAL. ``estimate_fn(cfg, rep) -> theta_tilde`` can
    replace the estimation step (test hook).
    """
    if cfg.estimator is not Method.PRACTICAL:
        raise ValueError("run_clt_experiment requires estimator = PRACTICAL")
    if not 0.5 < cfg.H < 0.75:
        raise ValueError(f"run_clt_experiment requires 1/2 < H < 3/4, got H={cfg.H}")
    if estimate_fn is None:
        estimates, n_failed = _run_replications(cfg, workers)
    else:
        collected = []
        n_failed = 0
        for rep in range(cfg.replications):
            try:
                collected.append(float(estimate_fn(cfg, rep)))
            except (ValueError, RuntimeError, FloatingPointError):
                n_failed += 1
        estimates = np.array(collected, dtype=float)
    if estimates.size == 0:
        raise RuntimeError(f"all {cfg.replications} replications failed")
    hurst = cfg.hurst
    phi = np.array(
        [
            phi_statistic(th, cfg.theta_true, hurst, cfg.n_steps, cfg.d)
            for th in estimates
        ]
    )
    return phi, summarize(phi, n_failed)


def _rate_scale(big_t: float, hh: float) -> float:
    """Regime-appropriate error scaling: sqrt(T), sqrt(T/log T), T^(2-2H)."""
    if hh < 0.75:
        return math.sqrt(big_t)
    if hh == 0.75:
        return math.sqrt(big_t / math.log(big_t))
    return big_t ** (2.0 - 2.0 * hh)


def run_rate_experiment(
    cfg: ExperimentConfig, t_grid, workers: int = 1
) -> list[tuple[float, float, int]]:
    """Scaled-error sdev of the corrected LSE across a grid of horizons.

    For each T, runs the experiment with that horizon (fresh seed stream
    per grid entry) and reports (T, sdev of scale(T) * (theta_bar - theta),
    n_failed). The scaling matches the asymptotic regime of H, so the
    column is approximately flat in T when the rate is right.
    """
    if cfg.estimator is not Method.LSE_SKOROHOD:
        raise ValueError("run_rate_experiment requires estimator = LSE_SKOROHOD")
    rows = []
    for t_idx, big_t in enumerate(t_grid):
        big_t = float(big_t)
        seed_t = int(
            np.random.SeedSequence(
                entropy=cfg.master_seed, spawn_key=(t_idx, 1)
            ).generate_state(1, np.uint64)[0]
        )
        cfg_t = replace(cfg, T=big_t, master_seed=seed_t)
        estimates, n_failed = _run_replications(cfg_t, workers)
        if estimates.size < 2:
            raise RuntimeError(f"too few successful replications at T={big_t}")
        scaled = _rate_scale(big_t, cfg.H) * (estimates - cfg.theta_true)
        rows.append((big_t, float(np.std(scaled, ddof=1)), n_failed))
    return rows
