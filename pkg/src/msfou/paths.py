"""Sub-fractional and mixed paths, and the Euler scheme for the OU process.

Construction pipeline: a length-2N fGn vector becomes a two-sided fBm on
{-Nd, ..., -d} u {d, ..., Nd}; folding the two sides gives a sub-fractional
Brownian motion (sfBm); adding an independent Brownian motion gives the
mixed process xi; the Ornstein-Uhlenbeck recursion driven by xi increments
gives the observed path X.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.signal import lfilter

from .noise import GenMethod, HurstParam, NoiseSpec, sample_fgn

__all__ = [
    "SamplePath",
    "TwoSidedFbm",
    "two_sided_fbm",
    "sfbm_path",
    "sfbm_covariance",
    "msfbm_path",
    "euler_msfou",
    "write_path_csv",
    "read_path_csv",
]


@dataclass(frozen=True, eq=False)
class SamplePath:
    """Uniformly sampled realization of a process on t_i = i*d, i = 1..N.

    ``values[i-1]`` is the value at t_i; the value at t_0 = 0 is carried
    separately in ``initial_value``. Paths are immutable after construction.
    """

    d: float
    values: np.ndarray
    initial_value: float = 0.0

    def __post_init__(self) -> None:
        vals = np.asarray(self.values, dtype=float)
        if vals.ndim != 1 or vals.size < 1:
            raise ValueError("values must be a 1-d vector with at least one point")
        if not self.d > 0.0 or not np.isfinite(self.d):
            raise ValueError(f"grid spacing d must be positive, got {self.d!r}")
        if not np.all(np.isfinite(vals)) or not np.isfinite(self.initial_value):
            raise ValueError("path values must be finite")
        vals = vals.copy()
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "d", float(self.d))
        object.__setattr__(self, "initial_value", float(self.initial_value))

    @property
    def n(self) -> int:
        return self.values.size

    @property
    def span(self) -> float:
        """Total time span T = N*d."""
        return self.n * self.d

    @property
    def times(self) -> np.ndarray:
        """Observation times t_1..t_N (excluding t_0 = 0)."""
        return self.d * np.arange(1, self.n + 1)

    def full_values(self) -> np.ndarray:
        """Values at t_0..t_N including the initial value."""
        return np.concatenate([[self.initial_value], self.values])

    def full_times(self) -> np.ndarray:
        return self.d * np.arange(self.n + 1)


@dataclass(frozen=True, eq=False)
class TwoSidedFbm:
    """fBm sampled on both half-lines: pos[i-1] = B(i*d), neg[i-1] = B(-i*d)."""

    pos: np.ndarray
    neg: np.ndarray
    d: float

    def __post_init__(self) -> None:
        pos = np.asarray(self.pos, dtype=float)
        neg = np.asarray(self.neg, dtype=float)
        if pos.shape != neg.shape or pos.ndim != 1 or pos.size < 1:
            raise ValueError("pos and neg must be 1-d vectors of equal length")
        if not self.d > 0.0:
            raise ValueError("grid spacing d must be positive")
        pos, neg = pos.copy(), neg.copy()
        pos.setflags(write=False)
        neg.setflags(write=False)
        object.__setattr__(self, "pos", pos)
        object.__setattr__(self, "neg", neg)
        object.__setattr__(self, "d", float(self.d))


def two_sided_fbm(fgn2n, d: float, H: HurstParam) -> TwoSidedFbm:
    """Assemble a two-sided fBm from one fGn vector of even length 2N.

    The second half of the increments builds the positive side, the first
    half (reversed, negated) the negative side:

        pos[i] = d^H * (Y[N+1] + ... + Y[N+i])
        neg[i] = -d^H * (Y[N] + Y[N-1] + ... + Y[N-i+1])

    The d^H factor is the self-similarity scaling that turns unit-lag noise
    into increments over lag d.
    """
    y = np.asarray(fgn2n, dtype=float)
    if y.ndim != 1 or y.size < 2 or y.size % 2 != 0:
        raise ValueError("fgn2n must be a 1-d vector of even length >= 2")
    n = y.size // 2
    scale = float(d) ** H.h
    pos = scale * np.cumsum(y[n:])
    neg = -scale * np.cumsum(y[n - 1 :: -1])
    return TwoSidedFbm(pos=pos, neg=neg, d=float(d))


def sfbm_path(tw: TwoSidedFbm) -> SamplePath:
    """Fold a two-sided fBm into a sub-fractional Brownian motion.

    S(t_i) = (B(t_i) + B(-t_i)) / sqrt(2); S(0) = 0.
    """
    values = (tw.pos + tw.neg) / math.sqrt(2.0)
    return SamplePath(d=tw.d, values=values, initial_value=0.0)


def sfbm_covariance(s, t, H: HurstParam):
    """Covariance of sfBm: E[S_s S_t] for s, t >= 0.

    R(s, t) = t^(2H) + s^(2H) - (|t-s|^(2H) + (t+s)^(2H)) / 2.
    Symmetric in (s, t); zero whenever either argument is zero.
    """
    s_arr = np.asarray(s, dtype=float)
    t_arr = np.asarray(t, dtype=float)
    if np.any(s_arr < 0.0) or np.any(t_arr < 0.0):
        raise ValueError("sfbm_covariance requires nonnegative times")
    two_h = 2.0 * H.h
    r = (
        t_arr**two_h
        + s_arr**two_h
        - 0.5 * (np.abs(t_arr - s_arr) ** two_h + (t_arr + s_arr) ** two_h)
    )
    if np.ndim(s) == 0 and np.ndim(t) == 0:
        return float(r)
    return r


def msfbm_path(W: SamplePath, S: SamplePath) -> SamplePath:
    """Mixed path xi = W + S. Requires matching grids; W and S must come
    from independent noise streams (enforced by the callers' seeding)."""
    if W.n != S.n or W.d != S.d:
        raise ValueError(
            f"grid mismatch: (N={W.n}, d={W.d}) vs (N={S.n}, d={S.d})"
        )
    return SamplePath(
        d=W.d,
        values=W.values + S.values,
        initial_value=W.initial_value + S.initial_value,
    )


# Disjoint substream indices of one master seed, so the sfBm and Brownian
# components of a mixed path are independent by construction.
_STREAM_SFBM = 0
_STREAM_BM = 1


def euler_msfou(
    theta: float,
    H: HurstParam,
    d: float,
    N: int,
    seed: int,
    x0: float = 0.0,
    *,
    method: GenMethod = GenMethod.CIRCULANT_EXACT,
    noise_scale: float = 1.0,
) -> SamplePath:
    """Simulate the mixed sub-fractional OU process by the Euler scheme.

    X_{(i+1)d} = X_{id} - theta*d*X_{id} + (S_{(i+1)d} - S_{id})
                 + (W_{(i+1)d} - W_{id}),   X_0 = x0.

    Parameters
    ----------
    theta : drift parameter (ergodic for theta > 0, non-ergodic for < 0).
    H, d, N : Hurst index, grid spacing, number of steps (path has N points
        after t=0).
    seed : master seed; the sfBm and Brownian components draw from disjoint
        substreams of it.
    x0 : initial value (0 in the usual setup; nonzero supports noise-free
        decay tests).
    method : fGn generation method for the sfBm component.
    noise_scale : multiplies both noise increments; 0 leaves the
        deterministic recursion X_{i+1} = (1 - theta*d) * X_i (test hook).
    """
    if not d > 0.0:
        raise ValueError(f"grid spacing d must be positive, got {d!r}")
    if int(N) < 1:
        raise ValueError(f"need at least one step, got N={N!r}")
    N = int(N)

    fgn = sample_fgn(NoiseSpec(n=2 * N, seed=seed, method=method, stream=_STREAM_SFBM), H)
    s_path = sfbm_path(two_sided_fbm(fgn, d, H))
    ds = np.diff(s_path.full_values())

    rng = NoiseSpec(n=N, seed=seed, method=method, stream=_STREAM_BM).rng()
    dw = math.sqrt(d) * rng.standard_normal(N)

    drive = noise_scale * (ds + dw)
    a = 1.0 - theta * d
    # Linear recursion X_{i+1} = a X_i + drive_i as an IIR filter.
    drive = drive.copy()
    drive[0] += a * x0
    values = lfilter([1.0], [1.0, -a], drive)
    return SamplePath(d=d, values=values, initial_value=x0)


def write_path_csv(path: SamplePath, file) -> None:
    """Write a path as CSV with header ``t,value``, rows t_0..t_N.

    Numbers carry 15 significant digits so a read-back reproduces the path
    to full double precision for all practical purposes.
    """
    own = isinstance(file, (str, bytes))
    fh = open(file, "w", encoding="utf-8", newline="") if own else file
    try:
        fh.write("t,value\n")
        fh.write(f"{0.0:.15g},{path.initial_value:.15g}\n")
        for t, v in zip(path.times, path.values):
            fh.write(f"{t:.15g},{v:.15g}\n")
    finally:
        if own:
            fh.close()


def read_path_csv(file) -> SamplePath:
    """Read a path written by :func:`write_path_csv`.

    The time column must start at 0 and be uniformly spaced (to float
    tolerance); the spacing becomes ``d``.
    """
    own = isinstance(file, (str, bytes))
    fh = open(file, "r", encoding="utf-8") if own else file
    try:
        header = fh.readline().strip()
        if header != "t,value":
            raise ValueError(f"expected header 't,value', got {header!r}")
        rows = [line.strip() for line in fh if line.strip()]
    finally:
        if own:
            fh.close()
    if len(rows) < 2:
        raise ValueError("path CSV needs at least the t=0 row and one more")
    data = np.array([[float(c) for c in row.split(",")] for row in rows])
    t, values = data[:, 0], data[:, 1]
    if abs(t[0]) > 0.0:
        raise ValueError("first row must be at t=0")
    d = t[1] - t[0]
    if d <= 0.0:
        raise ValueError("time column must be increasing")
    if not np.allclose(np.diff(t), d, rtol=1e-9, atol=1e-12 * max(1.0, d)):
        raise ValueError("time column must be uniformly spaced")
    return SamplePath(d=d, values=values[1:], initial_value=values[0])
