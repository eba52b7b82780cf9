"""Stationary fractional Gaussian noise (fGn) and cumulative fBm sequences.

The sampler is dimensionless: it produces unit-variance noise per unit lag.
Time scaling (``d**H``) is applied by the path-building layer, not here.

Two generation methods are provided:

* ``CIRCULANT_EXACT`` — circulant embedding of the fGn covariance. The
  embedding of size ``2n`` has nonnegative eigenvalues for fGn, so the
  synthesized vector has exactly the requested covariance.
* ``SPECTRAL_APPROX`` — Paxson's FFT synthesis from the fGn spectral
  density. Fast and approximately correct; kept because some published
  simulation studies use it, with the exact method as the reference.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
from scipy.special import gamma as _gamma


__all__ = [
    "HurstRegime",
    "HurstParam",
    "GenMethod",
    "NoiseSpec",
    "fgn_autocovariance",
    "sample_fgn",
    "fbm_from_fgn",
]


class HurstRegime(enum.Enum):
    """Qualitative regime of the Hurst index, as used by the asymptotics."""

    SHORT_MEMORY = "short_memory"   # 0 < h < 1/2
    BROWNIAN = "brownian"           # h = 1/2
    ERGODIC_CLT = "ergodic_clt"     # 1/2 < h < 3/4, Gaussian limit at rate sqrt(T)
    BOUNDARY = "boundary"           # h = 3/4, rate sqrt(T/log T)
    ROSENBLATT = "rosenblatt"       # 3/4 < h < 1, rate T^(2-2H), non-Gaussian limit


@dataclass(frozen=True)
class HurstParam:
    """Validated Hurst index in the open interval (0, 1)."""

    h: float

    def __post_init__(self) -> None:
        h = float(self.h)
        if not np.isfinite(h) or not 0.0 < h < 1.0:
            raise ValueError(f"Hurst index must lie in (0, 1), got {self.h!r}")
        object.__setattr__(self, "h", h)

    @property
    def regime(self) -> HurstRegime:
        if self.h < 0.5:
            return HurstRegime.SHORT_MEMORY
        if self.h == 0.5:
            return HurstRegime.BROWNIAN
        if self.h < 0.75:
            return HurstRegime.ERGODIC_CLT
        if self.h == 0.75:
            return HurstRegime.BOUNDARY
        return HurstRegime.ROSENBLATT


class GenMethod(enum.Enum):
    CIRCULANT_EXACT = "circulant_exact"
    SPECTRAL_APPROX = "spectral_approx"


@dataclass(frozen=True)
class NoiseSpec:
    """Deterministic description of one noise vector.

    Identical specs (plus the Hurst index) yield bit-identical output.
    ``stream`` selects a statistically independent substream of ``seed``;
    callers that need several independent vectors per seed (e.g. the sfBm
    and Brownian components of a mixed path) use distinct stream indices.
    """

    n: int
    seed: int
    method: GenMethod = GenMethod.CIRCULANT_EXACT
    stream: int = 0

    def __post_init__(self) -> None:
        if int(self.n) < 1:
            raise ValueError(f"n must be a positive integer, got {self.n!r}")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must fit in an unsigned 64-bit integer")
        if int(self.stream) < 0:
            raise ValueError("stream index must be nonnegative")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "seed", int(self.seed))
        object.__setattr__(self, "stream", int(self.stream))

    def rng(self) -> np.random.Generator:
        """Counter-based generator for this (seed, stream) pair."""
        ss = np.random.SeedSequence(entropy=self.seed, spawn_key=(self.stream,))
        return np.random.Generator(np.random.Philox(ss))


def fgn_autocovariance(k, H: HurstParam):
    """Autocovariance rho(k) of unit-variance fGn at integer lag k.

    rho(k) = ((|k|+1)^(2H) - 2|k|^(2H) + ||k|-1|^(2H)) / 2; rho(0) = 1.
    Accepts a scalar or an array of lags.
    """
    two_h = 2.0 * H.h
    k_abs = np.abs(np.asarray(k, dtype=float))
    rho = 0.5 * ((k_abs + 1.0) ** two_h - 2.0 * k_abs**two_h + np.abs(k_abs - 1.0) ** two_h)
    if np.isscalar(k) or np.ndim(k) == 0:
        return float(rho)
    return rho


def _circulant_fgn(n: int, H: HurstParam, rng: np.random.Generator) -> np.ndarray:
    # First row of the 2n circulant: [rho(0..n), rho(n-1), ..., rho(1)].
    rho = fgn_autocovariance(np.arange(n + 1), H)
    row = np.concatenate([rho, rho[-2:0:-1]])
    m = row.size  # 2n
    eig = np.fft.fft(row).real

    # Eigenvalues are provably >= 0 for fGn; anything beyond roundoff means
    # the covariance (or this embedding) is wrong, so fail loudly.
    tol = 1e-10 * eig.max()
    if eig.min() < -tol:
        raise RuntimeError(
            f"circulant embedding produced negative eigenvalue {eig.min():.3e}"
        )
    eig = np.maximum(eig, 0.0)

    z = rng.standard_normal(m) + 1j * rng.standard_normal(m)
    # Re(ifft(sqrt(eig) z)) * sqrt(m) has exactly the circulant covariance:
    # E[z_k^2] = 0, so the real part carries half of E|.|^2 = 2 eig / m.
    x = np.sqrt(m) * np.fft.ifft(np.sqrt(eig) * z).real
    return x[:n]


def _fgn_spectral_density(lam: np.ndarray, h: float) -> np.ndarray:
    # Spectral density of fGn with Paxson's B3 truncation of the aliasing sum.
    d = -2.0 * h - 1.0
    dpr = -2.0 * h
    pi2 = 2.0 * np.pi

    def a(j: int) -> np.ndarray:
        return pi2 * j + lam

    def b(j: int) -> np.ndarray:
        return pi2 * j - lam

    b3 = (
        a(1) ** d + b(1) ** d + a(2) ** d + b(2) ** d + a(3) ** d + b(3) ** d
        + (a(3) ** dpr + b(3) ** dpr + a(4) ** dpr + b(4) ** dpr) / (8.0 * h * np.pi)
    )
    return (
        2.0 * np.sin(np.pi * h) * _gamma(2.0 * h + 1.0) * (1.0 - np.cos(lam))
        * (lam**d + b3)
    )


def _paxson_fgn(n: int, H: HurstParam, rng: np.random.Generator) -> np.ndarray:
    # Synthesize on an even grid; odd n takes the first n of n+1 points.
    m = n if n % 2 == 0 else n + 1
    half = m // 2
    lam = 2.0 * np.pi * np.arange(1, half + 1) / m
    f = _fgn_spectral_density(lam, H.h)

    # Periodogram ordinates are asymptotically f * Exp(1); give each an
    # independent uniform phase and invert the half-spectrum.
    power = f * rng.exponential(1.0, size=half)
    phase = rng.uniform(0.0, 2.0 * np.pi, size=half)
    z = np.sqrt(power) * np.exp(1j * phase)
    z[-1] = np.sqrt(power[-1])  # Nyquist coefficient must be real

    spectrum = np.concatenate([[0.0 + 0.0j], z])
    x = np.sqrt(m) * np.fft.irfft(spectrum, n=m)
    return x[:n]


def sample_fgn(spec: NoiseSpec, H: HurstParam) -> np.ndarray:
    """Sample a zero-mean stationary Gaussian vector with fGn covariance.

    Parameters
    ----------
    spec : NoiseSpec
        Length, seed/stream and generation method. ``n >= 2`` required.
    H : HurstParam
        Hurst index of the target covariance ``fgn_autocovariance(., H)``.

    Returns
    -------
    numpy.ndarray of shape ``(spec.n,)``. Same spec in, same bytes out.
    """
    if spec.n < 2:
        raise ValueError(f"need n >= 2 to define fGn, got n={spec.n}")
    rng = spec.rng()
    if spec.method is GenMethod.CIRCULANT_EXACT:
        return _circulant_fgn(spec.n, H, rng)
    return _paxson_fgn(spec.n, H, rng)


def fbm_from_fgn(increments) -> np.ndarray:
    """Cumulative sums of an increment sequence (B_0 = 0 excluded).

    ``out[j] = increments[0] + ... + increments[j]``, so the last entry is
    the exact total sum.
    """
    inc = np.asarray(increments, dtype=float)
    if inc.ndim != 1 or inc.size == 0:
        raise ValueError("increments must be a nonempty 1-d sequence")
    return np.cumsum(inc)
