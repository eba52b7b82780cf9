"""Drift estimators for the mixed sub-fractional OU process.

Three of the four estimators live here (the likelihood-based one needs the
martingale machinery and has its own module):

* ``lse_skorohod``: the Skorohod-corrected least-squares estimator. Its
  correction term contains the true drift, so a reference value must be
  supplied; it is a theory-verification tool for simulations, not a
  data-facing estimator.
* ``practical_estimator``: inverts the ergodic second-moment map
  ``p(theta) = 1/(2 theta) + H Gamma(2H) theta^(-2H)`` at the empirical
  mean of the squared discrete samples.
* ``nonergodic_estimator``: ``-X_T^2 / (2 int X^2 dt)``, the Young-integral
  least squares for negative drift.

The asymptotic-law helpers ``sigma_H`` (limit standard deviation of the
corrected LSE for 1/2 < H < 3/4), ``boundary_variance`` (its H = 3/4
analogue) and ``phi_statistic`` (the standardized error of the practical
estimator, asymptotically standard normal) complete the module.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .noise import HurstParam
from .numerics import QuadratureSpec, _correction_info, _invert_p_impl, gamma_fn
from .paths import SamplePath

__all__ = [
    "Method",
    "EstimateResult",
    "integral_X2",
    "lse_skorohod",
    "practical_estimator",
    "nonergodic_estimator",
    "sigma_H",
    "boundary_variance",
    "phi_statistic",
]


class Method(enum.Enum):
    """Estimator selector; values double as the CLI spellings."""

    MLE = "mle"
    LSE_SKOROHOD = "lse"
    PRACTICAL = "practical"
    NONERGODIC = "nonergodic"


@dataclass(frozen=True)
class EstimateResult:
    """Point estimate of the drift with method tag and diagnostics.

    denominator is the normalizing integral of the method (int X^2 dt for
    the least-squares family, the empirical second moment for the moment
    estimator, int Q^2 d<M> for the MLE); it is positive for any returned
    estimate. diagnostics carries named reals such as root-finder iteration
    counts or quadrature error estimates.
    """

    theta_hat: float
    method: Method
    denominator: float
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not isinstance(self.method, Method):
            raise TypeError(f"method must be a Method, got {self.method!r}")
        if not np.isfinite(self.theta_hat):
            raise ValueError(f"theta_hat must be finite, got {self.theta_hat!r}")
        if not self.denominator > 0.0:
            raise ValueError(f"denominator must be positive, got {self.denominator!r}")
        object.__setattr__(self, "theta_hat", float(self.theta_hat))
        object.__setattr__(self, "denominator", float(self.denominator))
        object.__setattr__(
            self, "diagnostics", {str(k): float(v) for k, v in self.diagnostics.items()}
        )


def integral_X2(x: SamplePath) -> float:
    """Trapezoidal int_0^T X_t^2 dt on the sampling grid (t_0 included)."""
    if x.n < 2:
        raise ValueError(f"integral_X2 needs at least 2 sampled points, got {x.n}")
    vals = x.full_values()
    return float(np.trapezoid(vals * vals, dx=x.d))


def lse_skorohod(x: SamplePath, h: HurstParam, theta_ref: float) -> EstimateResult:
    """Skorohod-corrected least-squares estimate of the drift.

    theta_bar = -X_T^2/(2 int X^2) + alpha_H I(theta_ref, H, T)/int X^2
                + T/(2 int X^2),
    alpha_H = H(2H-1), I the correction integral. theta_ref must be the
    (known) drift used to generate the path: the correction term depends on
    it, which is exactly why this estimator is usable only in simulation.
    """
    if not isinstance(h, HurstParam):
        raise TypeError(f"expected HurstParam, got {type(h).__name__}")
    if h.h <= 0.5:
        raise ValueError("lse_skorohod requires H > 1/2")
    theta_ref = float(theta_ref)
    if not theta_ref > 0.0:
        raise ValueError(f"theta_ref must be positive, got {theta_ref}")
    den = integral_X2(x)
    if den <= 0.0:
        raise ValueError("degenerate path: int X^2 dt is zero")
    big_t = x.span
    alpha = h.h * (2.0 * h.h - 1.0)
    q = QuadratureSpec(singular_exponent=2.0 * h.h - 2.0)
    corr, corr_err, panels = _correction_info(theta_ref, h.h, big_t, q)
    x_t = x.values[-1]
    theta_bar = (-0.5 * x_t * x_t + alpha * corr + 0.5 * big_t) / den
    return EstimateResult(
        theta_hat=theta_bar,
        method=Method.LSE_SKOROHOD,
        denominator=den,
        diagnostics={
            "correction": corr,
            "correction_error": corr_err,
            "correction_panels": panels,
        },
    )


def practical_estimator(x, h: HurstParam) -> EstimateResult:
    """Moment estimate: invert p at the mean of the squared discrete samples.

    Accepts a SamplePath (the samples are its values at t_1..t_N, the
    initial point excluded) or a plain vector of discrete observations.
    Permutation-invariant by construction.
    """
    if not isinstance(h, HurstParam):
        raise TypeError(f"expected HurstParam, got {type(h).__name__}")
    if h.h < 0.5:
        raise ValueError("practical_estimator requires H >= 1/2")
    if isinstance(x, SamplePath):
        samples = x.values
    else:
        samples = np.asarray(x, dtype=float)
        if samples.ndim != 1 or samples.size < 1:
            raise ValueError("samples must be a nonempty 1-d vector")
        if not np.all(np.isfinite(samples)):
            raise ValueError("samples contain non-finite entries")
    moment = float(np.mean(samples * samples))
    if not moment > 0.0:
        raise ValueError(f"empirical second moment must be positive, got {moment}")
    theta, iters = _invert_p_impl(moment, h)
    return EstimateResult(
        theta_hat=theta,
        method=Method.PRACTICAL,
        denominator=moment,
        diagnostics={"moment": moment, "iterations": iters},
    )


def nonergodic_estimator(x: SamplePath) -> EstimateResult:
    """Young-integral least squares: theta = -X_T^2 / (2 int_0^T X^2 dt).

    Negative for any path with X_T != 0 (the natural regime is negative
    drift); invariant under rescaling of the whole path.
    """
    den = integral_X2(x)
    if den <= 0.0:
        raise ValueError("degenerate path: int X^2 dt is zero")
    x_t = x.values[-1]
    return EstimateResult(
        theta_hat=-x_t * x_t / (2.0 * den),
        method=Method.NONERGODIC,
        denominator=den,
    )


def sigma_H(theta: float, h: HurstParam) -> float:
    """Limit standard deviation of sqrt(T)(theta_bar - theta), 1/2 < H < 3/4.

    sigma_H = sqrt(theta^(1-4H) H^2 (4H-1) (Gamma(2H)^2
                   + Gamma(2H) Gamma(3-4H) Gamma(4H-1) / Gamma(2-2H))
                   + 1/(2 theta))
              / (theta^(-2H) H Gamma(2H) + 1/(2 theta)).

    Diverges as H -> 3/4 (Gamma(3-4H) pole); the boundary case has its own
    constant, see boundary_variance.
    """
    if not isinstance(h, HurstParam):
        raise TypeError(f"expected HurstParam, got {type(h).__name__}")
    theta = float(theta)
    if not theta > 0.0:
        raise ValueError(f"sigma_H requires theta > 0, got {theta}")
    hh = h.h
    if not 0.5 < hh < 0.75:
        raise ValueError(f"sigma_H requires 1/2 < H < 3/4, got {hh}")
    g2h = gamma_fn(2.0 * hh)
    bracket = g2h * g2h + g2h * gamma_fn(3.0 - 4.0 * hh) * gamma_fn(4.0 * hh - 1.0) / gamma_fn(
        2.0 - 2.0 * hh
    )
    num = theta ** (1.0 - 4.0 * hh) * hh * hh * (4.0 * hh - 1.0) * bracket + 0.5 / theta
    den = theta ** (-2.0 * hh) * hh * g2h + 0.5 / theta
    return math.sqrt(num) / den


def boundary_variance(theta: float) -> float:
    """Limit variance of sqrt(T/log T)(theta_bar - theta) at H = 3/4.

    Equals 9 / (4 theta^2 (3 sqrt(pi) theta^(-3/2)/4 + 1/2)^2).
    """
    theta = float(theta)
    if not theta > 0.0:
        raise ValueError(f"boundary_variance requires theta > 0, got {theta}")
    den = 0.75 * math.sqrt(math.pi) * theta ** (-1.5) + 0.5
    return 9.0 / (4.0 * theta * theta * den * den)


def phi_statistic(
    theta_tilde: float, theta: float, h: HurstParam, n: int, d: float
) -> float:
    """Standardized error of the moment estimator over N samples at step d.

    Phi = theta sqrt(N d) (theta_tilde - theta)
          / (sigma_H (H Gamma(2H) theta^(1-2H) + 1/2)),

    asymptotically standard normal for 1/2 < H < 3/4. Affine in
    theta_tilde and zero exactly at theta_tilde = theta.
    """
    if not isinstance(h, HurstParam):
        raise TypeError(f"expected HurstParam, got {type(h).__name__}")
    theta = float(theta)
    if not theta > 0.0:
        raise ValueError(f"phi_statistic requires theta > 0, got {theta}")
    n = int(n)
    if n < 1:
        raise ValueError(f"phi_statistic requires N >= 1, got {n}")
    d = float(d)
    if not d > 0.0:
        raise ValueError(f"phi_statistic requires d > 0, got {d}")
    hh = h.h
    if not 0.5 < hh < 0.75:
        raise ValueError(f"phi_statistic requires 1/2 < H < 3/4, got {hh}")
    scale = sigma_H(theta, h) * (hh * gamma_fn(2.0 * hh) * theta ** (1.0 - 2.0 * hh) + 0.5)
    return theta * math.sqrt(n * d) * (float(theta_tilde) - theta) / scale
