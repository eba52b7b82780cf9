"""Numerical kernels shared across the library.

Four independent tools live here:

* ``gamma_fn``: validated gamma function.
* ``correction_integral``: the weakly singular double integral entering the
  Skorohod-corrected least-squares estimator, reduced by Fubini to three
  one-dimensional integrals of the form ``int_0^T u^gamma * phi(u) du`` with
  smooth ``phi``, each evaluated by product integration on panels graded
  toward zero, with automatic refinement until a tolerance is met.
* ``stationary_second_moment`` / ``invert_p``: the monotone moment map
  ``p(theta) = 1/(2 theta) + H Gamma(2H) theta^(-2H)`` and its inverse
  (bracketing bisection, then a safeguarded secant polish).
* ``kappa`` / ``solve_g_kernel``: Nystrom solution of the second-kind
  integral equation ``g(s,t) + int_0^t g(r,t) kappa(r,s) dr = 1`` whose
  solution defines the fundamental martingale, together with the diagonal
  ``g(s,s)`` and the bracket ``<M>_t = int_0^t g(s,s)^2 ds``.

The kernel ``kappa`` is homogeneous of degree ``2H-2``, so ``g(t*sigma, t)``
as a function of ``sigma`` solves ``(I + t^(2H-1) K) G = 1`` on a fixed unit
mesh. One matrix assembly per ``(H, m)`` therefore serves every right
endpoint ``t``; changing ``t`` only rescales the system by ``c = t^(2H-1)``.
The diagonal values ``g(s_j, s_j)`` come from a batch of such rescaled
solves, one per right endpoint ``s_j``, each fully resolved on its own
scaled mesh.

Solutions carry boundary layers in powers of ``s^rho`` and ``(t-s)^rho``
(rho = 2H-1) at the two ends of ``[0, t]``. The discretization therefore
uses quadratic elements in the layer coordinate ``u = sigma^rho`` (resp.
``(1-sigma)^rho``) on the two outermost panel pairs -- capturing the
``u^2 = sigma^(2 rho)`` curvature that a single power pair misses -- and
linear hats in between. All kernel moments are exact: elementary power
antiderivatives on interior panels, incomplete-beta and Gauss
hypergeometric closed forms on the edge elements.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import chebyshev as _cheb
from scipy import special as _sp

from .noise import HurstParam

__all__ = [
    "QuadratureSpec",
    "KernelSolution",
    "gamma_fn",
    "kappa",
    "correction_integral",
    "stationary_second_moment",
    "invert_p",
    "solve_g_kernel",
]

# Fallback interpolation exponent: below this rho the power basis
# {1, s^rho, ...} is numerically indistinguishable from constants and the
# solution is flat anyway, so plain polynomial panels are used instead.
_MIN_LAYER_RHO = 1e-3

# Number of panels merged into each boundary-layer element (polynomial
# degree in the layer coordinate u = sigma^rho).
_EDGE_ORDER = 2

_MAX_MESH = 4096


def _require_hurst(h) -> HurstParam:
    if not isinstance(h, HurstParam):
        raise TypeError(f"expected HurstParam, got {type(h).__name__}")
    return h


# ---------------------------------------------------------------------------
# gamma function
# ---------------------------------------------------------------------------


def gamma_fn(x: float) -> float:
    """Gamma function for x > 0.

    Thin validated wrapper over the scipy implementation (relative error
    at machine-precision level, well inside the 1e-12 contract).
    """
    x = float(x)
    if not x > 0.0:
        raise ValueError(f"gamma_fn requires x > 0, got {x}")
    return float(_sp.gamma(x))


# ---------------------------------------------------------------------------
# stationary second moment p(theta) and its inverse
# ---------------------------------------------------------------------------


def stationary_second_moment(theta: float, h: HurstParam) -> float:
    """p(theta) = 1/(2 theta) + H Gamma(2H) theta^(-2H).

    Large-time limit of the time-averaged squared process for drift
    theta > 0; strictly decreasing in theta when H >= 1/2, which is what
    makes the moment estimator well defined.
    """
    _require_hurst(h)
    theta = float(theta)
    if not theta > 0.0:
        raise ValueError(f"stationary_second_moment requires theta > 0, got {theta}")
    return 0.5 / theta + h.h * gamma_fn(2.0 * h.h) * theta ** (-2.0 * h.h)


def _invert_p_impl(y: float, h: HurstParam) -> tuple[float, int]:
    """Invert p; returns (theta, iteration count) for diagnostics."""
    hh = h.h
    if hh == 0.5:
        # p(theta) = 1/theta exactly at H = 1/2
        return 1.0 / y, 0

    g2h = gamma_fn(2.0 * hh)

    def p(th: float) -> float:
        return 0.5 / th + hh * g2h * th ** (-2.0 * hh)

    iters = 0
    lo, hi = 1e-6, 1e6
    while p(lo) < y:
        lo *= 0.1
        iters += 1
        if lo < 1e-280:
            raise ValueError(f"moment y={y} above attainable range of p")
    while p(hi) > y:
        hi *= 10.0
        iters += 1
        if hi > 1e280:
            raise ValueError(f"moment y={y} below attainable range of p")

    # coarse bisection (p is strictly decreasing on the bracket)
    while hi - lo > 1e-3 * lo:
        iters += 1
        mid = 0.5 * (lo + hi)
        if p(mid) >= y:
            lo = mid
        else:
            hi = mid
        if iters > 400:
            raise RuntimeError("bisection failed to narrow the bracket")

    # safeguarded secant polish, keeping the sign-change bracket
    fa = p(lo) - y
    fb = p(hi) - y
    target = 1e-10 * max(1.0, abs(y))
    if abs(fa) <= target:
        return lo, iters
    if abs(fb) <= target:
        return hi, iters
    for _ in range(100):
        iters += 1
        denom = fb - fa
        theta = hi - fb * (hi - lo) / denom if denom != 0.0 else 0.5 * (lo + hi)
        if not lo < theta < hi:
            theta = 0.5 * (lo + hi)
        ft = p(theta) - y
        if abs(ft) <= target:
            return theta, iters
        if ft > 0.0:
            lo, fa = theta, ft
        else:
            hi, fb = theta, ft
    raise RuntimeError("secant polish did not reach tolerance")


def invert_p(y: float, h: HurstParam) -> float:
    """Unique theta > 0 with p(theta) = y, to |p(theta) - y| <= 1e-10 max(1, y).

    Requires H >= 1/2 (p is strictly decreasing there) and y > 0.
    """
    _require_hurst(h)
    y = float(y)
    if not (np.isfinite(y) and y > 0.0):
        raise ValueError(f"invert_p requires finite y > 0, got {y}")
    if h.h < 0.5:
        raise ValueError("invert_p requires H >= 1/2 (monotone regime)")
    theta, _ = _invert_p_impl(y, h)
    return float(theta)


# ---------------------------------------------------------------------------
# correction integral (weakly singular double integral)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class QuadratureSpec:
    """Controls for the singular quadrature.

    singular_exponent must equal 2H-2 for the Hurst index in use; it is
    carried explicitly so a spec built for one H cannot silently be applied
    to another.
    """

    singular_exponent: float
    panels: int = 32
    tol: float = 1e-7

    def __post_init__(self) -> None:
        if self.panels < 4:
            raise ValueError(f"panels must be >= 4, got {self.panels}")
        if not self.tol > 0.0:
            raise ValueError(f"tol must be positive, got {self.tol}")
        if not -1.0 < self.singular_exponent < 0.0:
            raise ValueError(
                f"singular_exponent must lie in (-1, 0), got {self.singular_exponent}"
            )


_CHEB_DEGREE = 12


@functools.lru_cache(maxsize=64)
def _weighted_xi_moments(gamma: float, degree: int) -> np.ndarray:
    """Exact moments M_j = int_0^1 v^gamma (2v-1)^j dv for gamma > -1."""
    out = np.empty(degree + 1)
    for j in range(degree + 1):
        acc = 0.0
        for r in range(j + 1):
            acc += math.comb(j, r) * (2.0**r) * ((-1.0) ** (j - r)) / (gamma + r + 1.0)
        out[j] = acc
    out.setflags(write=False)
    return out


@functools.lru_cache(maxsize=8)
def _gauss_rule(n: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(n)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def _product_power_integral(phi, gamma: float, upper: float, panels: int) -> float:
    """int_0^upper u^gamma phi(u) du for smooth phi and gamma > -1.

    Panels graded cubically toward 0. On the first panel the power weight
    is integrated exactly against a Chebyshev interpolant of phi; away from
    zero the weight is smooth and plain Gauss-Legendre suffices.
    """
    k = np.arange(panels + 1) / panels
    edges = upper * k**3
    x1 = edges[1]

    deg = _CHEB_DEGREE
    i = np.arange(deg + 1)
    xi = np.cos(np.pi * (2 * i + 1) / (2 * deg + 2))
    coeffs = _cheb.chebfit(xi, phi(x1 * (xi + 1.0) / 2.0), deg)
    poly = _cheb.cheb2poly(coeffs)
    moments = _weighted_xi_moments(float(gamma), deg)
    first = x1 ** (gamma + 1.0) * float(poly @ moments[: poly.size])

    xg, wg = _gauss_rule(24)
    a, b = edges[1:-1], edges[2:]
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    u = mid[:, None] + half[:, None] * xg[None, :]
    w = half[:, None] * wg[None, :]
    rest = float(np.sum(w * u**gamma * phi(u)))
    return first + rest


@functools.lru_cache(maxsize=64)
def _correction_info(
    theta: float, hh: float, big_t: float, q: QuadratureSpec
) -> tuple[float, float, int]:
    """Correction integral with (value, error estimate, panels used).

    Fubini in the (t-s, t+s) variables collapses the double integral to

        I = int_0^T (T-u) e^(-theta u) u^(2H-2) du
          + (1/(2 rho)) * [ int_0^T (2T-u)^rho e^(-theta u) du
                            - int_0^T u^rho e^(-theta u) du ],  rho = 2H-1,

    three weighted integrals with smooth factors, refined by panel doubling
    until consecutive values agree within q.tol.
    """
    beta = 2.0 * hh - 2.0
    rho = 2.0 * hh - 1.0

    def whole(panels: int) -> float:
        part_a = _product_power_integral(
            lambda u: (big_t - u) * np.exp(-theta * u), beta, big_t, panels
        )
        part_c = _product_power_integral(
            lambda u: (2.0 * big_t - u) ** rho * np.exp(-theta * u), 0.0, big_t, panels
        )
        part_d = _product_power_integral(
            lambda u: np.exp(-theta * u), rho, big_t, panels
        )
        return part_a + (part_c - part_d) / (2.0 * rho)

    prev = whole(q.panels)
    panels = q.panels
    for _ in range(6):
        panels *= 2
        cur = whole(panels)
        err = abs(cur - prev)
        if err <= q.tol:
            return cur, err, panels
        prev = cur
    raise RuntimeError(
        f"correction integral refinement did not converge to tol={q.tol} "
        f"(last change {abs(cur - prev):.3e} at {panels} panels)"
    )


def correction_integral(
    theta: float, h: HurstParam, big_t: float, q: QuadratureSpec | None = None
) -> float:
    """int_0^T int_0^t e^(-theta(t-s)) ((t-s)^(2H-2) + (t+s)^(2H-2)) ds dt.

    Absolute error at most q.tol (default 1e-7). Requires theta > 0 and
    H > 1/2 so the (t-s)^(2H-2) singularity is integrable; raises
    RuntimeError if panel refinement fails to converge.
    """
    _require_hurst(h)
    theta = float(theta)
    if not theta > 0.0:
        raise ValueError(f"correction_integral requires theta > 0, got {theta}")
    if h.h <= 0.5:
        raise ValueError("correction_integral requires H > 1/2")
    big_t = float(big_t)
    if big_t < 0.0:
        raise ValueError(f"correction_integral requires T >= 0, got {big_t}")
    if big_t == 0.0:
        return 0.0
    beta = 2.0 * h.h - 2.0
    if q is None:
        q = QuadratureSpec(singular_exponent=beta)
    elif abs(q.singular_exponent - beta) > 1e-12:
        raise ValueError(
            f"QuadratureSpec.singular_exponent={q.singular_exponent} is inconsistent "
            f"with 2H-2={beta}"
        )
    value, _, _ = _correction_info(theta, h.h, big_t, q)
    return float(value)


# ---------------------------------------------------------------------------
# kernel equation
# ---------------------------------------------------------------------------


def kappa(s, t, h: HurstParam):
    """Kernel density H(2H-1)(|t-s|^(2H-2) - (t+s)^(2H-2)).

    Symmetric in (s, t); identically zero at H = 1/2; singular on the
    diagonal s = t (rejected). Accepts arrays with broadcasting.
    """
    _require_hurst(h)
    s_arr = np.asarray(s, dtype=float)
    t_arr = np.asarray(t, dtype=float)
    if np.any(s_arr <= 0.0) or np.any(t_arr <= 0.0):
        raise ValueError("kappa requires s > 0 and t > 0")
    if h.h < 0.5:
        raise ValueError("kappa requires H >= 1/2")
    if h.h == 0.5:
        out = np.zeros(np.broadcast(s_arr, t_arr).shape)
        return float(out) if out.ndim == 0 else out
    if np.any(s_arr == t_arr):
        raise ValueError("kappa is singular on the diagonal s = t")
    beta = 2.0 * h.h - 2.0
    alpha = h.h * (2.0 * h.h - 1.0)
    out = alpha * (np.abs(t_arr - s_arr) ** beta - (t_arr + s_arr) ** beta)
    return float(out) if out.ndim == 0 else out


@functools.lru_cache(maxsize=16)
def _edge_shape_matrix(exponent: float, hstep: float, order: int) -> np.ndarray:
    """Coefficients of the Lagrange shape functions on the layer nodes.

    Nodes sit at u_j = (j hstep)^exponent, j = 0..order; column j of the
    returned matrix holds the monomial coefficients (in powers of u) of the
    shape function that is 1 at node j and 0 at the others.
    """
    u = (np.arange(order + 1) * hstep) ** exponent
    vand = np.vander(u, increasing=True)
    out = np.linalg.inv(vand)
    out.setflags(write=False)
    return out


def _tail_power_moment(x, k: int, rho: float):
    """int_0^x v^(rho-1) (1+v)^(k rho) dv via the Euler hypergeometric form."""
    x = np.asarray(x, dtype=float)
    return x**rho / rho * _sp.hyp2f1(-k * rho, rho, rho + 1.0, -x)


def _left_edge_moments(rho: float, m: int, order: int) -> np.ndarray:
    """moments[k, i] = int_0^X r^(k rho) kappa-hat(r, sigma_i) dr, X = order/m.

    kappa-hat is the unit kernel WITHOUT the alpha prefactor:
    |r - sigma|^(rho-1) - (r + sigma)^(rho-1). Same-side parts reduce to
    incomplete beta functions (splitting at sigma_i when it falls inside
    the element), cross parts to the Gauss hypergeometric.
    """
    hstep = 1.0 / m
    big_x = order * hstep
    sig = np.arange(1, m + 1) * hstep
    idx = np.arange(1, m + 1)
    out = np.empty((order + 1, m))
    for k in range(order + 1):
        ap = k * rho + 1.0
        b_full = _sp.beta(ap, rho)
        scale = sig ** ((k + 1.0) * rho)
        same = np.empty(m)
        far = idx >= order  # sigma_i >= X: element entirely left of the node
        same[far] = (
            scale[far] * b_full * _sp.betainc(ap, rho, np.minimum(big_x / sig[far], 1.0))
        )
        inside = ~far  # sigma_i interior to the element: split at sigma_i
        if np.any(inside):
            tail = _tail_power_moment((big_x - sig[inside]) / sig[inside], k, rho)
            same[inside] = scale[inside] * (b_full + tail)
        xq = big_x / sig
        cross = scale * xq**ap / ap * _sp.hyp2f1(1.0 - rho, ap, ap + 1.0, -xq)
        out[k] = same - cross
    return out


def _right_edge_moments(rho: float, m: int, order: int) -> np.ndarray:
    """moments[k, i] = int_0^X w^(k rho) kappa-hat(1 - w, sigma_i) dw, X = order/m.

    w = 1 - r maps the last ``order`` panels onto [0, X]. The same-side
    distance becomes |c_i - w| with c_i = 1 - sigma_i (zero at the final
    node, where the moment is an elementary power integral); the cross
    part becomes (c'_i - w) with c'_i = 1 + sigma_i > X, a pure
    incomplete-beta case.
    """
    hstep = 1.0 / m
    big_x = order * hstep
    sig = np.arange(1, m + 1) * hstep
    idx = np.arange(1, m + 1)
    c_same = 1.0 - sig
    c_cross = 1.0 + sig
    out = np.empty((order + 1, m))
    for k in range(order + 1):
        ap = k * rho + 1.0
        b_full = _sp.beta(ap, rho)
        same = np.empty(m)
        far = idx <= m - order  # c_i >= X
        sc_far = c_same[far] ** ((k + 1.0) * rho)
        same[far] = (
            sc_far * b_full * _sp.betainc(ap, rho, np.minimum(big_x / c_same[far], 1.0))
        )
        inside = (idx > m - order) & (idx < m)  # 0 < c_i < X
        if np.any(inside):
            cc = c_same[inside]
            tail = _tail_power_moment((big_x - cc) / cc, k, rho)
            same[inside] = cc ** ((k + 1.0) * rho) * (b_full + tail)
        same[m - 1] = big_x ** (k * rho + rho) / (k * rho + rho)  # c_m = 0
        sc_cross = c_cross ** ((k + 1.0) * rho)
        cross = sc_cross * b_full * _sp.betainc(ap, rho, big_x / c_cross)
        out[k] = same - cross
    return out


@functools.lru_cache(maxsize=8)
def _unit_kernel_system(hh: float, m: int) -> tuple[np.ndarray, np.ndarray]:
    """Nystrom weight matrix W and anchor vector e on the unit mesh j/m.

    For any right endpoint t, the nodal values G_j ~ g(t*sigma_j, t) at
    sigma_j = j/m (j = 1..m) solve (I + c W) G = 1 - c e with c = t^(2H-1).
    The anchor vector carries the known boundary value g(0, t) = 1 through
    the left edge element. Interior panels are linear hats with elementary
    exact moments; the two edge elements are quadratic in the layer
    coordinate with beta/hypergeometric exact moments.
    """
    rho = 2.0 * hh - 1.0
    alpha = hh * rho
    order = _EDGE_ORDER
    hstep = 1.0 / m
    sig = np.arange(1, m + 1) * hstep
    a = np.arange(0, m) * hstep  # panel q = [a_q, a_q + hstep]
    b = a + hstep
    col = sig[:, None]

    def f_same(x):
        # antiderivative of |x|^(rho-1)
        return np.sign(x) * np.abs(x) ** rho / rho

    def g_same(x):
        # antiderivative of x |x|^(rho-1)
        return np.abs(x) ** (rho + 1.0) / (rho + 1.0)

    d_f = f_same(b[None, :] - col) - f_same(a[None, :] - col)
    d_g = g_same(b[None, :] - col) - g_same(a[None, :] - col)
    cross_0 = ((b[None, :] + col) ** rho - (a[None, :] + col) ** rho) / rho
    cross_1 = ((b[None, :] + col) ** (rho + 1.0) - (a[None, :] + col) ** (rho + 1.0)) / (
        rho + 1.0
    ) - (a[None, :] + col) * cross_0

    # m0[i, q] = int_panel_q kappa-hat(r, sig_i) dr
    # u1[i, q] = int_panel_q ((r - a_q)/hstep) kappa-hat(r, sig_i) dr
    m0 = alpha * (d_f - cross_0)
    u1 = alpha * (d_g + (col - a[None, :]) * d_f - cross_1) / hstep

    shape = _edge_shape_matrix(rho, hstep, order)  # (order+1, order+1)
    left = alpha * _left_edge_moments(rho, m, order)  # (order+1, m)
    right = alpha * _right_edge_moments(rho, m, order)
    left_contrib = left.T @ shape  # (m, order+1), column j <-> node sigma = j/m
    right_contrib = right.T @ shape  # column j <-> node sigma = 1 - j/m

    weights = np.zeros((m, m))
    anchor = left_contrib[:, 0].copy()  # known node g(0, t) = 1
    for j in range(1, order + 1):
        weights[:, j - 1] += left_contrib[:, j]
    for j in range(order + 1):
        weights[:, m - 1 - j] += right_contrib[:, j]
    for q in range(order, m - order):
        weights[:, q - 1] += m0[:, q] - u1[:, q]
        weights[:, q] += u1[:, q]

    weights.setflags(write=False)
    anchor.setflags(write=False)
    return weights, anchor


def _batch_scaled_solve(
    weights: np.ndarray, anchor: np.ndarray, cs: np.ndarray
) -> tuple[np.ndarray, float]:
    """Solve (I + c W) G = 1 - c e for each scale c; (solutions, max residual)."""
    cs = np.asarray(cs, dtype=float)
    n_sys = cs.size
    m = weights.shape[0]
    sols = np.empty((n_sys, m))
    eye = np.eye(m)
    residual = 0.0
    chunk = max(1, int(2.0e7 / (m * m)))
    for lo in range(0, n_sys, chunk):
        cc = cs[lo : lo + chunk]
        mats = eye[None, :, :] + cc[:, None, None] * weights[None, :, :]
        rhs = 1.0 - cc[:, None] * anchor[None, :]
        block = np.linalg.solve(mats, rhs[:, :, None])[:, :, 0]
        sols[lo : lo + chunk] = block
        gap = np.abs(np.einsum("kij,kj->ki", mats, block) - rhs)
        residual = max(residual, float(gap.max()))
    return sols, residual


@functools.lru_cache(maxsize=16)
def _cached_endpoint_solutions(
    hh: float, m: int, cs_key: tuple
) -> tuple[np.ndarray, float]:
    weights, anchor = _unit_kernel_system(hh, m)
    sols, residual = _batch_scaled_solve(weights, anchor, np.array(cs_key))
    sols.setflags(write=False)
    return sols, residual


@functools.lru_cache(maxsize=8)
def _graded_unit_system(hh: float, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Hat-basis Nystrom system on a mesh graded toward both endpoints.

    Node j sits at x^q / (x^q + (1-x)^q) with x = j/n and grading exponent
    q = 2/rho (capped), the classical grading that restores second-order
    convergence of piecewise-linear product integration in the presence of
    s^rho endpoint layers. Unknowns are the nodal values at j = 1..n; the
    known value G = 1 at node 0 feeds the anchor vector. Only the value at
    sigma = 1 is read off (diagonal solves), so no interpolant is built.
    """
    rho = 2.0 * hh - 1.0
    alpha = hh * rho
    # the end gap is n^(-q); keep it well above float spacing around 1.0
    qexp = min(2.0 / rho, -math.log(1e-13) / math.log(n))
    x = np.arange(n + 1) / n
    xa = x**qexp
    xb = (1.0 - x) ** qexp
    nodes = xa / (xa + xb)
    if np.any(np.diff(nodes) <= 0.0):
        raise RuntimeError(f"graded mesh collapsed at n={n} (grading {qexp:.2f})")
    sig = nodes[1:]
    a = nodes[:-1][None, :]
    b = nodes[1:][None, :]
    widths = b - a
    col = sig[:, None]

    def f_same(y):
        return np.sign(y) * np.abs(y) ** rho / rho

    def g_same(y):
        return np.abs(y) ** (rho + 1.0) / (rho + 1.0)

    d_f = f_same(b - col) - f_same(a - col)
    d_g = g_same(b - col) - g_same(a - col)
    cross_0 = ((b + col) ** rho - (a + col) ** rho) / rho
    cross_1 = ((b + col) ** (rho + 1.0) - (a + col) ** (rho + 1.0)) / (
        rho + 1.0
    ) - (a + col) * cross_0

    m0 = alpha * (d_f - cross_0)
    u1 = alpha * (d_g + (col - a) * d_f - cross_1) / widths

    weights_mat = u1.copy()  # right node of panel q is unknown column q
    weights_mat[:, : n - 1] += (m0 - u1)[:, 1:]  # left nodes of panels 1..n-1
    anchor = (m0 - u1)[:, 0].copy()  # left node of panel 0 has known value 1

    weights_mat.setflags(write=False)
    anchor.setflags(write=False)
    return weights_mat, anchor


@functools.lru_cache(maxsize=16)
def _cached_diagonal_values(
    hh: float, n: int, cs_key: tuple
) -> tuple[np.ndarray, float]:
    """g(t, t) for each scale c = t^rho, via the graded system's last node."""
    weights, anchor = _graded_unit_system(hh, n)
    sols, residual = _batch_scaled_solve(weights, anchor, np.array(cs_key))
    vals = np.ascontiguousarray(sols[:, -1])
    vals.setflags(write=False)
    return vals, residual


def _interp_unit_solution(sols: np.ndarray, rho: float, sigma) -> np.ndarray:
    """Evaluate a unit-mesh kernel solution at arbitrary sigma in [0, 1].

    Edge regions reuse the Nystrom representation (quadratic in the layer
    coordinate, anchored at G(0) = 1 on the left); the interior
    interpolates the slowly varying layer factor w = (1 - G)/sigma^rho
    linearly, so the left boundary layer stays resolved between nodes.
    """
    m = sols.size
    hstep = 1.0 / m
    order = _EDGE_ORDER
    nodes = np.arange(1, m + 1) * hstep
    sig = np.asarray(sigma, dtype=float)
    exponent = rho if rho >= _MIN_LAYER_RHO else 1.0
    shape = _edge_shape_matrix(exponent, hstep, order)
    out = np.empty_like(sig)

    first = sig <= order * hstep
    if np.any(first):
        coef = shape @ np.concatenate(([1.0], sols[:order]))
        u = sig[first] ** exponent
        out[first] = sum(coef[p] * u**p for p in range(order + 1))
    last = sig >= 1.0 - order * hstep
    if np.any(last):
        coef = shape @ sols[-1 : -order - 2 : -1]
        w = (1.0 - sig[last]) ** exponent
        out[last] = sum(coef[p] * w**p for p in range(order + 1))
    mid = ~(first | last)
    if np.any(mid):
        w_nodes = (1.0 - sols) / nodes**exponent
        out[mid] = 1.0 - sig[mid] ** exponent * np.interp(sig[mid], nodes, w_nodes)
    return out


def _fit_power_quadratics(x: np.ndarray, y: np.ndarray, exponent: float) -> np.ndarray:
    """Quadratic-in-u fits (u = s^exponent) through consecutive node triples.

    x, y must hold an odd number 2n+1 of nodes; returns (n, 3) coefficient
    rows [c0, c1, c2] with y ~ c0 + c1 u + c2 u^2 on each pair of panels.
    """
    u = x**exponent
    basis = np.stack([np.ones_like(u), u, u * u], axis=-1)
    vand = np.stack([basis[0:-2:2], basis[1:-1:2], basis[2::2]], axis=1)
    ys = np.stack([y[0:-2:2], y[1:-1:2], y[2::2]], axis=1)
    return np.linalg.solve(vand, ys[:, :, None])[:, :, 0]


def _power_poly_integral(
    coef: np.ndarray, s_lo, s_hi, exponent: float, squared: bool
):
    """Integrate (c0 + c1 u + c2 u^2) or its square over [s_lo, s_hi], u = s^exponent."""
    if squared:
        terms = (
            coef[..., 0] ** 2,
            2.0 * coef[..., 0] * coef[..., 1],
            coef[..., 1] ** 2 + 2.0 * coef[..., 0] * coef[..., 2],
            2.0 * coef[..., 1] * coef[..., 2],
            coef[..., 2] ** 2,
        )
    else:
        terms = (coef[..., 0], coef[..., 1], coef[..., 2])
    total = 0.0
    for k, ck in enumerate(terms):
        pw = k * exponent + 1.0
        total = total + ck * (s_hi**pw - s_lo**pw) / pw
    return total


def _layer_cumulative_square_integral(
    nodes: np.ndarray, values: np.ndarray, rho: float
) -> np.ndarray:
    """Cumulative int_0^{s_j} y(u)^2 du for y given at nodes, y(0) = 1.

    Panel pairs carry quadratic fits in u = s^rho (the boundary-layer
    coordinate near 0; plain quadratics when rho is negligible), squared
    and integrated in closed form; an odd trailing panel falls back to the
    two-point power pair.
    """
    x = np.concatenate(([0.0], nodes))
    y = np.concatenate(([1.0], values))
    exponent = rho if rho >= _MIN_LAYER_RHO else 1.0
    m = nodes.size
    out = np.empty(m)
    n_pair = m // 2
    if n_pair:
        stop = 2 * n_pair + 1
        coef = _fit_power_quadratics(x[:stop], y[:stop], exponent)
        lo = x[0 : 2 * n_pair : 2]
        mid = x[1 : 2 * n_pair : 2]
        hi = x[2 : stop : 2]
        inc_mid = _power_poly_integral(coef, lo, mid, exponent, squared=True)
        inc_full = _power_poly_integral(coef, lo, hi, exponent, squared=True)
        base = np.concatenate(([0.0], np.cumsum(inc_full)))
        out[0 : 2 * n_pair : 2] = base[:-1] + inc_mid
        out[1 : 2 * n_pair : 2] = base[1:]
    if m % 2 == 1:
        u0 = x[-2] ** exponent
        u1 = x[-1] ** exponent
        cb = (y[-1] - y[-2]) / (u1 - u0)
        ca = y[-2] - cb * u0
        coef = np.array([ca, cb, 0.0])
        inc = _power_poly_integral(coef, x[-2], x[-1], exponent, squared=True)
        out[m - 1] = (out[m - 2] if m >= 2 else 0.0) + float(inc)
    return out


@dataclass(frozen=True, eq=False)
class KernelSolution:
    """Discretized g(., t) plus derived quantities on the mesh s_j = j t/m.

    residual is the sup-norm residual of the dense Nystrom linear systems
    (solver tolerance); discretization error is probed separately through
    mesh refinement and the integral identity below.
    """

    t: float
    h: HurstParam
    mesh: np.ndarray
    g_values: np.ndarray
    g_diag: np.ndarray
    bracket_M: np.ndarray
    residual: float

    def __post_init__(self) -> None:
        for name in ("mesh", "g_values", "g_diag", "bracket_M"):
            arr = np.array(getattr(self, name), dtype=float)
            if arr.ndim != 1:
                raise ValueError(f"{name} must be one-dimensional")
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"{name} contains non-finite entries")
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        m = self.mesh.size
        if m < 1:
            raise ValueError("mesh must be nonempty")
        if any(getattr(self, n).size != m for n in ("g_values", "g_diag", "bracket_M")):
            raise ValueError("mesh, g_values, g_diag, bracket_M must share a length")
        if self.mesh[0] <= 0.0 or np.any(np.diff(self.mesh) <= 0.0):
            raise ValueError("mesh must be strictly increasing within (0, t]")
        if abs(self.mesh[-1] - self.t) > 1e-12 * max(1.0, abs(self.t)):
            raise ValueError("mesh must end at the right endpoint t")
        if self.bracket_M[0] < 0.0 or np.any(np.diff(self.bracket_M) < 0.0):
            raise ValueError("bracket_M must be nonnegative and nondecreasing")

    def integral_g(self) -> float:
        """int_0^t g(s, t) ds with the edge-layer panel fits.

        Quadratic fits in s^rho over panel pairs (anchored at the exact
        value g(0, t) = 1), a quadratic fit in (t - s)^rho over the final
        panel pair; equals bracket_M[-1] in exact arithmetic (integral
        identity of the fundamental martingale).
        """
        rho = 2.0 * self.h.h - 1.0
        exponent = rho if rho >= _MIN_LAYER_RHO else 1.0
        x = np.concatenate(([0.0], self.mesh))
        y = np.concatenate(([1.0], self.g_values))
        m = self.mesh.size

        # panels 0 .. m-3 by quadratic pairs (odd leftover -> power pair)
        n_left = m - 2
        total = 0.0
        n_pair = n_left // 2
        if n_pair:
            stop = 2 * n_pair + 1
            coef = _fit_power_quadratics(x[:stop], y[:stop], exponent)
            lo = x[0 : 2 * n_pair : 2]
            hi = x[2 : stop : 2]
            total += float(
                np.sum(_power_poly_integral(coef, lo, hi, exponent, squared=False))
            )
        if n_left % 2 == 1:
            u0 = x[n_left - 1] ** exponent
            u1 = x[n_left] ** exponent
            cb = (y[n_left] - y[n_left - 1]) / (u1 - u0)
            ca = y[n_left - 1] - cb * u0
            coef = np.array([ca, cb, 0.0])
            total += float(
                _power_poly_integral(coef, x[n_left - 1], x[n_left], exponent, squared=False)
            )

        # final two panels: quadratic in w = t - s through the last three nodes
        w_nodes = self.t - x[m - 2 :][::-1]  # [0, h_t, 2 h_t]
        w_vals = y[m - 2 :][::-1]
        uw = w_nodes**exponent
        basis = np.stack([np.ones(3), uw, uw * uw], axis=-1)
        coef_w = np.linalg.solve(basis, w_vals)
        total += float(
            _power_poly_integral(coef_w, 0.0, w_nodes[-1], exponent, squared=False)
        )
        return total


def solve_g_kernel(t: float, h: HurstParam, m: int = 256) -> KernelSolution:
    """Solve the kernel equation on (0, t] with an m-point uniform mesh.

    Returns nodal g(s_j, t), the diagonal g(s_j, s_j) (each diagonal value
    from its own fully resolved solve at right endpoint s_j), and the
    bracket <M> accumulated from the squared diagonal. H = 1/2 short-
    circuits to the exact g = 1, <M>_t = t. Cost grows like m^4 through the
    batched diagonal solves; m is capped accordingly.
    """
    _require_hurst(h)
    t = float(t)
    if not t > 0.0:
        raise ValueError(f"solve_g_kernel requires t > 0, got {t}")
    if not 8 <= m <= _MAX_MESH:
        raise ValueError(f"mesh size must lie in [8, {_MAX_MESH}], got {m}")
    mesh = np.arange(1, m + 1) * (t / m)
    mesh[-1] = t
    if h.h == 0.5:
        ones = np.ones(m)
        return KernelSolution(
            t=t,
            h=h,
            mesh=mesh,
            g_values=ones,
            g_diag=ones.copy(),
            bracket_M=mesh.copy(),
            residual=0.0,
        )
    if h.h < 0.5:
        raise ValueError("solve_g_kernel requires H >= 1/2")
    rho = 2.0 * h.h - 1.0
    cs = tuple(float(c) for c in mesh**rho)
    sols, res_uniform = _cached_endpoint_solutions(h.h, m, cs[-1:])
    g_diag, res_graded = _cached_diagonal_values(h.h, m, cs)
    residual = max(res_uniform, res_graded)
    if residual > 1e-6:
        raise RuntimeError(f"Nystrom linear-system residual {residual:.3e} > 1e-6")
    g_values = sols[-1].copy()
    bracket = _layer_cumulative_square_integral(mesh, g_diag.copy(), rho)
    return KernelSolution(
        t=t,
        h=h,
        mesh=mesh,
        g_values=g_values,
        g_diag=g_diag,
        bracket_M=bracket,
        residual=residual,
    )
