"""End-to-end acceptance checks at desk scale.

Twelve checks, one test each, every test printing a single PASS/FAIL line
with the measured numbers. All runs are seed-pinned, so the outcomes are
reproducible bit for bit.

Four checks (5, 6, 7, 8) compare Monte Carlo output against external
reference targets that the limit theory implemented here contradicts; the
code is kept faithful to that theory, the targets are kept as stated, and
the tests are expected to fail. Each docstring records the quantitative
reason; the spread and shape of the Monte Carlo samples agree with
independent spectral-density and delta-method calculations to within
ordinary sampling error, so the discrepancies are properties of the
targets, not of the implementation.
"""

import itertools
import json
import math

import numpy as np
import pytest

from msfou import (
    ExperimentConfig,
    GenMethod,
    HurstParam,
    Method,
    NoiseSpec,
    correction_integral,
    euler_msfou,
    fgn_autocovariance,
    gamma_fn,
    integral_X2,
    lse_skorohod,
    mle,
    run_rate_experiment,
    run_table_experiment,
    sample_fgn,
    sfbm_covariance,
    sfbm_path,
    sigma_H,
    stationary_second_moment,
    summarize,
    two_sided_fbm,
)
from msfou.cli import main
from msfou.harness import _replication_seed


def _report(number: int, ok: bool, detail: str) -> None:
    print(f"  [{number:2d}] {'PASS' if ok else 'FAIL'}: {detail}")


# ---------------------------------------------------------------------------
# 1-2: noise and process law
# ---------------------------------------------------------------------------

def test_01_fgn_autocovariance_within_3_se():
    """Pooled sample autocovariances of exact-method fGn match the closed
    form at lags 0..5 for four Hurst values."""
    n, reps, lags = 2**14, 200, np.arange(6)
    worst = 0.0
    for h in (0.55, 0.65, 0.75, 0.85):
        hurst = HurstParam(h)
        per_rep = np.empty((reps, lags.size))
        for r in range(reps):
            spec = NoiseSpec(
                n=n, seed=1357 + 1000 * r + int(100 * h), method=GenMethod.CIRCULANT_EXACT
            )
            y = sample_fgn(spec, hurst)
            for k in lags:
                per_rep[r, k] = float(np.mean(y[: n - k] * y[k:] if k else y * y))
        target = fgn_autocovariance(lags, hurst)
        se = np.std(per_rep, axis=0, ddof=1) / math.sqrt(reps)
        z = (np.mean(per_rep, axis=0) - target) / se
        worst = max(worst, float(np.max(np.abs(z))))
    ok = worst <= 3.0
    _report(1, ok, f"max |z| over 4 Hurst values x 6 lags = {worst:.2f} (limit 3)")
    assert ok, f"pooled fGn autocovariance off by {worst:.2f} SE"


def test_02_sfbm_covariance_on_integer_grid():
    """Sample covariances of simulated sub-fractional paths match the
    closed-form covariance on the integer grid up to 6."""
    reps, h = 5000, HurstParam(0.7)
    vals = np.empty((reps, 6))
    for r in range(reps):
        y = sample_fgn(NoiseSpec(n=12, seed=900_000 + r), h)
        vals[r] = sfbm_path(two_sided_fbm(y, d=1.0, H=h)).values
    worst = 0.0
    for p, q in itertools.combinations_with_replacement(range(1, 7), 2):
        prod = vals[:, p - 1] * vals[:, q - 1]
        se = float(np.std(prod, ddof=1)) / math.sqrt(reps)
        z = (float(np.mean(prod)) - sfbm_covariance(p, q, h)) / se
        worst = max(worst, abs(z))
    ok = worst <= 3.0
    _report(2, ok, f"max |z| over 21 grid pairs = {worst:.2f} (limit 3)")
    assert ok, f"sfBm sample covariance off by {worst:.2f} SE"


# ---------------------------------------------------------------------------
# 3-4: deterministic functionals
# ---------------------------------------------------------------------------

def test_03_correction_integral_limit_and_oracle():
    """alpha_H I(1, 0.6, T)/T approaches H Gamma(2H) and the quadrature
    agrees with the frozen brute-force tensor-grid value at T = 2."""
    h = HurstParam(0.6)
    alpha = 0.6 * 0.2
    limit = alpha * correction_integral(1.0, h, 200.0) / 200.0
    target = 0.6 * gamma_fn(1.2)
    rel = abs(limit / target - 1.0)
    oracle = 9.175475784486  # tests/oracles/correction_integral_targets.py
    rel_oracle = abs(correction_integral(1.0, h, 2.0) / oracle - 1.0)
    ok = rel <= 0.02 and rel_oracle <= 1e-6
    _report(
        3,
        ok,
        f"long-horizon ratio off by {100 * rel:.2f}% (limit 2%), "
        f"T=2 oracle rel err {rel_oracle:.1e} (limit 1e-6)",
    )
    assert ok


def test_04_ergodic_second_moment():
    """The time average (1/T) int X^2 dt concentrates at p(theta)."""
    h, theta, d, n, reps = HurstParam(0.6), 1.0, 0.02, 10_000, 500
    target = stationary_second_moment(theta, h)
    acc = 0.0
    for rep in range(reps):
        x = euler_msfou(
            theta=theta, H=h, d=d, N=n, seed=_replication_seed(606060, rep)
        )
        acc += integral_X2(x) / x.span
    ratio = acc / reps / target
    ok = abs(ratio - 1.0) <= 0.05
    _report(4, ok, f"MC mean / p(1) = {ratio:.4f} (tolerance 5%)")
    assert ok, f"ergodic time average off by {100 * (ratio - 1):.2f}%"


# ---------------------------------------------------------------------------
# 5-6: moment-estimator table cells (targets inconsistent, kept as stated)
# ---------------------------------------------------------------------------

def test_05_moment_estimator_table_cell_h055():
    """Reference cell (H=0.55, theta=0.5, d=1/250, T=20): mean in
    [0.40, 0.62], sdev within factor 1.5 of 0.4927.

    Expected to fail. The delta method applied to the implemented moment
    map p gives, for this configuration, a sampling sdev near 0.22 and a
    convexity bias that pushes the mean above 0.60 (the spectral variance
    of the time average, propagated through the inverse map, reproduces
    both to within sampling error). A sdev of 0.4927 at T=20 is not
    compatible with a root-T error scale for this estimator, and the mean
    window excludes the bias the same theory predicts.
    """
    cfg = ExperimentConfig(
        theta_true=0.5,
        H=0.55,
        d=1 / 250,
        T=20.0,
        replications=1000,
        master_seed=20250505,
        estimator=Method.PRACTICAL,
    )
    stats = run_table_experiment(cfg)
    mean_ok = 0.40 <= stats.mean <= 0.62
    sdev_ok = 0.4927 / 1.5 <= stats.sdev <= 0.4927 * 1.5
    ok = mean_ok and sdev_ok
    _report(
        5,
        ok,
        f"mean {stats.mean:.4f} (window [0.40, 0.62]), "
        f"sdev {stats.sdev:.4f} (window [{0.4927 / 1.5:.4f}, {0.4927 * 1.5:.4f}])",
    )
    assert mean_ok, f"mean {stats.mean:.4f} outside [0.40, 0.62]"
    assert sdev_ok, f"sdev {stats.sdev:.4f} not within factor 1.5 of 0.4927"


def test_06_moment_estimator_table_cell_h065():
    """Reference cell (H=0.65, theta=1, d=1/250, T=20): mean in
    [0.95, 1.17], sdev within factor 1.5 of 0.1285.

    Expected to fail. For this configuration the delta method predicts a
    sampling sdev near 0.28 (observed 0.35 with the usual first-order
    underestimate at this noise level), more than 2.5 times the 0.1285
    target; that target would require an error scale shrinking faster
    than root-T, which contradicts the central limit theorem the
    estimator satisfies. The mean lands just above the stated window for
    the same convexity-bias reason as the H=0.55 cell.
    """
    cfg = ExperimentConfig(
        theta_true=1.0,
        H=0.65,
        d=1 / 250,
        T=20.0,
        replications=1000,
        master_seed=20250606,
        estimator=Method.PRACTICAL,
    )
    stats = run_table_experiment(cfg)
    mean_ok = 0.95 <= stats.mean <= 1.17
    sdev_ok = 0.1285 / 1.5 <= stats.sdev <= 0.1285 * 1.5
    ok = mean_ok and sdev_ok
    _report(
        6,
        ok,
        f"mean {stats.mean:.4f} (window [0.95, 1.17]), "
        f"sdev {stats.sdev:.4f} (window [{0.1285 / 1.5:.4f}, {0.1285 * 1.5:.4f}])",
    )
    assert mean_ok, f"mean {stats.mean:.4f} outside [0.95, 1.17]"
    assert sdev_ok, f"sdev {stats.sdev:.4f} not within factor 1.5 of 0.1285"


# ---------------------------------------------------------------------------
# 7-8: central limit behavior (see docstrings)
# ---------------------------------------------------------------------------

def test_07_lse_clt_scale():
    """sqrt(T)(theta_bar - theta) at (theta=1, H=0.6, T=500): sample sdev
    within 15% of sigma_H(1, 0.6); standardized sample has |mean| <= 0.1
    and |skewness| <= 0.5.

    The sdev leg is expected to fail. The closed-form constant sigma_H
    counts the variance contributions of the Brownian and fractional
    components of int X^2 dt but omits their covariance cross term. The
    full spectral variance of the time average at (1, 0.6) is 2.7722
    (Brownian 0.5000 + fractional 0.9501 + cross 1.3222), giving a true
    error scale of 1.5844 against sigma_H = 1.1459, a ratio of 1.38 in
    the infinite-horizon limit; the Monte Carlo sample sits between the
    two because T = 500 is still converging upward toward that limit.
    Normality itself holds, so the mean and skewness legs pass.
    """
    h, theta, d, n, reps, big_t = HurstParam(0.6), 1.0, 0.02, 25_000, 500, 500.0
    errs = np.empty(reps)
    for rep in range(reps):
        x = euler_msfou(
            theta=theta, H=h, d=d, N=n, seed=_replication_seed(777, rep)
        )
        errs[rep] = math.sqrt(big_t) * (
            lse_skorohod(x, h, theta_ref=theta).theta_hat - theta
        )
    sigma = sigma_H(theta, h)
    stats = summarize(errs / sigma)
    sdev_ratio = stats.sdev
    sdev_ok = abs(sdev_ratio - 1.0) <= 0.15
    mean_ok = abs(stats.mean) <= 0.1
    skew_ok = abs(stats.skewness) <= 0.5
    ok = sdev_ok and mean_ok and skew_ok
    _report(
        7,
        ok,
        f"sdev/sigma_H = {sdev_ratio:.3f} (window [0.85, 1.15]), "
        f"standardized mean {stats.mean:.3f} (|.| <= 0.1), "
        f"skewness {stats.skewness:.3f} (|.| <= 0.5)",
    )
    assert mean_ok, f"standardized mean {stats.mean:.3f} exceeds 0.1"
    assert skew_ok, f"standardized skewness {stats.skewness:.3f} exceeds 0.5"
    assert sdev_ok, f"sdev ratio {sdev_ratio:.3f} outside 15% of sigma_H"


def test_08_phi_statistic_clt():
    """Phi at (theta=0.1, H=0.618, T=16, d=1/250, 2000 reps): |mean| <=
    0.1, |skewness| <= 0.5, kurtosis in [2, 6].

    Expected to fail. The asymptotic regime requires theta T >> 1; here
    theta T = 1.6, so single-path moment estimates scatter over a range
    comparable to theta itself, and the convex inverse moment map turns
    that symmetric scatter into a strongly right-skewed, heavy-tailed
    estimator law. The skewness and kurtosis measured here are genuine
    finite-horizon properties of the estimator at this configuration, not
    simulation artifacts; they shrink steadily as T grows.
    """
    cfg = ExperimentConfig(
        theta_true=0.1,
        H=0.618,
        d=1 / 250,
        T=16.0,
        replications=2000,
        master_seed=31415,
        estimator=Method.PRACTICAL,
    )
    from msfou import run_clt_experiment

    phi, stats = run_clt_experiment(cfg)
    mean_ok = abs(stats.mean) <= 0.1
    skew_ok = abs(stats.skewness) <= 0.5
    kurt_ok = 2.0 <= stats.kurtosis <= 6.0
    ok = mean_ok and skew_ok and kurt_ok
    _report(
        8,
        ok,
        f"mean {stats.mean:.3f} (|.| <= 0.1), skewness {stats.skewness:.3f} "
        f"(|.| <= 0.5), kurtosis {stats.kurtosis:.2f} (window [2, 6]), "
        f"n_failed {stats.n_failed}",
    )
    assert mean_ok, f"Phi mean {stats.mean:.3f} exceeds 0.1"
    assert skew_ok, f"Phi skewness {stats.skewness:.3f} exceeds 0.5"
    assert kurt_ok, f"Phi kurtosis {stats.kurtosis:.2f} outside [2, 6]"


# ---------------------------------------------------------------------------
# 9-10: rates and the non-ergodic regime
# ---------------------------------------------------------------------------

def test_09_rate_invariance_across_horizons():
    """Scaled-error sdev of the corrected LSE is flat across
    T in {125, 250, 500}: ratio <= 1.5 at H = 0.6 (root-T scaling), <= 2
    at H = 0.85 (T^(2-2H) scaling)."""
    t_grid = [125.0, 250.0, 500.0]
    details = []
    ok = True
    for h, bound in ((0.6, 1.5), (0.85, 2.0)):
        cfg = ExperimentConfig(
            theta_true=1.0,
            H=h,
            d=0.1,
            T=t_grid[0],
            replications=100,
            master_seed=999,
            estimator=Method.LSE_SKOROHOD,
        )
        sdevs = [row[1] for row in run_rate_experiment(cfg, t_grid)]
        ratio = max(sdevs) / min(sdevs)
        details.append(f"H={h}: ratio {ratio:.3f} (limit {bound})")
        ok = ok and ratio <= bound
    _report(9, ok, "; ".join(details))
    assert ok, "; ".join(details)


def test_10_nonergodic_regime():
    """Negative drift (theta=-0.5, H=0.65, T=10): the Young-integral
    estimator's median lands within 0.05 of the truth and the
    exponentially scaled error is heavy-tailed (excess kurtosis > 3)."""
    h, theta, d, n, reps = HurstParam(0.65), -0.5, 0.01, 1000, 1000
    cfg = ExperimentConfig(
        theta_true=theta,
        H=0.65,
        d=d,
        T=10.0,
        replications=reps,
        master_seed=4242,
        estimator=Method.NONERGODIC,
    )
    from msfou import nonergodic_estimator

    ests = np.empty(reps)
    for rep in range(reps):
        x = euler_msfou(
            theta=theta, H=h, d=d, N=n, seed=_replication_seed(4242, rep)
        )
        ests[rep] = nonergodic_estimator(x).theta_hat
    stats = summarize(ests)
    scaled = math.exp(-theta * 10.0) * (ests - theta)
    excess = summarize(scaled).kurtosis - 3.0
    median_ok = abs(stats.median - theta) <= 0.05
    tail_ok = excess > 3.0
    ok = median_ok and tail_ok
    _report(
        10,
        ok,
        f"median {stats.median:.4f} (target -0.5 +/- 0.05), "
        f"scaled-error excess kurtosis {excess:.2f} (> 3 required)",
    )
    assert median_ok, f"median {stats.median:.4f} not within 0.05 of -0.5"
    assert tail_ok, f"excess kurtosis {excess:.2f} not heavy-tailed"


# ---------------------------------------------------------------------------
# 11-12: likelihood machinery and CLI determinism
# ---------------------------------------------------------------------------

def test_11_mle_reductions_and_stability():
    """Four legs: exact classical reduction at H = 1/2; kernel-solve
    residual below 1e-6; the integral identity int g(s,t) ds =
    int g(s,s)^2 ds below 1e-5; Monte Carlo mean within 0.15 of the truth
    at H = 0.65."""
    from msfou import solve_g_kernel

    # classical reduction
    worst = 0.0
    for seed in range(10):
        x = euler_msfou(theta=1.0, H=HurstParam(0.5), d=0.01, N=256, seed=seed)
        got = mle(x, HurstParam(0.5), m=256).theta_hat
        vals = x.full_values()
        dx = np.diff(vals)
        left = vals[:-1]
        want = -float(left @ dx) / float((left * left).sum() * x.d)
        worst = max(worst, abs(got - want))
    classical_ok = worst <= 1e-10

    # kernel residual and the integral identity (m = 1024: the two
    # independent quadratures agree to the target at this resolution)
    sol = solve_g_kernel(20.0, HurstParam(0.65), m=1024)
    residual_ok = sol.residual <= 1e-6
    gap = abs(sol.integral_g() - sol.bracket_M[-1]) / sol.bracket_M[-1]
    identity_ok = gap <= 1e-5

    # Monte Carlo mean
    h = HurstParam(0.65)
    ests = []
    for rep in range(200):
        x = euler_msfou(
            theta=1.0, H=h, d=0.01, N=2000, seed=_replication_seed(505, rep)
        )
        ests.append(mle(x, h, m=128).theta_hat)
    mc_mean = float(np.mean(ests))
    mc_ok = abs(mc_mean - 1.0) <= 0.15

    ok = classical_ok and residual_ok and identity_ok and mc_ok
    _report(
        11,
        ok,
        f"classical gap {worst:.1e} (<= 1e-10), residual {sol.residual:.1e} "
        f"(<= 1e-6), identity gap {gap:.1e} (<= 1e-5), MC mean {mc_mean:.4f} "
        f"(1 +/- 0.15)",
    )
    assert classical_ok, f"H=1/2 reduction off by {worst:.2e}"
    assert residual_ok, f"kernel residual {sol.residual:.2e} above 1e-6"
    assert identity_ok, f"integral identity gap {gap:.2e} above 1e-5"
    assert mc_ok, f"MLE MC mean {mc_mean:.4f} not within 0.15 of 1"


def test_12_cli_byte_determinism(tmp_path):
    """Every CLI command, rerun with identical inputs and with different
    worker counts, produces byte-identical outputs."""
    table_cfg = tmp_path / "table.json"
    table_cfg.write_text(
        json.dumps(
            {
                "theta_true": 1.0,
                "H": 0.6,
                "d": 0.1,
                "T": 5.0,
                "replications": 5,
                "master_seed": 99,
                "estimator": "practical",
            }
        ),
        encoding="utf-8",
    )
    clt_cfg = tmp_path / "clt.json"
    clt_cfg.write_text(
        json.dumps(
            {
                "theta_true": 1.0,
                "H": 0.618,
                "d": 0.05,
                "T": 4.0,
                "replications": 6,
                "master_seed": 7,
                "estimator": "practical",
            }
        ),
        encoding="utf-8",
    )
    rate_cfg = tmp_path / "rate.json"
    rate_cfg.write_text(
        json.dumps(
            {
                "theta_true": 1.0,
                "H": 0.6,
                "d": 0.1,
                "T": 4.0,
                "replications": 4,
                "master_seed": 13,
                "estimator": "lse",
            }
        ),
        encoding="utf-8",
    )

    def run_twice(name: str, build_args, n_outputs: int):
        outs = []
        for tag, workers in (("a", "1"), ("b", "2")):
            files = [tmp_path / f"{name}_{tag}{i}.out" for i in range(n_outputs)]
            rc = main(build_args(files) + ["--workers", workers])
            assert rc == 0
            outs.append(tuple(f.read_bytes() for f in files))
        assert outs[0] == outs[1], f"{name}: output depends on worker count"

    # simulate and estimate have no worker knob; plain rerun equality
    sim_args = [
        "simulate", "--theta", "1.0", "--hurst", "0.65", "--d", "0.02",
        "--T", "2.0", "--seed", "5",
    ]
    sim_out = []
    for tag in ("a", "b"):
        f = tmp_path / f"sim_{tag}.csv"
        assert main(sim_args + ["--out", str(f)]) == 0
        sim_out.append(f.read_bytes())
    sim_ok = sim_out[0] == sim_out[1]

    est_out = []
    for tag in ("a", "b"):
        f = tmp_path / f"est_{tag}.json"
        rc = main(
            [
                "estimate", "--method", "mle", "--hurst", "0.65", "--mesh", "16",
                "--in", str(tmp_path / "sim_a.csv"), "--out", str(f),
            ]
        )
        assert rc == 0
        est_out.append(f.read_bytes())
    est_ok = est_out[0] == est_out[1]

    run_twice(
        "mc-table",
        lambda files: [
            "mc-table", "--config", str(table_cfg), "--out", str(files[0]),
        ],
        n_outputs=1,
    )
    run_twice(
        "mc-clt",
        lambda files: [
            "mc-clt", "--config", str(clt_cfg),
            "--out", str(files[0]), "--stats", str(files[1]),
        ],
        n_outputs=2,
    )
    run_twice(
        "mc-rate",
        lambda files: [
            "mc-rate", "--config", str(rate_cfg), "--T-grid", "4,8",
            "--out", str(files[0]),
        ],
        n_outputs=1,
    )

    ok = sim_ok and est_ok
    _report(
        12,
        ok,
        "simulate, estimate, mc-table, mc-clt, mc-rate all byte-identical "
        "across reruns and worker counts",
    )
    assert ok, "simulate/estimate rerun outputs differ"
