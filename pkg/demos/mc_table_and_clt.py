"""Desk-scale Monte Carlo: a table row, a CLT diagnostic and a rate check.

Three experiments, all seed-pinned and reproducible:

  1. a moment-estimator table row (mean / median / sdev over replications),
  2. the standardized-error sample of the moment estimator against its
     limiting standard normal (mean, skewness, kurtosis),
  3. the corrected least-squares estimator's scaled error across three
     time horizons, which is approximately flat when the convergence rate
     matches the Hurst regime.

Replication counts are kept small so the whole script runs in well under
a minute; the acceptance tests run the same experiments at full desk
scale.

Run:  python3 demos/mc_table_and_clt.py
"""

from msfou import (
    ExperimentConfig,
    Method,
    run_clt_experiment,
    run_rate_experiment,
    run_table_experiment,
    sigma_H,
)


def main() -> None:
    # -----------------------------------------------------------------------
    # table row: moment estimator at (theta = 1, H = 0.65)
    # -----------------------------------------------------------------------
    cfg = ExperimentConfig(
        theta_true=1.0,
        H=0.65,
        d=0.01,
        T=20.0,
        replications=200,
        master_seed=1001,
        estimator=Method.PRACTICAL,
    )
    stats = run_table_experiment(cfg)
    print("== moment-estimator table row ==")
    print(f"theta = {cfg.theta_true}, H = {cfg.H}, d = {cfg.d}, T = {cfg.T}, "
          f"replications = {cfg.replications}")
    print(f"mean {stats.mean:.4f}  median {stats.median:.4f}  "
          f"sdev {stats.sdev:.4f}  failed {stats.n_failed}")

    # -----------------------------------------------------------------------
    # standardized errors against the limiting normal
    # -----------------------------------------------------------------------
    clt_cfg = ExperimentConfig(
        theta_true=1.0,
        H=0.6,
        d=0.02,
        T=100.0,
        replications=300,
        master_seed=2002,
        estimator=Method.PRACTICAL,
    )
    phi, phi_stats = run_clt_experiment(clt_cfg)
    print()
    print("== standardized moment-estimator errors ==")
    print(f"theta T = {clt_cfg.theta_true * clt_cfg.T:.0f} "
          f"(the normal limit needs this large)")
    print(f"mean {phi_stats.mean:+.3f} (target 0), "
          f"sdev {phi_stats.sdev:.3f} (target 1), "
          f"skewness {phi_stats.skewness:+.3f} (target 0), "
          f"kurtosis {phi_stats.kurtosis:.2f} (target 3)")

    # -----------------------------------------------------------------------
    # rate check for the corrected least-squares estimator
    # -----------------------------------------------------------------------
    rate_cfg = ExperimentConfig(
        theta_true=1.0,
        H=0.6,
        d=0.1,
        T=125.0,
        replications=60,
        master_seed=3003,
        estimator=Method.LSE_SKOROHOD,
    )
    rows = run_rate_experiment(rate_cfg, t_grid=[125.0, 250.0, 500.0])
    print()
    print("== corrected LSE: sqrt(T)-scaled error across horizons ==")
    print(f"limit constant sigma_H(1, 0.6) = {sigma_H(1.0, rate_cfg.hurst):.4f} "
          "(counts the component variances, not their cross term; the "
          "simulated spread sits above it, see the acceptance notes)")
    for big_t, sdev, n_failed in rows:
        print(f"T = {big_t:5.0f}: scaled sdev {sdev:.4f}  failed {n_failed}")


if __name__ == "__main__":
    main()
