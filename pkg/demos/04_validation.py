"""Cross-validate the closed-form models against Monte-Carlo measurement
and trace-tool replays.

Each sweep point simulates `blocks' transmission units with a fresh
deterministic seed, compares measured efficiency/delay to the analytic
values, and the report only passes if every point is inside tolerance.
A couple of points are additionally replayed through the trace tool as
an independent spot check of the simulator.

Run:  python3 demos/04_validation.py
"""

from burstlink import FecConfig, HarqConfig
from burstlink.validation import (
    SweepSpec,
    validate_scheme,
    validation_summary,
)

BETAS = (0.1, 0.5, 0.8, 0.95)

for scheme, cfg in (
    ("fec", FecConfig(10, 12, rtt=0.5, t_p=1e-3)),
    ("harq2", HarqConfig(5, 7, rtt=0.5, t_p=1e-3)),
):
    spec = SweepSpec(
        scheme=scheme,
        config=cfg,
        alpha=0.99,
        betas=BETAS,
        blocks=60_000,
        seed=1729,
        spot_points=2,
        spot_blocks=50_000,
    )
    report = validate_scheme(spec, tol_eta=0.02, tol_delay=0.05)

    print(f"=== {scheme} ===")
    print(f"{'beta':>6s} {'p':>7s} {'eta_model':>10s} {'eta_meas':>10s} "
          f"{'delay_model':>12s} {'delay_meas':>11s} {'err_eta':>8s} "
          f"{'err_d':>7s}")
    for row in report.rows:
        print(f"{row['beta']:6.2f} {row['p']:7.4f} "
              f"{row['eta_analytic']:10.5f} {row['eta_measured']:10.5f} "
              f"{row['delay_analytic']:12.5f} {row['delay_measured']:11.5f} "
              f"{row['rel_err_eta']:8.5f} {row['rel_err_delay']:7.4f}")
    for check in report.spot_checks:
        print(f"  trace spot check at beta={check['beta']}: "
              f"agrees={check['agrees']}")
    print(validation_summary(report))
    print()
