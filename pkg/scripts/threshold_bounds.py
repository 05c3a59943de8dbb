"""Exact optimal last-tier threshold against the closed-form lower bound and its series form.

Two sweeps: rate floor tau0 at fixed R1, and R1 at fixed tau0.  Values in dB re 1 W.
"""

import argparse
from pathlib import Path

import numpy as np

from hetcoop.cli import load_config, write_rows
from hetcoop.model import mean_radius, threshold_from_radius, to_db
from hetcoop.optimizer import threshold_exact, threshold_lower_bound, threshold_lower_bound_two_tier_closed


def row(cfg, R1, tau0, M):
    T1 = threshold_from_radius(cfg.tiers[0], R1)
    te = threshold_exact(cfg, [T1], tau0=tau0)
    td = threshold_lower_bound(cfg, [T1], tau0=tau0)
    ta = threshold_lower_bound_two_tier_closed(cfg, T1, M=M, tau0=tau0)
    pico = cfg.tiers[1]
    return {"R1": R1, "tau0": tau0, "T2_exact_dB": to_db(te), "T2_bound_dB": to_db(td),
            "T2_series_dB": to_db(ta), "gap_dB": to_db(te) - to_db(td),
            "R2_exact": mean_radius(pico, te), "R2_bound": mean_radius(pico, td)}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--config")
    ap.add_argument("--out", default="results")
    ap.add_argument("--M", type=int, default=2)
    args = ap.parse_args()
    cfg, _ = load_config(args.config)

    vs_tau = [row(cfg, 500.0, t, args.M) for t in np.linspace(3.0, 5.0, 21)]
    vs_r1 = [row(cfg, r, 4.0, args.M) for r in np.linspace(200.0, 600.0, 21)]
    for r in vs_tau[::5]:
        print(f"tau0={r['tau0']:.2f}  exact={r['T2_exact_dB']:.2f} dB  bound={r['T2_bound_dB']:.2f} dB"
              f"  gap={r['gap_dB']:.3f} dB")

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "threshold_vs_tau0.csv", "w") as fh:
        write_rows(vs_tau, fh, "csv")
    with open(out / "threshold_vs_R1.csv", "w") as fh:
        write_rows(vs_r1, fh, "csv")


if __name__ == "__main__":
    main()
