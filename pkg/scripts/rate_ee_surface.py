"""Spatial average rate, cluster power and energy efficiency over a radius grid.

Writes the full (R1, R2) surface plus one row per R1 giving the EE-maximising R2.
"""

import argparse
from pathlib import Path

import numpy as np

from hetcoop.analytic import cluster_power, spatial_average_rate
from hetcoop.cli import load_config, write_rows
from hetcoop.model import ThresholdVector


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--config")
    ap.add_argument("--out", default="results")
    ap.add_argument("--r1", default="200:700:6", help="MIN:MAX:STEPS for the macro radius (m)")
    ap.add_argument("--r2", default="20:400:77", help="MIN:MAX:STEPS for the pico radius (m)")
    args = ap.parse_args()

    cfg, _ = load_config(args.config)
    span = lambda s: np.linspace(*(float(x) for x in s.split(":")[:2]), int(s.split(":")[2]))
    rows, best = [], []
    for R1 in span(args.r1):
        block = []
        for R2 in span(args.r2):
            T = ThresholdVector.from_radii(cfg, (R1, R2))
            tau, P = spatial_average_rate(cfg, T), cluster_power(cfg, T)
            block.append({"R1": R1, "R2": R2, "tau": tau, "P_cl": P, "EE": tau / P})
        rows += block
        top = max(block, key=lambda r: r["EE"])
        best.append({"R1": R1, "R2_star": top["R2"], "EE_max": top["EE"], "tau_at_star": top["tau"]})
        print(f"R1={R1:6.0f} m  R2*={top['R2']:6.1f} m  EE={top['EE']:.5f}")

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "rate_ee_surface.csv", "w") as fh:
        write_rows(rows, fh, "csv")
    with open(out / "ee_optimum.csv", "w") as fh:
        write_rows(best, fh, "csv")


if __name__ == "__main__":
    main()
