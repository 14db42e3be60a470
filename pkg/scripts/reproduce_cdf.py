"""LE distribution for the 7-anchor uncoordinated scenario at a few intensities.

    python3 scripts/reproduce_cdf.py --out results/cdf --deltas 1,4,7,10
"""

import argparse

from vsloc import simharness as sh
from vsloc.cli import run_sweep


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default="results/cdf")
    ap.add_argument("--deltas", default="1,4,7,10")
    ap.add_argument("--deployments", type=int, default=100)
    ap.add_argument("--draws", type=int, default=10)
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    cfg = sh.ScenarioConfig(n_anchors=7, n_malicious=2, sigma_db=1.0, n_deployments=args.deployments,
                            n_attacker_draws=args.draws, seed=args.seed)
    deltas = [float(v) for v in args.deltas.split(",")]
    summary = run_sweep(cfg, deltas, args.out, threads=args.threads)
    for d in deltas:
        cdf = summary[d]["cdf"]
        med = next(le for le, f in cdf if f >= 0.5)
        print(f"delta {d:g} dB: median LE {med:.3f} m, RMSE {summary[d]['rmse']:.3f} m")
    print(f"wrote le_cdf_*.csv under {args.out}")


if __name__ == "__main__":
    main()
