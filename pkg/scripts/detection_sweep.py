"""CDR/FAR and intensity-estimate error against attack intensity.

    python3 scripts/detection_sweep.py --kind coordinated --deltas 0:15:3
"""

import argparse

from vsloc import simharness as sh
from vsloc.cli import parse_deltas, run_sweep


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--kind", choices=("uncoordinated", "coordinated"), default="uncoordinated")
    ap.add_argument("--deltas", default="0:15:3")
    ap.add_argument("--sigma", type=float, default=None, help="defaults to 1 dB uncoordinated, 3 dB coordinated")
    ap.add_argument("--deployments", type=int, default=50)
    ap.add_argument("--draws", type=int, default=10)
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--out", default="results/detection")
    args = ap.parse_args()

    sigma = args.sigma if args.sigma is not None else (1.0 if args.kind == "uncoordinated" else 3.0)
    cfg = sh.ScenarioConfig(n_anchors=7, n_malicious=2, attack_kind=args.kind, sigma_db=sigma,
                            n_deployments=args.deployments, n_attacker_draws=args.draws)
    summary = run_sweep(cfg, parse_deltas(args.deltas), args.out, threads=args.threads)
    print(f"{'delta':>6} {'delta/sigma':>11} {'CDR':>6} {'FAR':>6} {'ARMSE':>7} {'RMSE':>6}")
    for d, s in summary.items():
        cdr = "-" if s["cdr"] is None else f"{s['cdr']:.3f}"
        print(f"{d:6g} {d / sigma:11.2f} {cdr:>6} {s['far']:6.3f} {s['armse_delta']:7.3f} {s['rmse']:6.3f}")


if __name__ == "__main__":
    main()
