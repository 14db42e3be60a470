"""Write a synthetic trace file for ``vsloc localize``."""

import argparse

import numpy as np

from vsloc.cli import write_trace
from vsloc.model import AttackSpec, ChannelParams, generate_measurements, make_anchors


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("path")
    ap.add_argument("--anchors", type=int, default=7)
    ap.add_argument("--attackers", default="1,2", help="comma-separated anchor ids")
    ap.add_argument("--delta", type=float, default=8.0)
    ap.add_argument("--k", type=int, default=10)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    params = ChannelParams()
    anchors = make_anchors(rng.uniform(0, 25, (args.anchors, 2)))
    x = rng.uniform(0, 25, 2)
    ids = {int(v) for v in args.attackers.split(",") if v}
    attack = AttackSpec.uncoordinated(ids, args.delta) if ids else AttackSpec.none()
    meas = generate_measurements(x, anchors, params, attack, args.k, args.seed)
    write_trace(args.path, anchors, meas, params, target=x)


if __name__ == "__main__":
    main()
