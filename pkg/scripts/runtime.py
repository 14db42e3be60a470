"""Wall time of one localize call as the anchor count grows."""

import argparse
import statistics
import time

import numpy as np

from vsloc.model import AttackSpec, ChannelParams, generate_measurements, make_anchors
from vsloc.votesolver import localize


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--max-anchors", type=int, default=12)
    ap.add_argument("--calls", type=int, default=100)
    args = ap.parse_args()

    rng = np.random.default_rng(0)
    params = ChannelParams()
    for n in range(3, args.max_anchors + 1):
        anchors = make_anchors(rng.uniform(0, 25, (n, 2)))
        x = rng.uniform(0, 25, 2)
        meas = generate_measurements(x, anchors, params, AttackSpec.uncoordinated({1}, 6.0), 10, n)
        times = []
        for _ in range(args.calls):
            t0 = time.perf_counter()
            localize(anchors, meas, params)
            times.append(1000 * (time.perf_counter() - t0))
        print(f"N={n:2d}  median {statistics.median(times):7.2f} ms  max {max(times):7.2f} ms")


if __name__ == "__main__":
    main()
