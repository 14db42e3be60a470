"""Fast built-in invariant checks behind ``vsloc selftest``."""

from __future__ import annotations

import math
import sys

import numpy as np

from .detector import detect
from .geometry import circle_intersection, distance_to_hyperplane, forge_intersections, hyperplane, interest_points
from .model import AttackSpec, ChannelParams, estimate_distance, generate_measurements, make_anchors, noiseless_rss
from .votesolver import compute_votes, localize


def _round_trip(rng):
    p = ChannelParams()
    a = make_anchors([[0.0, 0.0]])[0]
    for _ in range(500):
        x = rng.uniform(-50, 50, 2)
        d = math.hypot(*x)
        if abs(estimate_distance(noiseless_rss(x, a, p), p) - d) > 1e-9 * d:
            return False
    return True


def _intersections(rng):
    for _ in range(2000):
        ai, aj = rng.uniform(0, 25, (2, 2))
        di, dj = rng.uniform(0.1, 30, 2)
        sol = circle_intersection(ai, di, aj, dj)
        scale = max(di, dj)
        if sol is None:
            h = hyperplane(ai, aj)
            e = np.array([-h.b_hat[1], h.b_hat[0]])
            if any(abs(e @ (q - h.a0)) > 1e-9 * (1 + scale) for q in forge_intersections(ai, di, aj, dj)):
                return False
            continue
        for q in sol:
            if abs(np.linalg.norm(q - ai) - di) > 1e-9 * scale or abs(np.linalg.norm(q - aj) - dj) > 1e-9 * scale:
                return False
    return True


def _projection(rng):
    for _ in range(2000):
        ai, aj, p = rng.uniform(-25, 25, (3, 2))
        h = hyperplane(ai, aj)
        if abs(distance_to_hyperplane(p, h) - abs(h.b_hat @ (p - h.a0))) > 1e-12:
            return False
    return True


def _scene(rng, n, sigma):
    params = ChannelParams(sigma_db=sigma)
    anchors = make_anchors(rng.uniform(0, 25, (n, 2)))
    x = rng.uniform(0, 25, 2)
    meas = generate_measurements(x, anchors, params, AttackSpec.none(), 10, int(rng.integers(2**31)))
    return anchors, x, meas, params


def _noiseless(rng):
    les = []
    for _ in range(20):
        anchors, x, meas, params = _scene(rng, int(rng.integers(4, 9)), 0.0)
        est = localize(anchors, meas, params).estimate
        les.append(np.linalg.norm(est - x))
        rep = detect(est, anchors, meas, params)
        if np.max(np.abs(rep.delta_hat)) > 1e-6 or rep.malicious:
            return False
    return float(np.median(les)) < 0.1


def _vote_mass(rng):
    for _ in range(30):
        anchors, x, meas, params = _scene(rng, int(rng.integers(4, 9)), 2.0)
        ips = interest_points(anchors, meas)
        ledger = compute_votes(ips, anchors, meas)
        expect = ledger.w_upper * ledger.upper_nonempty + ledger.w_lower * ledger.lower_nonempty
        if np.max(np.abs(ledger.pair_mass() - expect)) > 1e-12 or np.any(ledger.votes < 0):
            return False
    return True


def _translation(rng):
    for _ in range(20):
        anchors, x, meas, params = _scene(rng, 6, 1.0)
        shift = rng.uniform(-100, 100, 2)
        moved = make_anchors([np.add(a.pos, shift) for a in anchors])
        e0 = localize(anchors, meas, params).estimate
        e1 = localize(moved, meas, params).estimate
        if np.max(np.abs(e1 - e0 - shift)) > 1e-9:
            return False
    return True


def _determinism(rng):
    anchors, x, _, params = _scene(rng, 6, 1.0)
    att = AttackSpec.uncoordinated({2}, 5.0)
    return generate_measurements(x, anchors, params, att, 10, 7) == generate_measurements(x, anchors, params, att, 10, 7)


CHECKS = [
    ("distance round trip", _round_trip),
    ("circle/forged intersection residuals", _intersections),
    ("projection distance forms agree", _projection),
    ("noiseless exactness", _noiseless),
    ("per-pair vote mass conservation", _vote_mass),
    ("translation equivariance", _translation),
    ("measurement determinism", _determinism),
]


def run_selftest(seed: int = 0, stream=None) -> bool:
    stream = stream or sys.stdout
    rng = np.random.default_rng(seed)
    ok = True
    for name, check in CHECKS:
        try:
            passed = bool(check(rng))
        except Exception as exc:  # a crashing check is a failing check
            print(f"FAIL {name}: {type(exc).__name__}: {exc}", file=stream)
            ok = False
            continue
        print(f"{'PASS' if passed else 'FAIL'} {name}", file=stream)
        ok &= passed
    return ok
