import itertools
import math

import numpy as np
import pytest
from hypothesis import assume, given, strategies as st

from vsloc.geometry import (
    DegeneratePairError,
    GeometryError,
    Side,
    circle_intersection,
    distance_to_hyperplane,
    forge_intersections,
    halfspace_of,
    hyperplane,
    interest_points,
    projection_distances,
)
from vsloc.model import AttackSpec, ChannelParams, MeasurementSet, generate_measurements, make_anchors

from conftest import points, random_scene

radii = st.floats(min_value=0.1, max_value=40)


def _intersecting(ai, di, aj, dj):
    d = math.dist(ai, aj)
    return abs(di - dj) <= d <= di + dj


def test_symmetric_intersection():
    q1, q2 = circle_intersection((0, 0), 2.5, (4, 0), 2.5)
    got = sorted(map(tuple, np.round([q1, q2], 12)))
    assert got == [(2.0, -1.5), (2.0, 1.5)]


def test_separated_circles_do_not_intersect():
    assert circle_intersection((0, 0), 1, (10, 0), 1) is None


def test_coincident_centres_signalled():
    with pytest.raises(DegeneratePairError):
        circle_intersection((1, 1), 1, (1, 1), 2)
    with pytest.raises(DegeneratePairError):
        forge_intersections((1, 1), 1, (1, 1), 2)


def test_tangent_circles_intersect_once():
    q1, q2 = circle_intersection((0, 0), 2, (5, 0), 3)
    np.testing.assert_allclose(q1, (2, 0), atol=1e-12)
    np.testing.assert_allclose(q2, (2, 0), atol=1e-12)


@given(points, radii, points, radii)
def test_intersection_residual(ai, di, aj, dj):
    assume(math.dist(ai, aj) > 1e-3)
    sol = circle_intersection(ai, di, aj, dj)
    if sol is None:
        # rounding may hide an exact tangency; anything else must be disjoint
        d = math.dist(ai, aj)
        assert d >= di + dj - 1e-9 * (d + di + dj) or d <= abs(di - dj) + 1e-9 * (d + di + dj)
        return
    tol = 1e-9 * max(di, dj)
    for q in sol:
        assert abs(np.linalg.norm(q - np.array(ai)) - di) <= tol
        assert abs(np.linalg.norm(q - np.array(aj)) - dj) <= tol


@given(points, radii, points, radii)
def test_intersection_pair_order_symmetry(ai, di, aj, dj):
    assume(math.dist(ai, aj) > 1e-3)
    a, b = circle_intersection(ai, di, aj, dj), circle_intersection(aj, dj, ai, di)
    assert (a is None) == (b is None)
    if a is not None:
        a, b = np.array(a), np.array(b)
        # same unordered set; the branches may swap
        gap = min(np.abs(a - b).max(), np.abs(a - b[::-1]).max())
        assert gap <= 1e-12


def _line_circle_oracle(ai, di, aj, dj):
    # brute force: roots of |a0 + s u - c|^2 = r^2 by numpy.roots, + root first
    ai, aj = np.asarray(ai, float), np.asarray(aj, float)
    u = (ai - aj) / np.linalg.norm(ai - aj)
    a0 = (ai + aj) / 2
    roots = []
    for c, r in ((ai, di), (aj, dj)):
        w = a0 - c
        s = np.sort(np.roots([1.0, 2 * u @ w, w @ w - r * r]).real)[::-1]
        roots.append([a0 + si * u for si in s])
    return (roots[0][0] + roots[1][0]) / 2, (roots[0][1] + roots[1][1]) / 2


# outputs pinned from _line_circle_oracle
@pytest.mark.parametrize(
    "ai,di,aj,dj,expect",
    [
        ((0, 0), 1, (10, 0), 1, [(4, 0), (6, 0)]),
        ((0, 0), 5, (1, 0), 1, [(-2.5, 0), (3.5, 0)]),
        ((0, 0), 2, (10, 0), 4, [(2, 0), (8, 0)]),
    ],
)
def test_forged_examples(ai, di, aj, dj, expect):
    q1, q2 = forge_intersections(ai, di, aj, dj)
    np.testing.assert_allclose([q1, q2], expect, atol=1e-12)
    o1, o2 = _line_circle_oracle(ai, di, aj, dj)
    np.testing.assert_allclose([q1, q2], [o1, o2], atol=1e-9)


@given(points, radii, points, radii)
def test_forged_points_collinear_with_anchors(ai, di, aj, dj):
    assume(math.dist(ai, aj) > 1e-3)
    h = hyperplane(ai, aj)
    e = np.array([-h.b_hat[1], h.b_hat[0]])
    for q in forge_intersections(ai, di, aj, dj):
        assert abs(e @ (q - h.a0)) <= 1e-9 * (1 + di + dj)


@given(points, radii, points, radii)
def test_forged_matches_oracle(ai, di, aj, dj):
    assume(math.dist(ai, aj) > 1e-2)
    np.testing.assert_allclose(forge_intersections(ai, di, aj, dj), _line_circle_oracle(ai, di, aj, dj), atol=1e-7)


def test_hyperplane_examples():
    h = hyperplane((2, 0), (0, 0))
    np.testing.assert_allclose(h.a0, (1, 0))
    np.testing.assert_allclose(h.b_hat, (1, 0))
    h = hyperplane((0, 2), (0, 0))
    np.testing.assert_allclose(h.a0, (0, 1))
    np.testing.assert_allclose(h.b_hat, (0, 1))
    with pytest.raises(DegeneratePairError):
        hyperplane((3, 3), (3, 3))


@given(points, points)
def test_hyperplane_unit_normal_and_orientation(ai, aj):
    assume(math.dist(ai, aj) > 1e-6)
    h = hyperplane(ai, aj)
    assert abs(np.linalg.norm(h.b_hat) - 1) <= 1e-12
    assert h.b_hat @ (np.array(ai) - h.a0) == pytest.approx(math.dist(ai, aj) / 2, rel=1e-9)


def test_halfspace_examples():
    h = hyperplane((2, 0), (0, 0))
    assert halfspace_of((1.5, 7), h) is Side.UPPER
    assert halfspace_of((1, 99), h) is Side.ON
    assert halfspace_of((0.5, -3), h) is Side.LOWER


def test_distance_to_hyperplane_examples():
    h = hyperplane((2, 0), (0, 0))
    assert distance_to_hyperplane((1, 5), h) == 0
    assert distance_to_hyperplane((4, 9), h) == pytest.approx(3.0, abs=1e-12)


@given(points, points, points)
def test_distance_matches_line_search_oracle(ai, aj, p):
    assume(math.dist(ai, aj) > 1e-3)
    h = hyperplane(ai, aj)
    e = np.array([-h.b_hat[1], h.b_hat[0]])
    p = np.array(p)
    # coarse grid along the line, then a dense grid around the best sample
    t0 = e @ (p - h.a0)
    ts = np.linspace(t0 - 1.0, t0 + 1.0, 200_001)
    brute = np.min(np.hypot(*(h.a0[:, None] + e[:, None] * ts - p[:, None])))
    assert distance_to_hyperplane(p, h) == pytest.approx(brute, abs=1e-6)


@given(points, points, points)
def test_projection_form_equals_scalar_form(ai, aj, p):
    assume(math.dist(ai, aj) > 1e-6)
    h = hyperplane(ai, aj)
    assert abs(distance_to_hyperplane(p, h) - abs(h.b_hat @ (np.array(p) - h.a0))) <= 1e-12
    assert projection_distances([p], h)[0] == pytest.approx(distance_to_hyperplane(p, h), abs=1e-12)


@given(points, points, points)
def test_halfspace_partition(ai, aj, p):
    assume(math.dist(ai, aj) > 1e-6)
    h = hyperplane(ai, aj)
    side = halfspace_of(p, h)
    s = h.b_hat @ (np.array(p) - h.a0)
    if side is Side.UPPER:
        assert s > 0
    elif side is Side.LOWER:
        assert s < 0


def test_interest_point_count(rng):
    anchors, x, meas, _ = random_scene(rng, n=4)
    ips = interest_points(anchors, meas)
    assert len(ips) == 12
    assert ips.pair_ids == [(1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)]


def test_interest_points_need_three_anchors(rng):
    anchors, x, meas, params = random_scene(rng, n=2)
    with pytest.raises(GeometryError):
        interest_points(anchors, meas)


def test_noiseless_true_target_in_every_pair(rng):
    anchors, x, meas, _ = random_scene(rng, n=6, sigma=0.0)
    ips = interest_points(anchors, meas)
    for p in range(len(ips) // 2):
        pair = ips.points[2 * p : 2 * p + 2]
        assert np.min(np.linalg.norm(pair - x, axis=1)) < 1e-9
    assert not ips.forged.any()


def test_forged_flags_match_intersection_condition(rng):
    params = ChannelParams(sigma_db=1.0)
    for trial in range(20):
        anchors = make_anchors(rng.uniform(0, 25, (6, 2)))
        x = rng.uniform(0, 25, 2)
        meas = generate_measurements(x, anchors, params, AttackSpec.uncoordinated({2}, 15.0), 10, trial)
        ips = interest_points(anchors, meas)
        d = meas.dist_est_m
        for p, (i, j) in enumerate(itertools.combinations(range(6), 2)):
            expect = not _intersecting(anchors[i].pos, d[i], anchors[j].pos, d[j])
            assert ips.forged[2 * p] == ips.forged[2 * p + 1] == expect


def test_coincident_anchor_pair_filled_with_midpoint():
    params = ChannelParams()
    anchors = make_anchors([[0, 0], [0, 0], [10, 0], [0, 10]])
    meas = MeasurementSet.from_samples([1, 2, 3, 4], [[0.0], [1.0], [2.0], [3.0]], params)
    ips = interest_points(anchors, meas)
    np.testing.assert_array_equal(ips.points[:2], [[0, 0], [0, 0]])
    assert ips.forged[:2].all()
    assert len(ips) == 12


def test_substitution_residual_interest_points(rng):
    for _ in range(30):
        anchors, x, meas, _ = random_scene(rng, n=7, sigma=2.0)
        ips = interest_points(anchors, meas)
        pos = np.array([a.pos for a in anchors])
        for g in np.flatnonzero(~ips.forged):
            i, j = ips.pairs[g]
            di, dj = meas.dist_est_m[i], meas.dist_est_m[j]
            q = ips.points[g]
            assert abs(np.linalg.norm(q - pos[i]) - di) <= 1e-9 * max(di, dj)
            assert abs(np.linalg.norm(q - pos[j]) - dj) <= 1e-9 * max(di, dj)
