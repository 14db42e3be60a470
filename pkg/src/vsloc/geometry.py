"""Circle intersections, forged intersections and anchor-pair hyperplanes."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .model import Anchor, MeasurementSet, anchor_positions

_ROT90 = np.array([[0.0, -1.0], [1.0, 0.0]])


class GeometryError(ValueError):
    pass


class DegeneratePairError(GeometryError):
    """Two anchors share a position; the pair defines no line or circle pair."""


class Side(enum.Enum):
    UPPER = "upper"
    LOWER = "lower"
    ON = "on"


@dataclass(frozen=True)
class Hyperplane:
    """The perpendicular bisector of an anchor pair.

    ``b_hat`` is the unit normal pointing from a_j toward a_i and ``a0`` the
    pair midpoint, so anchor i lies in the upper half space.
    """

    b_hat: np.ndarray
    a0: np.ndarray

    def offset(self, p) -> np.ndarray:
        """Signed normal offset b_hat . (p - a0); works on (2,) or (M, 2)."""
        return (np.asarray(p, dtype=float) - self.a0) @ self.b_hat


def _as_point(p) -> np.ndarray:
    return np.asarray(p, dtype=float).reshape(2)


def hyperplane(a_i, a_j) -> Hyperplane:
    a_i, a_j = _as_point(a_i), _as_point(a_j)
    diff = a_i - a_j
    norm = np.hypot(diff[0], diff[1])
    if norm == 0:
        raise DegeneratePairError("coincident anchors define no hyperplane")
    return Hyperplane(diff / norm, (a_i + a_j) / 2.0)


def tie_tolerance(p) -> float:
    p = _as_point(p)
    return 1e-12 * (1.0 + float(np.hypot(p[0], p[1])))


def halfspace_of(p, h: Hyperplane) -> Side:
    s = float(h.offset(_as_point(p)))
    if abs(s) <= tie_tolerance(p):
        return Side.ON
    return Side.UPPER if s > 0 else Side.LOWER


def upper_mask(points: np.ndarray, h: Hyperplane) -> np.ndarray:
    """Vectorised half-space split; points on the hyperplane count as upper."""
    points = np.asarray(points, dtype=float).reshape(-1, 2)
    s = h.offset(points)
    tol = 1e-12 * (1.0 + np.hypot(points[:, 0], points[:, 1]))
    return s >= -tol


def distance_to_hyperplane(p, h: Hyperplane) -> float:
    """Distance from ``p`` to its orthogonal projection on ``h``.

    Projection onto the line through a0 spanned by e = T b_hat:
    e e^T p + (I - e e^T) a0.
    """
    p = _as_point(p)
    e = _ROT90 @ h.b_hat
    ee = np.outer(e, e)
    foot = ee @ p + (np.eye(2) - ee) @ h.a0
    return float(np.linalg.norm(p - foot))


def circle_intersection(a_i, d_i: float, a_j, d_j: float):
    """Both intersection points of two range circles, or ``None`` if disjoint.

    Tangent circles (u == 0) return the touching point twice.
    """
    a_i, a_j = _as_point(a_i), _as_point(a_j)
    diff = a_j - a_i
    dd = float(diff @ diff)
    if dd == 0:
        raise DegeneratePairError("coincident circle centres")
    u = ((d_i + d_j) ** 2 - dd) * (dd - (d_j - d_i) ** 2)
    if u < 0:
        return None
    q0 = diff * (d_i**2 - d_j**2) / (2.0 * dd) + (a_i + a_j) / 2.0
    t = np.sqrt(u) / (2.0 * dd) * (_ROT90 @ diff)
    return q0 + t, q0 - t


def line_circle_roots(a_i, d_i: float, a_j, d_j: float):
    """Intersections of the line through both anchors with each circle.

    Returns ``(q_i1, q_i2, q_j1, q_j2)``; the ``1`` roots lie further along
    b_hat than the ``2`` roots.
    """
    h = hyperplane(a_i, a_j)
    a_i, a_j = _as_point(a_i), _as_point(a_j)
    roots = []
    for c, r in ((a_i, d_i), (a_j, d_j)):
        rel = c - h.a0
        proj = float(rel @ h.b_hat)
        # rel is parallel to b_hat, so the discriminant reduces to r**2 >= 0
        disc = max(proj**2 - (float(rel @ rel) - r**2), 0.0)
        s = np.sqrt(disc)
        roots.append(h.a0 + (proj + s) * h.b_hat)
        roots.append(h.a0 + (proj - s) * h.b_hat)
    return tuple(roots)


def forge_intersections(a_i, d_i: float, a_j, d_j: float):
    """Substitute interest points for a pair of non-intersecting circles."""
    q_i1, q_i2, q_j1, q_j2 = line_circle_roots(a_i, d_i, a_j, d_j)
    return (q_i1 + q_j1) / 2.0, (q_i2 + q_j2) / 2.0


@dataclass(frozen=True, eq=False)
class InterestPointSet:
    """All candidate target positions, two per anchor pair.

    Row ``2*p`` holds q' and row ``2*p + 1`` holds q'' of the ``p``-th pair in
    lexicographic (i < j) order; ``pairs`` stores anchor row indices.
    """

    points: np.ndarray
    pairs: np.ndarray
    forged: np.ndarray
    ids: tuple[int, ...]

    def __len__(self) -> int:
        return self.points.shape[0]

    @property
    def pair_ids(self) -> list[tuple[int, int]]:
        return [(self.ids[i], self.ids[j]) for i, j in self.pairs[::2]]

    def branch(self, g: int) -> str:
        return "plus" if g % 2 == 0 else "minus"


def pair_indices(n: int) -> list[tuple[int, int]]:
    return [(i, j) for i in range(n - 1) for j in range(i + 1, n)]


def interest_points(anchors: Sequence[Anchor], meas: MeasurementSet) -> InterestPointSet:
    n = len(anchors)
    if n < 3:
        raise GeometryError(f"voting needs at least 3 anchors, got {n}")
    if tuple(a.id for a in anchors) != meas.ids:
        raise GeometryError("measurement rows do not match anchor order")
    pos = anchor_positions(anchors)
    d = meas.dist_est_m
    pairs = pair_indices(n)
    pts = np.empty((2 * len(pairs), 2))
    forged = np.zeros(2 * len(pairs), dtype=bool)
    pair_rows = np.empty((2 * len(pairs), 2), dtype=int)
    for p, (i, j) in enumerate(pairs):
        pair_rows[2 * p : 2 * p + 2] = (i, j)
        if np.array_equal(pos[i], pos[j]):
            pts[2 * p] = pts[2 * p + 1] = pos[i]
            forged[2 * p : 2 * p + 2] = True
            continue
        sol = circle_intersection(pos[i], d[i], pos[j], d[j])
        if sol is None:
            sol = forge_intersections(pos[i], d[i], pos[j], d[j])
            forged[2 * p : 2 * p + 2] = True
        pts[2 * p], pts[2 * p + 1] = sol
    for arr in (pts, forged, pair_rows):
        arr.flags.writeable = False
    return InterestPointSet(pts, pair_rows, forged, meas.ids)


def projection_distances(points, h: Hyperplane) -> np.ndarray:
    """Vectorised :func:`distance_to_hyperplane` over an (M, 2) array."""
    points = np.asarray(points, dtype=float).reshape(-1, 2)
    e = _ROT90 @ h.b_hat
    ee = np.outer(e, e)
    feet = points @ ee.T + (np.eye(2) - ee) @ h.a0
    return np.linalg.norm(points - feet, axis=1)
