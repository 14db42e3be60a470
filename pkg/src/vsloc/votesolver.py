"""Half-space voting over interest points and the weighted-centroid estimate."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .geometry import (
    InterestPointSet,
    hyperplane,
    interest_points,
    pair_indices,
    projection_distances,
    upper_mask,
)
from .model import Anchor, ChannelParams, MeasurementSet, anchor_positions

VOTE_WEIGHTINGS = ("as-printed", "inverse-proximity")
INVERSE_PROXIMITY_EPS = 1e-9


def _pairwise(points: np.ndarray) -> np.ndarray:
    diff = points[:, None, :] - points[None, :, :]
    return np.sqrt((diff**2).sum(axis=-1))


def cluster_halfspace(points, target_size: int, dist: np.ndarray | None = None) -> np.ndarray:
    """Indices of ``target_size`` mutually close points.

    Every point seeds a candidate made of itself plus its nearest neighbours;
    the candidate with the smallest sum of pairwise distances wins, ties going
    to the lowest seed index.
    """
    if target_size < 1:
        raise ValueError("target_size must be >= 1")
    points = np.asarray(points, dtype=float).reshape(-1, 2)
    m = len(points)
    if m <= target_size:
        return np.arange(m)
    if dist is None:
        dist = _pairwise(points)
    ranked = dist.copy()
    np.fill_diagonal(ranked, -1.0)  # seed always ranks first in its own row
    sets = np.sort(np.argsort(ranked, axis=1, kind="stable")[:, :target_size], axis=1)
    scores = dist[sets[:, :, None], sets[:, None, :]].sum(axis=(1, 2))
    return sets[int(np.argmin(scores))]


def _shares(proj: np.ndarray, weighting: str) -> np.ndarray:
    if weighting == "inverse-proximity":
        inv = 1.0 / (INVERSE_PROXIMITY_EPS + proj)
        return inv / inv.sum()
    total = proj.sum()
    if total > 0:
        return proj / total
    return np.full(len(proj), 1.0 / len(proj))


@dataclass(frozen=True, eq=False)
class VoteLedger:
    """Votes per interest point plus each anchor pair's contribution row."""

    votes: np.ndarray
    contributions: np.ndarray
    w_upper: np.ndarray
    w_lower: np.ndarray
    upper_nonempty: np.ndarray
    lower_nonempty: np.ndarray
    clusters: tuple

    def pair_mass(self) -> np.ndarray:
        return self.contributions.sum(axis=1)


def compute_votes(
    ips: InterestPointSet,
    anchors: Sequence[Anchor],
    meas: MeasurementSet,
    weighting: str = "as-printed",
    full_clusters: bool = True,
) -> VoteLedger:
    """Accumulate every anchor pair's half-space votes.

    With ``full_clusters`` a half space holding fewer than N - 1 points forms
    no cluster and casts nothing; otherwise its points form an undersized
    cluster that takes the whole side weight.
    """
    if weighting not in VOTE_WEIGHTINGS:
        raise ValueError(f"unknown vote weighting {weighting!r}")
    n = len(anchors)
    pos = anchor_positions(anchors)
    d = meas.dist_est_m
    q = ips.points
    dist = _pairwise(q)
    pairs = pair_indices(n)
    contrib = np.zeros((len(pairs), len(q)))
    w_up = np.zeros(len(pairs))
    w_lo = np.zeros(len(pairs))
    up_ne = np.zeros(len(pairs), dtype=bool)
    lo_ne = np.zeros(len(pairs), dtype=bool)
    clusters = []
    for p, (i, j) in enumerate(pairs):
        if np.array_equal(pos[i], pos[j]):
            clusters.append((np.array([], dtype=int), np.array([], dtype=int)))
            continue
        h = hyperplane(pos[i], pos[j])
        up = upper_mask(q, h)
        proj = projection_distances(q, h)
        w_up[p] = d[j] / (d[i] + d[j])
        w_lo[p] = d[i] / (d[i] + d[j])
        chosen = []
        for mask, w in ((up, w_up[p]), (~up, w_lo[p])):
            idx = np.flatnonzero(mask)
            if idx.size == 0 or (full_clusters and idx.size < n - 1):
                chosen.append(idx[:0])
                continue
            sel = idx[cluster_halfspace(q[idx], n - 1, dist[np.ix_(idx, idx)])]
            contrib[p, sel] += w * _shares(proj[sel], weighting)
            chosen.append(sel)
        up_ne[p], lo_ne[p] = chosen[0].size > 0, chosen[1].size > 0
        clusters.append(tuple(chosen))
    votes = contrib.sum(axis=0)
    return VoteLedger(votes, contrib, w_up, w_lo, up_ne, lo_ne, tuple(clusters))


@dataclass(frozen=True, eq=False)
class LocalizationResult:
    estimate: np.ndarray
    top_indices: np.ndarray
    top_points: np.ndarray
    weights: np.ndarray
    degenerate: bool = False
    interest: InterestPointSet | None = None
    ledger: VoteLedger | None = None


def wcm_estimate(ips: InterestPointSet, ledger: VoteLedger, n_anchors: int) -> LocalizationResult:
    """Vote-weighted centroid of the ``n_anchors - 1`` best-voted points."""
    votes = ledger.votes
    if votes.size == 0:
        raise ValueError("empty vote ledger")
    if n_anchors < 3:
        raise ValueError("need at least 3 anchors")
    order = np.lexsort((np.arange(len(votes)), -votes))
    top = order[: n_anchors - 1]
    total = votes[top].sum()
    if not total > 0:
        pts = ips.points
        w = np.full(len(pts), 1.0 / len(pts))
        return LocalizationResult(w @ pts, np.arange(len(pts)), pts, w, True, ips, ledger)
    w = votes[top] / total
    pts = ips.points[top]
    return LocalizationResult(w @ pts, top, pts, w, False, ips, ledger)


def localize(
    anchors: Sequence[Anchor],
    meas: MeasurementSet,
    params: ChannelParams | None = None,
    weighting: str = "as-printed",
    full_clusters: bool = True,
) -> LocalizationResult:
    """Full voting-scheme localisation: interest points, votes, centroid.

    ``params`` is accepted for symmetry with the detector; range estimates
    already live in ``meas``.
    """
    ips = interest_points(anchors, meas)
    ledger = compute_votes(ips, anchors, meas, weighting, full_clusters)
    return wcm_estimate(ips, ledger, len(anchors))
