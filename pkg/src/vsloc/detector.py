"""Attack-intensity estimation and confidence-interval attacker labelling."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .model import Anchor, ChannelParams, DomainError, MeasurementSet, anchor_positions, noiseless_rss

# absorbs float round-off so that interval-edge values stay honest
EDGE_TOL_DB = 1e-9


@dataclass(frozen=True, eq=False)
class DetectionReport:
    delta_hat: np.ndarray
    sigma_hat: float
    p_hat: np.ndarray
    malicious: frozenset[int]
    honest: frozenset[int]

    def flagged(self, anchor_id: int) -> bool:
        return anchor_id in self.malicious


def _path_gain(x_hat, pos: np.ndarray, params: ChannelParams) -> np.ndarray:
    """10 gamma log10(|x_hat - a| / d0) per anchor row."""
    dist = np.hypot(pos[:, 0] - x_hat[0], pos[:, 1] - x_hat[1])
    if np.any(dist == 0):
        raise DomainError("location estimate coincides with an anchor")
    return 10.0 * params.gamma * np.log10(dist / params.d0_m)


def residuals(x_hat, anchors: Sequence[Anchor], samples: np.ndarray, params: ChannelParams) -> np.ndarray:
    """alpha_{i,k} = P_{i,k} - P0 + 10 gamma log10(|x_hat - a_i| / d0)."""
    samples = np.atleast_2d(np.asarray(samples, dtype=float))
    gain = _path_gain(np.asarray(x_hat, dtype=float), anchor_positions(anchors), params)
    return samples - params.p0_dbm + gain[:, None]


def estimate_attack_intensity(x_hat, a: Anchor, samples, params: ChannelParams) -> float:
    samples = np.asarray(samples, dtype=float).ravel()
    if samples.size == 0:
        raise ValueError("no samples")
    return float(residuals(x_hat, [a], samples[None, :], params).mean())


def estimate_noise_std(x_hat, anchors: Sequence[Anchor], meas: MeasurementSet, delta_hat, params: ChannelParams) -> float:
    """Mean over anchors of the Bessel-corrected std of alpha about delta_hat."""
    if meas.k < 2:
        raise ValueError("noise std needs at least 2 samples per anchor")
    alpha = residuals(x_hat, anchors, meas.samples, params)
    dev = alpha - np.asarray(delta_hat, dtype=float)[:, None]
    per_anchor = np.sqrt((dev**2).sum(axis=1) / (meas.k - 1))
    return float(per_anchor.mean())


def expected_rss(x_hat, a: Anchor, params: ChannelParams) -> float:
    return noiseless_rss(x_hat, a, params)


def detect(x_hat, anchors: Sequence[Anchor], meas: MeasurementSet, params: ChannelParams) -> DetectionReport:
    """Label anchor i malicious when its median RSS leaves [P_hat - s, P_hat + s]."""
    if tuple(a.id for a in anchors) != meas.ids:
        raise ValueError("measurement rows do not match anchor order")
    if meas.k < 2:
        raise ValueError("detection needs at least 2 samples per anchor")
    x_hat = np.asarray(x_hat, dtype=float)
    alpha = residuals(x_hat, anchors, meas.samples, params)
    delta_hat = alpha.mean(axis=1)
    sigma_hat = estimate_noise_std(x_hat, anchors, meas, delta_hat, params)
    p_hat = params.p0_dbm - _path_gain(x_hat, anchor_positions(anchors), params)
    med = meas.median_dbm
    slack = sigma_hat + EDGE_TOL_DB
    outside = (med < p_hat - slack) | (med > p_hat + slack)
    ids = np.array(meas.ids)
    malicious = frozenset(int(i) for i in ids[outside])
    return DetectionReport(delta_hat, sigma_hat, p_hat, malicious, frozenset(meas.ids) - malicious)
