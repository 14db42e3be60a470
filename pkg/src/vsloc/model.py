"""Log-distance RSS measurement model with honest and spoofing anchors."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

SeedLike = Union[int, Sequence[int]]


class DomainError(ValueError):
    """Raised when a model formula is evaluated outside its domain."""


@dataclass(frozen=True)
class ChannelParams:
    p0_dbm: float = 15.0
    gamma: float = 3.0
    d0_m: float = 1.0
    sigma_db: float = 1.0

    def __post_init__(self):
        if not self.gamma > 0:
            raise ValueError(f"gamma must be > 0, got {self.gamma}")
        if not self.d0_m > 0:
            raise ValueError(f"d0_m must be > 0, got {self.d0_m}")
        if not self.sigma_db >= 0:
            raise ValueError(f"sigma_db must be >= 0, got {self.sigma_db}")


@dataclass(frozen=True)
class Anchor:
    id: int
    pos: tuple[float, float]

    def __post_init__(self):
        object.__setattr__(self, "pos", (float(self.pos[0]), float(self.pos[1])))


def make_anchors(positions) -> list[Anchor]:
    """Anchors with ids 1..N from an (N, 2) array of positions."""
    return [Anchor(i + 1, tuple(p)) for i, p in enumerate(np.asarray(positions, dtype=float))]


def anchor_positions(anchors: Sequence[Anchor]) -> np.ndarray:
    return np.array([a.pos for a in anchors], dtype=float).reshape(-1, 2)


@dataclass(frozen=True)
class AttackSpec:
    """Which anchors lie, and how.

    ``kind`` is ``"none"``, ``"uncoordinated"`` (every malicious anchor adds
    ``delta_db`` to its RSS) or ``"coordinated"`` (malicious anchors report
    RSS consistent with a target sitting at ``x_att``).
    """

    kind: str = "none"
    malicious_ids: frozenset[int] = frozenset()
    delta_db: float = 0.0
    x_att: tuple[float, float] | None = None

    def __post_init__(self):
        object.__setattr__(self, "malicious_ids", frozenset(int(i) for i in self.malicious_ids))
        if self.kind not in ("none", "uncoordinated", "coordinated"):
            raise ValueError(f"unknown attack kind {self.kind!r}")
        if self.kind == "coordinated" and self.x_att is None:
            raise ValueError("coordinated attack needs x_att")

    @classmethod
    def none(cls) -> AttackSpec:
        return cls()

    @classmethod
    def uncoordinated(cls, malicious_ids, delta_db: float) -> AttackSpec:
        return cls("uncoordinated", frozenset(malicious_ids), float(delta_db))

    @classmethod
    def coordinated(cls, malicious_ids, x_att) -> AttackSpec:
        return cls("coordinated", frozenset(malicious_ids), 0.0, (float(x_att[0]), float(x_att[1])))

    def true_offsets(self, x, anchors: Sequence[Anchor], params: ChannelParams) -> np.ndarray:
        """Per-anchor attack intensity (dB) this attack induces at target ``x``."""
        out = np.zeros(len(anchors))
        for n, a in enumerate(anchors):
            if a.id not in self.malicious_ids:
                continue
            if self.kind == "uncoordinated":
                out[n] = self.delta_db
            elif self.kind == "coordinated":
                out[n] = noiseless_rss(self.x_att, a, params) - noiseless_rss(x, a, params)
        return out


def _readonly(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, dtype=float)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class MeasurementSet:
    """K RSS samples per anchor, with medians and range estimates.

    Rows of ``samples`` follow the order of ``ids``.
    """

    ids: tuple[int, ...]
    samples: np.ndarray
    median_dbm: np.ndarray = field(repr=False)
    dist_est_m: np.ndarray = field(repr=False)

    @classmethod
    def from_samples(cls, ids, samples, params: ChannelParams) -> MeasurementSet:
        samples = np.asarray(samples, dtype=float)
        if samples.ndim != 2 or samples.shape[1] < 1:
            raise ValueError(f"samples must have shape (N, K) with K >= 1, got {samples.shape}")
        ids = tuple(int(i) for i in ids)
        if len(ids) != samples.shape[0]:
            raise ValueError("one sample row per anchor id required")
        # np.median averages the two middle order statistics for even K
        med = np.median(samples, axis=1)
        return cls(ids, _readonly(samples), _readonly(med), _readonly(estimate_distance(med, params)))

    @property
    def k(self) -> int:
        return self.samples.shape[1]

    def __len__(self) -> int:
        return len(self.ids)

    def __eq__(self, other):
        if not isinstance(other, MeasurementSet):
            return NotImplemented
        return self.ids == other.ids and np.array_equal(self.samples, other.samples)


def noiseless_rss(x, a: Anchor, params: ChannelParams) -> float:
    pos = a.pos if isinstance(a, Anchor) else a
    d = math.hypot(x[0] - pos[0], x[1] - pos[1])
    if d == 0:
        raise DomainError("target coincides with anchor; path loss undefined")
    return params.p0_dbm - 10.0 * params.gamma * math.log10(d / params.d0_m)


def estimate_distance(median_dbm, params: ChannelParams):
    """Invert the path-loss law: d0 * 10^((P0 - P) / (10 gamma))."""
    return params.d0_m * np.power(10.0, (params.p0_dbm - np.asarray(median_dbm, dtype=float)) / (10.0 * params.gamma))


def coordinated_attack_point(x, delta: float, theta: float) -> np.ndarray:
    if delta < 0:
        raise ValueError("delta must be >= 0")
    return np.array([x[0] + delta * math.cos(theta), x[1] + delta * math.sin(theta)])


def noise_streams(seed: SeedLike, n_links: int) -> list[np.random.Generator]:
    """One independent generator per link, keyed by ``seed``."""
    entropy = [seed] if isinstance(seed, (int, np.integer)) else list(seed)
    ss = np.random.SeedSequence([int(e) for e in entropy])
    return [np.random.default_rng(child) for child in ss.spawn(n_links)]


def _noisy_rows(base: np.ndarray, params: ChannelParams, k_samples: int, seed: SeedLike) -> np.ndarray:
    if k_samples < 1:
        raise ValueError(f"k_samples must be >= 1, got {k_samples}")
    rows = np.empty((len(base), k_samples))
    for n, rng in enumerate(noise_streams(seed, len(base))):
        rows[n] = base[n] + params.sigma_db * rng.standard_normal(k_samples)
    return rows


def generate_measurements(
    x,
    anchors: Sequence[Anchor],
    params: ChannelParams,
    attack: AttackSpec,
    k_samples: int,
    seed: SeedLike,
) -> MeasurementSet:
    if not anchors:
        raise ValueError("anchor list is empty")
    base = np.empty(len(anchors))
    for n, a in enumerate(anchors):
        if attack.kind == "coordinated" and a.id in attack.malicious_ids:
            base[n] = noiseless_rss(attack.x_att, a, params)
        else:
            base[n] = noiseless_rss(x, a, params)
            if attack.kind == "uncoordinated" and a.id in attack.malicious_ids:
                base[n] += attack.delta_db
    rows = _noisy_rows(base, params, k_samples, seed)
    return MeasurementSet.from_samples([a.id for a in anchors], rows, params)


def generate_with_offsets(x, anchors: Sequence[Anchor], params: ChannelParams, offsets_db, k_samples: int, seed: SeedLike) -> MeasurementSet:
    """General model: anchor n reports noiseless RSS plus ``offsets_db[n]`` plus noise.

    Uses the same noise streams as :func:`generate_measurements` for a given seed.
    """
    if not anchors:
        raise ValueError("anchor list is empty")
    offsets_db = np.asarray(offsets_db, dtype=float)
    base = np.array([noiseless_rss(x, a, params) for a in anchors]) + offsets_db
    rows = _noisy_rows(base, params, k_samples, seed)
    return MeasurementSet.from_samples([a.id for a in anchors], rows, params)
