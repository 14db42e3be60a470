"""Randomised deployments, Monte Carlo campaigns and the evaluation metrics."""

from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .detector import detect
from .model import (
    AttackSpec,
    ChannelParams,
    coordinated_attack_point,
    generate_measurements,
    make_anchors,
)
from .votesolver import VOTE_WEIGHTINGS, localize

ATTACK_KINDS = ("none", "uncoordinated", "coordinated")
MIN_TARGET_ANCHOR_M = 0.1

# stream tags, so deployments, attacker draws and noise never share a generator
_DEPLOY, _ATTACKERS, _NOISE = 0, 1, 2


@dataclass(frozen=True)
class ScenarioConfig:
    n_anchors: int = 7
    n_malicious: int = 2
    attack_kind: str = "uncoordinated"
    # dB offset when uncoordinated, metres from the target to x_att when coordinated
    delta: float = 0.0
    sigma_db: float = 1.0
    k_samples: int = 10
    area_m: float = 25.0
    n_deployments: int = 1000
    n_attacker_draws: int = 50
    seed: int = 0
    channel: ChannelParams = field(default_factory=ChannelParams)
    vote_weighting: str = "as-printed"

    def __post_init__(self):
        problems = []
        if self.attack_kind not in ATTACK_KINDS:
            problems.append(f"attack_kind must be one of {ATTACK_KINDS}, got {self.attack_kind!r}")
        if self.vote_weighting not in VOTE_WEIGHTINGS:
            problems.append(f"vote_weighting must be one of {VOTE_WEIGHTINGS}, got {self.vote_weighting!r}")
        if self.n_anchors < 3:
            problems.append(f"n_anchors must be >= 3, got {self.n_anchors}")
        if not 0 <= self.n_malicious < self.n_anchors:
            problems.append(f"n_malicious must be in [0, n_anchors), got {self.n_malicious}")
        for name in ("k_samples", "n_deployments", "n_attacker_draws"):
            if getattr(self, name) < 1:
                problems.append(f"{name} must be >= 1, got {getattr(self, name)}")
        if not self.area_m > 0:
            problems.append(f"area_m must be > 0, got {self.area_m}")
        if not self.sigma_db >= 0:
            problems.append(f"sigma_db must be >= 0, got {self.sigma_db}")
        if not math.isfinite(self.delta):
            problems.append(f"delta must be finite, got {self.delta}")
        elif self.attack_kind == "coordinated" and self.delta < 0:
            problems.append(f"delta must be >= 0 for coordinated attacks, got {self.delta}")
        if problems:
            raise ValueError("; ".join(problems))

    @property
    def params(self) -> ChannelParams:
        return replace(self.channel, sigma_db=self.sigma_db)

    @property
    def n_records(self) -> int:
        return self.n_deployments * self.n_attacker_draws


@dataclass(frozen=True)
class RunRecord:
    deployment: int
    draw: int
    target: tuple[float, float]
    estimate: tuple[float, float] | None
    le: float | None
    true_malicious: tuple[int, ...]
    flagged: tuple[int, ...]
    delta_true: tuple[float, ...]
    delta_hat: tuple[float, ...] | None
    sigma_hat: float | None = None
    error: str | None = None
    wall_ms: float = field(default=0.0, compare=False)

    @property
    def ok(self) -> bool:
        return self.error is None


def _rng(seed: int, *key: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, *key]))


def deploy(config: ScenarioConfig, deployment_index: int):
    """Uniform anchors and target in the square, target kept off the anchors."""
    rng = _rng(config.seed, _DEPLOY, deployment_index)
    side = config.area_m
    pos = rng.uniform(0.0, side, size=(config.n_anchors, 2))
    while True:
        x = rng.uniform(0.0, side, size=2)
        if np.min(np.hypot(*(pos - x).T)) >= MIN_TARGET_ANCHOR_M:
            break
    return make_anchors(pos), x


def _attack_for(config: ScenarioConfig, anchors, x, deployment: int, draw: int) -> AttackSpec:
    rng = _rng(config.seed, _ATTACKERS, deployment, draw)
    if config.attack_kind == "none" or config.n_malicious == 0:
        return AttackSpec.none()
    rows = rng.choice(len(anchors), size=config.n_malicious, replace=False)
    ids = frozenset(anchors[r].id for r in rows)
    if config.attack_kind == "uncoordinated":
        return AttackSpec.uncoordinated(ids, config.delta)
    theta = rng.uniform(0.0, 2.0 * math.pi)
    return AttackSpec.coordinated(ids, coordinated_attack_point(x, config.delta, theta))


def run_record(config: ScenarioConfig, deployment: int, draw: int, anchors=None, x=None, oracle_location: bool = False) -> RunRecord:
    """One Monte Carlo run; failures are captured in ``error`` rather than raised."""
    if anchors is None:
        anchors, x = deploy(config, deployment)
    params = config.params
    target = (float(x[0]), float(x[1]))
    attack = AttackSpec.none()
    try:
        attack = _attack_for(config, anchors, x, deployment, draw)
        delta_true = tuple(float(v) for v in attack.true_offsets(x, anchors, params))
        meas = generate_measurements(x, anchors, params, attack, config.k_samples, [config.seed, _NOISE, deployment, draw])
        t0 = time.perf_counter()
        res = localize(anchors, meas, params, config.vote_weighting)
        wall = 1000.0 * (time.perf_counter() - t0)
        est = res.estimate
        le = float(math.hypot(est[0] - x[0], est[1] - x[1]))
        flagged, delta_hat, sigma_hat = (), None, None
        if meas.k >= 2:
            rep = detect(x if oracle_location else est, anchors, meas, params)
            flagged = tuple(sorted(rep.malicious))
            delta_hat = tuple(float(v) for v in rep.delta_hat)
            sigma_hat = float(rep.sigma_hat)
        return RunRecord(
            deployment, draw, target, (float(est[0]), float(est[1])), le,
            tuple(sorted(attack.malicious_ids)), flagged, delta_true, delta_hat, sigma_hat, None, wall,
        )
    except (ValueError, ArithmeticError) as exc:
        return RunRecord(
            deployment, draw, target, None, None, tuple(sorted(attack.malicious_ids)),
            (), (), None, None, f"{type(exc).__name__}: {exc}",
        )


def _run_deployment(args) -> list[RunRecord]:
    config, d, oracle_location = args
    anchors, x = deploy(config, d)
    return [run_record(config, d, a, anchors, x, oracle_location) for a in range(config.n_attacker_draws)]


def run_campaign(config: ScenarioConfig, threads: int = 1, oracle_location: bool = False) -> list[RunRecord]:
    """N_D x N_A records in (deployment, draw) order, independent of ``threads``.

    ``oracle_location`` feeds the true target to the detector instead of the
    estimate, isolating the intensity estimator from localisation error.
    """
    jobs = [(config, d, oracle_location) for d in range(config.n_deployments)]
    if threads <= 1:
        batches = map(_run_deployment, jobs)
        return [r for batch in batches for r in batch]
    with ProcessPoolExecutor(max_workers=threads) as ex:
        batches = ex.map(_run_deployment, jobs, chunksize=max(1, len(jobs) // (4 * threads)))
        return [r for batch in batches for r in batch]


def _ok(records: Sequence[RunRecord]) -> list[RunRecord]:
    good = [r for r in records if r.ok]
    if not good:
        raise ValueError("no successful records")
    return good


def rmse(records: Sequence[RunRecord]) -> float:
    le = np.array([r.le for r in _ok(records)])
    return float(np.sqrt(np.mean(le**2)))


def detection_rates(records: Sequence[RunRecord]) -> tuple[float | None, float]:
    """(correct-detection rate, false-alarm rate); CDR is None with no attackers."""
    good = [r for r in _ok(records) if r.delta_hat is not None]
    if not good:
        raise ValueError("no records carry detection output")
    hits = n_mal = false = n_hon = 0
    for r in good:
        mal, flag = set(r.true_malicious), set(r.flagged)
        n_all = len(r.delta_true)
        hits += len(flag & mal)
        n_mal += len(mal)
        false += len(flag - mal)
        n_hon += n_all - len(mal)
    cdr = hits / n_mal if n_mal else None
    far = false / n_hon if n_hon else 0.0
    return cdr, far


def le_cdf(records: Sequence[RunRecord]) -> list[tuple[float, float]]:
    le = np.sort([r.le for r in _ok(records)])
    n = len(le)
    return [(float(v), (k + 1) / n) for k, v in enumerate(le)]


def median_le(records: Sequence[RunRecord]) -> float:
    return float(np.median([r.le for r in _ok(records)]))


def armse_delta(records: Sequence[RunRecord]) -> float:
    good = [r for r in _ok(records) if r.delta_hat is not None]
    if not good:
        raise ValueError("no records carry intensity estimates")
    per = [math.sqrt(np.mean((np.array(r.delta_hat) - np.array(r.delta_true)) ** 2)) for r in good]
    return float(np.mean(per))


def failed_count(records: Sequence[RunRecord]) -> int:
    return sum(not r.ok for r in records)
