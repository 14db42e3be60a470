"""Command line: ``sweep``, ``localize`` and ``selftest``.

Config files are flat ``key = value`` text with ``#`` comments. Trace files
hold channel constants as ``key = value`` lines, an optional
``target = x, y`` line and one ``id, x, y, rss_1, ..., rss_K`` row per anchor.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import math
import sys
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Sequence

import numpy as np

from . import simharness as sh
from .detector import detect
from .model import Anchor, ChannelParams, DomainError, MeasurementSet
from .votesolver import localize

EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_NUMERIC = 0, 2, 3, 4


class ConfigError(ValueError):
    pass


class TraceParseError(ValueError):
    def __init__(self, lineno: int, msg: str):
        super().__init__(f"line {lineno}: {msg}")
        self.lineno = lineno


_CONFIG_KEYS = {
    "n_anchors": int,
    "n_malicious": int,
    "attack_kind": str,
    "delta": float,
    "sigma_db": float,
    "k_samples": int,
    "area_m": float,
    "n_deployments": int,
    "n_attacker_draws": int,
    "seed": int,
    "vote_weighting": str,
    "p0_dbm": float,
    "gamma": float,
    "d0_m": float,
}
_CHANNEL_KEYS = ("p0_dbm", "gamma", "d0_m")
_REQUIRED_KEYS = ("n_anchors",)


def _key_values(text: str, what: str):
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{what} line {lineno}: expected key = value, got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        yield lineno, key, value


def config_from_text(text: str) -> sh.ScenarioConfig:
    values: dict[str, object] = {}
    for lineno, key, raw in _key_values(text, "config"):
        if key not in _CONFIG_KEYS:
            raise ConfigError(f"unknown config key {key!r} (line {lineno})")
        try:
            values[key] = _CONFIG_KEYS[key](raw)
        except ValueError:
            raise ConfigError(f"{key}: cannot parse {raw!r} as {_CONFIG_KEYS[key].__name__}") from None
    missing = [k for k in _REQUIRED_KEYS if k not in values]
    if missing:
        raise ConfigError(f"missing required key(s): {', '.join(missing)}")
    chan = {k: values.pop(k) for k in _CHANNEL_KEYS if k in values}
    try:
        channel = ChannelParams(**chan)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    try:
        return sh.ScenarioConfig(channel=channel, **values)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _read_input(path, what: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {what} {str(path)!r}: {exc.strerror or exc}") from None


def parse_config(path) -> sh.ScenarioConfig:
    return config_from_text(_read_input(path, "config"))


# -- traces ------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class TraceFile:
    anchors: list[Anchor]
    samples: np.ndarray
    params: ChannelParams
    target: tuple[float, float] | None = None

    def measurements(self) -> MeasurementSet:
        return MeasurementSet.from_samples([a.id for a in self.anchors], self.samples, self.params)


def _floats(fields: Sequence[str], lineno: int) -> list[float]:
    try:
        return [float(f) for f in fields]
    except ValueError:
        raise TraceParseError(lineno, f"non-numeric field in {','.join(fields)!r}") from None


def read_trace(path) -> TraceFile:
    chan: dict[str, float] = {}
    target = None
    anchors: list[Anchor] = []
    rows: list[list[float]] = []
    for lineno, raw in enumerate(_read_input(path, "trace").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" in line:
            key, value = (s.strip() for s in line.split("=", 1))
            if key == "target":
                xy = _floats([v.strip() for v in value.split(",")], lineno)
                if len(xy) != 2:
                    raise TraceParseError(lineno, "target needs exactly two coordinates")
                target = (xy[0], xy[1])
            elif key in ("p0_dbm", "gamma", "d0_m", "sigma_db"):
                chan[key] = _floats([value], lineno)[0]
            else:
                raise TraceParseError(lineno, f"unknown header key {key!r}")
            continue
        fields = [f.strip() for f in line.split(",")]
        if len(fields) < 4:
            raise TraceParseError(lineno, "anchor row needs id, x, y and at least one RSS sample")
        try:
            aid = int(fields[0])
        except ValueError:
            raise TraceParseError(lineno, f"anchor id {fields[0]!r} is not an integer") from None
        nums = _floats(fields[1:], lineno)
        if rows and len(nums) - 2 != len(rows[0]):
            raise TraceParseError(lineno, f"expected {len(rows[0])} RSS samples, got {len(nums) - 2}")
        if not all(math.isfinite(v) for v in nums):
            raise TraceParseError(lineno, "non-finite value")
        anchors.append(Anchor(aid, (nums[0], nums[1])))
        rows.append(nums[2:])
    if len(anchors) < 3:
        raise ConfigError(f"trace needs at least 3 anchors, got {len(anchors)}")
    if len({a.id for a in anchors}) != len(anchors):
        raise ConfigError("duplicate anchor ids in trace")
    try:
        params = ChannelParams(**chan)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    return TraceFile(anchors, np.array(rows), params, target)


def write_trace(path, anchors: Sequence[Anchor], meas: MeasurementSet, params: ChannelParams, target=None) -> None:
    lines = [
        f"p0_dbm = {params.p0_dbm!r}",
        f"gamma = {params.gamma!r}",
        f"d0_m = {params.d0_m!r}",
    ]
    if target is not None:
        lines.append(f"target = {float(target[0])!r}, {float(target[1])!r}")
    for a, row in zip(anchors, meas.samples):
        lines.append(", ".join([str(a.id), repr(a.pos[0]), repr(a.pos[1])] + [repr(float(v)) for v in row]))
    Path(path).write_text("\n".join(lines) + "\n")


def localize_trace(path, out_csv=None, weighting: str = "as-printed", stream=None) -> dict:
    stream = stream or sys.stdout
    trace = read_trace(path)
    meas = trace.measurements()
    res = localize(trace.anchors, meas, trace.params, weighting)
    est = res.estimate
    report: dict = {"estimate": (float(est[0]), float(est[1])), "detection": None, "le": None}
    print(f"estimate: {float(est[0])!r} {float(est[1])!r}", file=stream)
    if meas.k >= 2:
        rep = detect(est, trace.anchors, meas, trace.params)
        report["detection"] = rep
        print(f"sigma_hat: {rep.sigma_hat!r}", file=stream)
        print("flagged: " + (" ".join(str(i) for i in sorted(rep.malicious)) or "none"), file=stream)
        for a, dh in zip(trace.anchors, rep.delta_hat):
            print(f"anchor {a.id}: delta_hat {float(dh)!r}", file=stream)
    else:
        print("detection unavailable: need at least 2 samples per anchor", file=stream)
    if trace.target is not None:
        le = math.hypot(float(est[0]) - trace.target[0], float(est[1]) - trace.target[1])
        report["le"] = le
        print(f"LE: {le!r}", file=stream)
    if out_csv is not None:
        rep = report["detection"]
        with open(out_csv, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["id", "x", "y", "median_dbm", "dist_est_m", "delta_hat", "p_hat", "flagged"])
            for n, a in enumerate(trace.anchors):
                w.writerow([
                    a.id, repr(a.pos[0]), repr(a.pos[1]), repr(float(meas.median_dbm[n])),
                    repr(float(meas.dist_est_m[n])),
                    "" if rep is None else repr(float(rep.delta_hat[n])),
                    "" if rep is None else repr(float(rep.p_hat[n])),
                    "" if rep is None else int(a.id in rep.malicious),
                ])
    return report


# -- sweeps ------------------------------------------------------------------


def parse_deltas(text: str) -> list[float]:
    """Comma-separated values; ``a:b`` or ``a:b:step`` expands inclusively."""
    out: list[float] = []
    for tok in (t.strip() for t in text.split(",")):
        if not tok:
            continue
        if ":" in tok:
            parts = [float(p) for p in tok.split(":")]
            if len(parts) not in (2, 3) or (len(parts) == 3 and parts[2] <= 0):
                raise ConfigError(f"bad delta range {tok!r}")
            lo, hi = parts[0], parts[1]
            step = parts[2] if len(parts) == 3 else 1.0
            n = int(math.floor((hi - lo) / step + 1e-9)) + 1
            out.extend(lo + k * step for k in range(max(n, 0)))
        else:
            try:
                out.append(float(tok))
            except ValueError:
                raise ConfigError(f"bad delta value {tok!r}") from None
    return out


def _validate_deltas(config: sh.ScenarioConfig, deltas: Sequence[float]) -> None:
    if not deltas:
        raise ConfigError("sweep needs at least one delta value")
    bad = [d for d in deltas if not math.isfinite(d) or (config.attack_kind == "coordinated" and d < 0)]
    if bad:
        raise ConfigError("invalid delta value(s): " + ", ".join(repr(d) for d in bad))


def _fmt(v) -> str:
    return "" if v is None else repr(float(v))


def _delta_label(d: float) -> str:
    return f"{d:g}"


def run_sweep(config: sh.ScenarioConfig, deltas: Sequence[float], out_dir, threads: int = 1, dump_records: bool = False) -> dict:
    deltas = [float(d) for d in deltas]
    _validate_deltas(config, deltas)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    summary: dict[float, dict] = {}
    for d in deltas:
        records = sh.run_campaign(replace(config, delta=d), threads=threads)
        cdr, far = sh.detection_rates(records)
        summary[d] = {
            "rmse": sh.rmse(records),
            "n_records": sum(r.ok for r in records),
            "n_failed": sh.failed_count(records),
            "cdr": cdr,
            "far": far,
            "armse_delta": sh.armse_delta(records),
            "cdf": sh.le_cdf(records),
        }
        label = _delta_label(d)
        with open(out / f"le_cdf_{label}.csv", "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["le", "fraction"])
            w.writerows((_fmt(le), _fmt(f)) for le, f in summary[d]["cdf"])
        if dump_records:
            with open(out / f"records_{label}.jsonl", "w") as fh:
                for r in records:
                    fh.write(json.dumps(dataclasses.asdict(r)) + "\n")

    def table(name, header, cols):
        with open(out / name, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            for d in deltas:
                w.writerow([_fmt(d)] + [c(summary[d]) for c in cols])

    table("rmse_vs_delta.csv", ["delta", "rmse", "n_records"], [lambda s: _fmt(s["rmse"]), lambda s: s["n_records"]])
    table("detection_vs_delta.csv", ["delta", "cdr", "far"], [lambda s: _fmt(s["cdr"]), lambda s: _fmt(s["far"])])
    table("armse_delta_vs_delta.csv", ["delta", "armse_delta"], [lambda s: _fmt(s["armse_delta"])])
    return summary


def load_records(path) -> list[sh.RunRecord]:
    """Read a ``--dump-records`` file back into records."""
    out = []
    with open(path) as fh:
        for line in fh:
            raw = json.loads(line)
            for key in ("target", "estimate", "true_malicious", "flagged", "delta_true", "delta_hat"):
                if raw[key] is not None:
                    raw[key] = tuple(raw[key])
            out.append(sh.RunRecord(**raw))
    return out


# -- entry point ---------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="vsloc", description="Voting-scheme secure RSS localisation experiments.")
    sub = parser.add_subparsers(dest="command", required=True)

    sw = sub.add_parser("sweep", help="run a Monte Carlo campaign per attack intensity and write CSVs")
    sw.add_argument("--config", required=True)
    sw.add_argument("--deltas", required=True, help="e.g. 1,3,5 or 1:15 or 0:10:2")
    sw.add_argument("--out", required=True)
    sw.add_argument("--seed", type=int)
    sw.add_argument("--threads", type=int, default=1)
    sw.add_argument("--dump-records", action="store_true")

    lo = sub.add_parser("localize", help="localise a target from a trace file")
    lo.add_argument("trace")
    lo.add_argument("--out", help="optional per-anchor CSV")
    lo.add_argument("--vote-weighting", default="as-printed", choices=("as-printed", "inverse-proximity"))

    st = sub.add_parser("selftest", help="run the built-in invariant checks")
    st.add_argument("--seed", type=int, default=0)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "sweep":
            config = parse_config(args.config)
            if args.seed is not None:
                config = replace(config, seed=args.seed)
            deltas = parse_deltas(args.deltas)
            run_sweep(config, deltas, args.out, threads=args.threads, dump_records=args.dump_records)
        elif args.command == "localize":
            localize_trace(args.trace, args.out, args.vote_weighting)
        elif args.command == "selftest":
            from .selftest import run_selftest

            return EXIT_OK if run_selftest(seed=args.seed) else EXIT_NUMERIC
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ArithmeticError, DomainError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
