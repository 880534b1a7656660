"""Batch front-end: JSON experiment config in, CSV/JSON results out.

    treepressure spectral     --config tree.json [--out report.json]
    treepressure pressure     --config run.json  [--out series.csv]
    treepressure sweep        --config sweep.json [--out sweep.csv] [--threads N]
    treepressure oracle-check --config small.json [--seed S]

Exit codes: 0 success, 1 usage/config error, 2 violated mathematical
hypothesis (reducible R, s = 0, empty system), 3 oracle resource cap,
4 oracle mismatch.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import random
import sys
from decimal import Decimal

from . import asymptotics, interaction, oracle, restriction, transfer
from .errors import HypothesisViolationError, ResourceCapError, TreePressureError

EXIT_MISMATCH = 4
CAP_ENV = "TREEPRESSURE_CAP"

COMMON_KEYS = {"tree", "interaction", "mode", "backend"}
ALLOWED_KEYS = {
    "spectral": {"tree"},
    "pressure": COMMON_KEYS | {"n_max", "tau"},
    "sweep": COMMON_KEYS | {"n_max", "tau"},
    "oracle-check": COMMON_KEYS | {"n"},
}
REQUIRED_KEYS = {
    "spectral": {"tree"},
    "pressure": {"tree", "interaction", "n_max"},
    "sweep": {"tree", "interaction", "n_max"},
    "oracle-check": {"tree", "interaction", "n"},
}


class ConfigError(TreePressureError):
    pass


def fmt(x) -> str:
    """12 significant digits, '.' separator, independent of locale."""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, int):
        return str(x)
    if x is None:
        return ""
    return f"{float(x):.12g}"


def _round(x: float) -> float:
    return float(fmt(x))


def load_config(path: str, command: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            cfg = json.load(fh, parse_float=Decimal)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object")
    unknown = set(cfg) - ALLOWED_KEYS[command]
    if unknown:
        raise ConfigError(f"unknown config keys for {command}: {sorted(unknown)}")
    missing = REQUIRED_KEYS[command] - set(cfg)
    if missing:
        raise ConfigError(f"missing config keys for {command}: {sorted(missing)}")
    modes = transfer.MODES + (("both",) if command == "oracle-check" else ())
    if cfg.get("mode", "extendable") not in modes:
        raise ConfigError(f"mode must be one of {modes}, got {cfg['mode']!r}")
    if cfg.get("backend", "log") not in transfer.BACKENDS:
        raise ConfigError(f"backend must be log or exact, got {cfg['backend']!r}")
    for key in ("n_max", "n"):
        if key in cfg and (not isinstance(cfg[key], int) or cfg[key] < 0):
            raise ConfigError(f"{key} must be a nonnegative integer")
    return cfg


def _spec(cfg, seed=None):
    obj = cfg["interaction"]
    if isinstance(obj, dict) and set(obj) == {"random"}:
        params = obj["random"]
        return oracle.random_rational_spec(int(params["d"]), random.Random(params.get("seed", seed or 0)))
    return interaction.from_json(obj)


def _write(text: str, out: str | None):
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _csv(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(v) if not isinstance(v, str) else v for v in row])
    return buf.getvalue()


def cmd_spectral(cfg, args) -> int:
    R = restriction.from_descriptor(cfg["tree"])
    info = restriction.spectral(R)
    report = {
        "k": R.k,
        "class": info.classification.kind.value,
        "period": info.period,
        "lambda": _round(info.lam),
        "residue_table": [list(row) for row in info.residue_table],
        "right_vec": [_round(v) for v in info.right_vec],
        "left_vec": [_round(v) for v in info.left_vec],
    }
    _write(json.dumps(report, indent=2) + "\n", args.out)
    return 0


def series_csv(series: transfer.PressureSeries) -> str:
    return _csv(
        ["n", "L_n", "Delta_n", "logZ_n", "P_n", "ratio_Ln_Deltan"],
        [(r.n, r.L, r.Delta, r.logZ, r.P, r.ratio) for r in series.records],
    )


def cmd_pressure(cfg, args) -> int:
    R = restriction.from_descriptor(cfg["tree"])
    spec = _spec(cfg)
    series = transfer.pressure_series(
        R, spec, cfg["n_max"], cfg.get("mode", "extendable"), cfg.get("backend", "log")
    )
    _write(series_csv(series), args.out)
    echo = sys.stdout if args.out else sys.stderr
    try:
        lam = restriction.spectral(R).lam
    except HypothesisViolationError as exc:
        print(f"bounds unavailable: {exc}", file=echo)
        return 0
    bounds = asymptotics.theorem_bounds(spec, lam)
    print(f"lambda={fmt(lam)} lower_bound={fmt(bounds.lower)} upper_bound={fmt(bounds.upper)}", file=echo)
    if len(series.records) >= 3:
        lim = asymptotics.estimate_limit_pressure(series, float(cfg.get("tau", 1e-3)))
        print(f"estimate={fmt(lim.estimate)} converged={fmt(lim.converged)}", file=echo)
    return 0


def _k_range(tree):
    if "k_range" not in tree:
        return None
    lo, hi = tree["k_range"]
    return range(int(lo), int(hi) + 1)


def cmd_sweep(cfg, args) -> int:
    tree = dict(cfg["tree"])
    k_range = _k_range(tree)
    family = {key: v for key, v in tree.items() if key != "k_range"}
    if family.get("kind") != "explicit" and k_range is None:
        raise ConfigError("sweep tree needs k_range unless kind is explicit")
    spec = _spec(cfg)
    result = asymptotics.sweep_k(
        family,
        spec,
        k_range,
        cfg["n_max"],
        tau=float(cfg.get("tau", 1e-3)),
        mode=cfg.get("mode", "extendable"),
        backend=cfg.get("backend", "log"),
        threads=args.threads,
    )
    rows = []
    for e in result.entries:
        if e.ok:
            rows.append(
                (e.k, e.lam, e.n_max, e.logZ, e.limit.estimate, e.bounds.lower, e.bounds.upper, e.limit.converged, "ok")
            )
        else:
            rows.append((e.k, None, e.n_max, None, None, None, None, None, e.status))
    _write(
        _csv(
            ["k", "lambda", "n_max", "logZ_nmax", "P_nmax", "lower_bound", "upper_bound", "converged", "status"], rows
        ),
        args.out,
    )
    if not any(e.ok for e in result.entries):
        return 2
    return 0


def _caps():
    env = os.environ.get(CAP_ENV)
    if env is None:
        return oracle.DEFAULT_PATTERN_CAP, oracle.DEFAULT_VERTEX_CAP
    try:
        cap = int(env)
    except ValueError:
        raise ConfigError(f"{CAP_ENV} must be an integer, got {env!r}") from None
    return cap, cap


def cmd_oracle_check(cfg, args) -> int:
    R = restriction.from_descriptor(cfg["tree"])
    spec = _spec(cfg, args.seed)
    n = cfg["n"]
    backend = cfg.get("backend", "log")
    mode = cfg.get("mode", "extendable")
    modes = transfer.MODES if mode == "both" else (mode,)
    pattern_cap, vertex_cap = _caps()
    truth = oracle.brute_force_both(R, spec, n, pattern_cap, vertex_cap)
    lines = []
    passed = True
    for m in modes:
        res = transfer.partition_function(R, spec, n, m, backend)
        expected = truth[m]
        if backend == "exact":
            ok = res.exactZ == expected
            got = str(res.exactZ)
        else:
            ref = transfer.log_fraction(expected)
            ok = res.logZ == ref or abs(res.logZ - ref) <= 1e-9 * max(abs(ref), 1.0)
            got = fmt(res.logZ)
        passed &= ok
        lines.append(
            f"{'PASS' if ok else 'FAIL'} mode={m} backend={backend} n={n} "
            f"oracle_Z={expected} oracle_logZ={fmt(transfer.log_fraction(expected))} transfer={got}"
        )
    _write("\n".join(lines) + "\n", args.out)
    return 0 if passed else EXIT_MISMATCH


COMMANDS = {
    "spectral": cmd_spectral,
    "pressure": cmd_pressure,
    "sweep": cmd_sweep,
    "oracle-check": cmd_oracle_check,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="treepressure", description=__doc__.splitlines()[0])
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--config", required=True, help="JSON experiment config")
    parser.add_argument("--out", help="output file (default: stdout)")
    parser.add_argument("--seed", type=int, default=0, help="seed for randomized oracle specs")
    parser.add_argument("--threads", type=int, default=1, help="sweep workers, 0 = auto")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code else 0
    if args.seed < 0 or args.seed >= 2**64:
        print("error: --seed must be an unsigned 64-bit integer", file=sys.stderr)
        return 1
    if args.threads < 0:
        print("error: --threads must be >= 0", file=sys.stderr)
        return 1
    try:
        cfg = load_config(args.config, args.command)
        return COMMANDS[args.command](cfg, args)
    except ResourceCapError as exc:
        print(f"resource cap: {exc}", file=sys.stderr)
        return exc.exit_code
    except TreePressureError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except (KeyError, TypeError, ValueError) as exc:
        print(f"config error: {exc!r}", file=sys.stderr)
        return 1


def entry() -> None:
    sys.exit(main())
