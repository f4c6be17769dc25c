"""Command-line front end: estimate, ci, profile, simulate, bandwidth.

Exit codes: 0 success, 2 usage or input error, 3 domain error,
4 internal invariant violation. Every printed value is reproducible by
calling the library with the same arguments.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys

import numpy as np

from .errors import INPUT_ERRORS, DyadKDEError
from .estimator import (
    density_estimate,
    density_estimate_incomplete,
    kernel_sums,
    rot_bandwidth,
    rot_bandwidth_incomplete,
)
from .inference import invert_test, mjk_wald_interval
from .kernels import get_kernel
from .montecarlo import (
    BANDWIDTH_RULES,
    METHOD_LABELS,
    SimulationConfig,
    coverage_experiment,
    render_table,
    report_json_dict,
)
from .sample import aggregate_multi_records, from_edge_list

_METHOD_FLAGS = {"jel": "JEL", "mjel": "mJEL", "mjk": "mJK"}


# ---------------------------------------------------------------------------
# small helpers
# ---------------------------------------------------------------------------

def _json_scalar(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return format(v, ".17g") if math.isfinite(v) else "null"
    if isinstance(v, str):
        return json.dumps(v)
    if v is None:
        return "null"
    raise TypeError(f"cannot serialize {type(v).__name__}")


def to_json(value, indent: int = 0) -> str:
    """Deterministic JSON with floats at 17 significant digits."""
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if isinstance(value, dict):
        if not value:
            return "{}"
        parts = [
            f"{inner}{_json_scalar(str(k))}: {to_json(v, indent + 1)}"
            for k, v in value.items()
        ]
        return "{\n" + ",\n".join(parts) + f"\n{pad}}}"
    if isinstance(value, (list, tuple)):
        if not len(value):
            return "[]"
        parts = [f"{inner}{to_json(v, indent + 1)}" for v in value]
        return "[\n" + ",\n".join(parts) + f"\n{pad}]"
    return _json_scalar(value)


def _alpha_arg(text: str) -> float:
    value = float(text)
    if not 0.0 < value < 1.0:
        raise argparse.ArgumentTypeError(f"alpha must lie in (0,1), got {text}")
    return value


def read_edge_csv(path: str) -> list[tuple[str, str, float]]:
    """Rows of a `i,j,value` edge-list CSV, labels kept as strings."""
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"{path}: empty file, expected header i,j,value") from None
        if [c.strip().lower() for c in header] != ["i", "j", "value"]:
            raise ValueError(
                f"{path}: expected header 'i,j,value', got {','.join(header)!r}"
            )
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) != 3:
                raise ValueError(f"{path}:{lineno}: expected 3 columns")
            try:
                value = float(row[2])
            except ValueError:
                raise ValueError(
                    f"{path}:{lineno}: bad value {row[2]!r}"
                ) from None
            rows.append((row[0].strip(), row[1].strip(), value))
    return rows


def map_labels(rows) -> tuple[list[tuple[int, int, float]], int, dict[str, int]]:
    """Stable mapping of vertex labels to 1..n (numeric-aware sorting)."""
    labels = {lab for row in rows for lab in row[:2]}
    try:
        ordered = sorted(labels, key=int)
    except ValueError:
        ordered = sorted(labels)
    label_map = {lab: k + 1 for k, lab in enumerate(ordered)}
    records = [(label_map[a], label_map[b], v) for a, b, v in rows]
    return records, len(ordered), label_map


def _build_sample(args):
    rows = read_edge_csv(args.csv)
    records, n, label_map = map_labels(rows)
    if getattr(args, "aggregate", None):
        sample = aggregate_multi_records(records, args.aggregate, n)
    else:
        sample = from_edge_list(records, n)
    return sample, label_map


def _pick_bandwidth(sample, h_flag):
    if h_flag is not None:
        return float(h_flag), "fixed"
    if sample.complete():
        return rot_bandwidth(sample), "rot-complete"
    return rot_bandwidth_incomplete(sample), "rot-incomplete"


def _sample_meta(sample, label_map):
    return {
        "n": sample.n,
        "observed_edges": sample.observed_count,
        "p_hat": sample.observed_fraction(),
        "label_map": {str(k): v for k, v in label_map.items()},
    }


def _threads_from_env() -> int:
    raw = os.environ.get("DYADKDE_THREADS", "").strip()
    if not raw:
        return 1
    value = int(raw)
    if value < 0:
        raise ValueError(f"DYADKDE_THREADS must be >= 0, got {raw}")
    return value


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_estimate(args) -> int:
    sample, label_map = _build_sample(args)
    kernel = get_kernel(args.kernel)
    h, rule = _pick_bandwidth(sample, args.h)
    sums = kernel_sums(sample, kernel, args.x, h)
    if sample.complete():
        theta = density_estimate(sums, sample.n)
    else:
        theta = density_estimate_incomplete(sums, sample.n)
    if args.format == "json":
        payload = {
            "theta_hat": theta,
            "x": args.x,
            "bandwidth": h,
            "bandwidth_rule": rule,
            "kernel": kernel.name,
            **_sample_meta(sample, label_map),
        }
        print(to_json(payload))
    else:
        print(f"theta_hat: {theta!r}")
        print(f"x: {args.x!r}")
        print(f"bandwidth: {h!r}")
        print(f"bandwidth rule: {rule}")
        print(f"kernel: {kernel.name}")
        print(f"n: {sample.n}")
        print(f"observed edges: {sample.observed_count}")
        print(f"p_hat: {sample.observed_fraction()!r}")
    return 0


def cmd_ci(args) -> int:
    sample, label_map = _build_sample(args)
    kernel = get_kernel(args.kernel)
    h, rule = _pick_bandwidth(sample, args.h)
    if args.method == "mjk":
        result = mjk_wald_interval(sample, kernel, args.x, h, args.alpha)
    else:
        result = invert_test(sample, kernel, args.x, h, args.alpha, method=args.method)
    if args.format == "json":
        payload = {
            "method": result.method,
            "theta_hat": result.theta_hat,
            "lower": result.lower,
            "upper": result.upper,
            "statistic_at_theta_hat": result.statistic,
            "alpha": result.alpha,
            "critical_value": result.critical_value,
            "x": args.x,
            "bandwidth": h,
            "bandwidth_rule": rule,
            "kernel": kernel.name,
            **_sample_meta(sample, label_map),
        }
        print(to_json(payload))
    else:
        print(f"method: {result.method}")
        print(f"theta_hat: {result.theta_hat!r}")
        print(f"interval: [{result.lower!r}, {result.upper!r}]")
        print(f"statistic at theta_hat: {result.statistic!r}")
        print(f"alpha: {result.alpha!r}")
        print(f"critical value: {result.critical_value!r}")
        print(f"x: {args.x!r}")
        print(f"bandwidth: {h!r}")
        print(f"bandwidth rule: {rule}")
        print(f"n: {sample.n}")
        print(f"p_hat: {sample.observed_fraction()!r}")
    return 0


def parse_grid(text: str) -> np.ndarray:
    if ":" in text:
        pieces = text.split(":")
        if len(pieces) != 3:
            raise ValueError(f"grid must be min:max:step or a comma list, got {text!r}")
        lo, hi, step = (float(p) for p in pieces)
        if step <= 0 or hi < lo:
            raise ValueError(f"bad grid range {text!r}")
        count = int(math.floor((hi - lo) / step + 0.5)) + 1
        return lo + step * np.arange(count)
    values = np.array(sorted(float(p) for p in text.split(",") if p.strip()))
    if values.size == 0:
        raise ValueError("grid list is empty")
    return values


def cmd_profile(args) -> int:
    sample, label_map = _build_sample(args)
    kernel = get_kernel(args.kernel)
    grid = parse_grid(args.grid)
    h, rule = _pick_bandwidth(sample, args.h)
    methods = [m.strip().lower() for m in args.methods.split(",") if m.strip()]
    for m in methods:
        if m not in _METHOD_FLAGS:
            raise ValueError(f"unknown method {m!r}; choose from jel,mjel,mjk")

    rows = []
    succeeded = 0
    for x in grid:
        for m in methods:
            row = {"x": float(x), "method": _METHOD_FLAGS[m], "h": h}
            try:
                if m == "mjk":
                    res = mjk_wald_interval(sample, kernel, float(x), h, args.alpha)
                else:
                    res = invert_test(sample, kernel, float(x), h, args.alpha, method=m)
            except DyadKDEError as err:
                row.update(
                    {"theta_hat": None, "lower": None, "upper": None,
                     "status": type(err).__name__}
                )
            else:
                row.update(
                    {"theta_hat": res.theta_hat, "lower": res.lower,
                     "upper": res.upper, "status": "ok"}
                )
                succeeded += 1
            rows.append(row)

    meta = {
        "alpha": args.alpha,
        "kernel": kernel.name,
        "bandwidth": h,
        "bandwidth_rule": rule,
        **_sample_meta(sample, label_map),
    }
    if args.format == "json":
        print(to_json({"metadata": meta, "rows": rows}))
    else:
        print("x,method,theta_hat,lower,upper,h,status")
        for row in rows:
            cells = [
                repr(row["x"]),
                row["method"],
                "" if row["theta_hat"] is None else repr(row["theta_hat"]),
                "" if row["lower"] is None else repr(row["lower"]),
                "" if row["upper"] is None else repr(row["upper"]),
                repr(row["h"]),
                row["status"],
            ]
            print(",".join(cells))
    return 0 if succeeded else 3


def _load_config_file(path: str) -> dict[str, str]:
    out = {}
    with open(path, encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key=value")
            key, value = line.split("=", 1)
            out[key.strip()] = value.strip()
    return out


def _simulation_config(args) -> SimulationConfig:
    settings: dict[str, str] = {}
    if args.config:
        settings.update(_load_config_file(args.config))
    for key in ("beta", "n", "p", "reps", "alpha", "x", "seed", "methods",
                "bandwidth", "kernel"):
        value = getattr(args, key, None)
        if value is not None:
            settings[key] = str(value)

    missing = [k for k in ("beta", "n") if k not in settings]
    if missing:
        raise ValueError(f"missing required simulate settings: {', '.join(missing)}")

    p = float(settings.get("p", "1"))
    bandwidth = settings.get("bandwidth")
    fixed_h = None
    if bandwidth is None:
        rule = "rot-complete" if p >= 1.0 else "rot-incomplete"
    elif bandwidth in BANDWIDTH_RULES[:2]:
        rule = bandwidth
    else:
        rule = "fixed"
        fixed_h = float(bandwidth)

    method_text = settings.get("methods", "jel,mjel,mjk")
    methods = []
    for m in method_text.split(","):
        m = m.strip().lower()
        if not m:
            continue
        if m not in _METHOD_FLAGS:
            raise ValueError(f"unknown method {m!r}; choose from jel,mjel,mjk")
        methods.append(_METHOD_FLAGS[m])

    config = SimulationConfig(
        beta=int(settings["beta"]),
        n=int(settings["n"]),
        p=p,
        reps=int(settings.get("reps", "1000")),
        alpha=float(settings.get("alpha", "0.05")),
        x=float(settings.get("x", "1.675")),
        kernel=get_kernel(settings.get("kernel", "epanechnikov")),
        bandwidth_rule=rule,
        fixed_h=fixed_h,
        base_seed=int(settings.get("seed", "0")),
        methods=tuple(methods),
    )
    config.validate()
    return config


def cmd_simulate(args) -> int:
    config = _simulation_config(args)
    report = coverage_experiment(config, threads=_threads_from_env())
    text = to_json(report_json_dict(report)) + "\n"
    with open(args.out, "w", encoding="utf-8") as handle:
        handle.write(text)
    print(render_table(report))
    print(f"wrote {args.out}")
    return 0


def cmd_bandwidth(args) -> int:
    sample, label_map = _build_sample(args)
    if sample.complete():
        h, rule = rot_bandwidth(sample), "rot-complete"
    else:
        h, rule = rot_bandwidth_incomplete(sample), "rot-incomplete"
    if args.format == "json":
        payload = {"h": h, "rule": rule, **_sample_meta(sample, label_map)}
        print(to_json(payload))
    else:
        print(f"h: {h!r}")
        print(f"rule: {rule}")
        print(f"n: {sample.n}")
        print(f"p_hat: {sample.observed_fraction()!r}")
    return 0


# ---------------------------------------------------------------------------
# parser and entry point
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dyadkde",
        description="Dyadic kernel density estimation with jackknife "
        "empirical likelihood inference.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, with_alpha=False, formats=("text", "json")):
        p.add_argument("csv", help="edge-list CSV with header i,j,value")
        p.add_argument("--kernel", default="epanechnikov")
        p.add_argument("--aggregate", choices=("mean", "p95", "max"),
                       help="collapse repeated pair records first")
        p.add_argument("--format", choices=formats, default=formats[0])
        if with_alpha:
            p.add_argument("--alpha", type=_alpha_arg, default=0.05)

    p_est = sub.add_parser("estimate", help="point estimate at one design point")
    add_common(p_est)
    p_est.add_argument("--x", type=float, required=True)
    p_est.add_argument("--h", type=float, default=None,
                       help="bandwidth; rule-of-thumb when omitted")
    p_est.set_defaults(func=cmd_estimate)

    p_ci = sub.add_parser("ci", help="confidence interval at one design point")
    add_common(p_ci, with_alpha=True)
    p_ci.add_argument("--x", type=float, required=True)
    p_ci.add_argument("--h", type=float, default=None)
    p_ci.add_argument("--method", choices=("jel", "mjel", "mjk"), default="mjel")
    p_ci.set_defaults(func=cmd_ci)

    p_prof = sub.add_parser("profile", help="density profile with pointwise CIs")
    add_common(p_prof, with_alpha=True, formats=("csv", "json"))
    p_prof.add_argument("--grid", required=True,
                        help="min:max:step or comma-separated design points")
    p_prof.add_argument("--h", type=float, default=None)
    p_prof.add_argument("--methods", default="mjel")
    p_prof.set_defaults(func=cmd_profile)

    p_sim = sub.add_parser("simulate", help="Monte Carlo coverage experiment")
    p_sim.add_argument("--config", help="key=value config file; flags override")
    p_sim.add_argument("--beta", type=int)
    p_sim.add_argument("--n", type=int)
    p_sim.add_argument("--p", type=float)
    p_sim.add_argument("--reps", type=int)
    p_sim.add_argument("--alpha", type=_alpha_arg)
    p_sim.add_argument("--x", type=float)
    p_sim.add_argument("--seed", type=int)
    p_sim.add_argument("--methods", help="comma list from jel,mjel,mjk")
    p_sim.add_argument("--bandwidth",
                       help="rot-complete, rot-incomplete, or a fixed value")
    p_sim.add_argument("--kernel")
    p_sim.add_argument("--out", default="coverage.json")
    p_sim.set_defaults(func=cmd_simulate)

    p_bw = sub.add_parser("bandwidth", help="rule-of-thumb bandwidth for a file")
    add_common(p_bw)
    p_bw.set_defaults(func=cmd_bandwidth)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except INPUT_ERRORS as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except DyadKDEError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    except (OSError, ValueError, csv.Error) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # pragma: no cover - internal invariant violation
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 4


def entry() -> None:
    sys.exit(main())
