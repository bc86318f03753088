"""Command-line front end: sweep execution, CSV/JSON emission and the
price-surface export."""

import argparse
import dataclasses
import json
import subprocess
import sys
import time

import numpy as np

from . import __version__
from .harness import (POLICIES, SCENARIOS, RNG_NAME, RunConfig, make_model,
                      run_episode, run_sweep)

CSV_HEADER = "scenario,policy,T,d,seed,replicate,checkpoint_t,cum_regret"


def _fmt(value):
    if isinstance(value, float):
        return f"{value:.6g}"
    return str(value)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="abex",
        description="Run regret sweeps for the adaptive-binning pricing "
                    "policy and its baselines.")
    parser.add_argument("--scenario", default=None,
                        help=f"one of {', '.join(SCENARIOS)}")
    parser.add_argument("--policy", default=None, choices=POLICIES)
    parser.add_argument("--T", action="append", type=int, default=None,
                        help="horizon; repeat the flag for a sweep")
    parser.add_argument("--d", type=int, default=None)
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--replications", type=int, default=None)
    parser.add_argument("--sigma", type=float, default=None)
    parser.add_argument("--m2", type=float, default=None)
    parser.add_argument("--c-delta", dest="c_delta", type=float, default=None)
    parser.add_argument("--workers", type=int, default=None)
    parser.add_argument("--out", default=None)
    parser.add_argument("--surface-out", dest="surface_out", default=None)
    parser.add_argument("--surface-resolution", dest="surface_resolution",
                        type=int, default=None)
    parser.add_argument("--config", default=None,
                        help="flat JSON file with the same keys; flags win")
    return parser


def parse_config(argv):
    """Build a validated RunConfig from CLI flags and an optional JSON file."""
    args = build_parser().parse_args(argv)
    values = {}
    if args.config:
        with open(args.config) as fh:
            file_values = json.load(fh)
        known = {f.name for f in dataclasses.fields(RunConfig)}
        unknown = set(file_values) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        values.update(file_values)
    for f in dataclasses.fields(RunConfig):
        flag = getattr(args, "T" if f.name == "T_list" else f.name, None)
        if flag is not None:
            values[f.name] = flag
    if "T_list" in values:
        values["T_list"] = tuple(values["T_list"])
    if "scenario" in values:
        values["scenario"] = str(values["scenario"])
    return RunConfig(**values).validate()


def emit_results_csv(rows, path):
    """Write sorted result rows with 6-significant-digit decimals."""
    lines = [CSV_HEADER]
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    try:
        with open(path, "w") as fh:
            fh.write("\n".join(lines) + "\n")
    except OSError as exc:
        raise OSError(f"cannot write results to {path}: {exc}")


def surface_grid(resolution):
    # Keep every grid point strictly inside [0, 1) so it locates to a leaf.
    return np.linspace(0.0, 1.0, resolution) * np.nextafter(1.0, 0.0)


def emit_price_surface(policy, model, resolution, path):
    """Write (x1, x2, optimal price, learned greedy price) over a grid.

    The learned price is the exploration-free readout of the trained
    partition: the empirically best grid point of x's leaf, or the fixed
    price at maximal level.
    """
    if resolution < 2:
        raise ValueError("surface resolution must be at least 2")
    xs = surface_grid(resolution)
    lines = ["x1,x2,p_opt,p_learned"]
    for x1 in xs:
        for x2 in xs:
            x = np.array([x1, x2])
            lines.append(",".join(_fmt(v) for v in
                                  (x1, x2, model.clairvoyant_price(x),
                                   policy.greedy_price(x))))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def _version_string():
    try:
        desc = subprocess.run(["git", "describe", "--always", "--dirty"],
                              capture_output=True, text=True, timeout=5)
        if desc.returncode == 0:
            return f"abex {__version__} ({desc.stdout.strip()})"
    except Exception:
        pass
    return f"abex {__version__}"


def write_sidecar(cfg, result, path):
    meta = {
        "config": {f.name: getattr(cfg, f.name)
                   for f in dataclasses.fields(cfg)},
        "rng": RNG_NAME,
        "version": _version_string(),
        "wall_time_s": result.wall_time,
        "mean_final_regret": {str(T): m for T, m in result.mean_final.items()},
        "loglog_slope": result.slope,
    }
    with open(path, "w") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")


def main(argv=None):
    try:
        cfg = parse_config(sys.argv[1:] if argv is None else argv)
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    start = time.perf_counter()
    result = run_sweep(cfg)
    emit_results_csv(result.rows, cfg.out)
    write_sidecar(cfg, result, cfg.out + ".meta.json")

    if cfg.surface_out:
        if cfg.d != 2:
            print("error: price-surface export requires d = 2",
                  file=sys.stderr)
            return 2
        if cfg.policy != "abe":
            print("error: price-surface export requires the abe policy",
                  file=sys.stderr)
            return 2
        trace = run_episode(cfg, cfg.T_list[-1], 0, keep_state=True)
        model = make_model(cfg, np.random.default_rng(0))
        emit_price_surface(trace.policy_state, model,
                           cfg.surface_resolution, cfg.surface_out)

    slope = result.slope if isinstance(result.slope, str) \
        else f"{result.slope:.4f}"
    print(f"scenario {cfg.scenario} / {cfg.policy}: "
          f"{len(result.rows)} rows -> {cfg.out}; log-log slope {slope}; "
          f"{time.perf_counter() - start:.1f}s")
    return 0


if __name__ == "__main__":
    sys.exit(main())
