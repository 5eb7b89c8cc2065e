"""Command-line front end.

Subcommands: simulate | calibrate | price | convergence | hv | regress.

Configuration precedence: CLI flags > config file (--config, JSON) >
built-in defaults.  ``--show-config`` prints the merged configuration and
exits.  The only environment variable honored is VVE_OUTPUT_DIR, which
overrides the default output directory.

Every command is deterministic for a fixed seed and configuration;
re-running produces byte-identical output files.  Errors are emitted to
stderr as JSON with a machine-readable code, and the exit code is 0 iff no
error occurred.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import calibration, io, pricing, sde
from .errors import VveError
from .model import validate_params

DEFAULTS = {
    "simulate": {
        "mu": 0.05, "sigma": 0.2, "c1": 0.0, "s0": 100.0,
        "horizon": 1.0, "steps": 252, "paths": 1000, "seed": 0,
        "scheme": "euler", "out_dir": ".",
    },
    "calibrate": {
        "csv": None, "window": 30, "trading_days": 252, "out_dir": ".",
    },
    "price": {
        "method": "formula,mc", "sigma": 0.2, "c1": 0.0001, "s0": 100.0,
        "r": 0.05, "strike": 100.0, "maturity": 1.0, "t": 0.0,
        "paths": 100000, "steps": 500, "seed": 0, "tol": 1e-10, "out_dir": ".",
    },
    "convergence": {
        "mu": 0.05, "sigma": 0.2, "c1": 0.0, "s0": 100.0, "horizon": 1.0,
        "levels": "64,128,256,512,1024,2048", "paths": 1000, "seed": 0,
        "scheme": "euler,milstein", "reference": "auto", "out_dir": ".",
    },
    "hv": {
        "csv": None, "window": 30, "trading_days": 252, "out_dir": ".",
    },
    "regress": {
        "csv": None, "window": 30, "trading_days": 252, "out_dir": ".",
    },
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vve",
        description="Variable-volatility-elasticity model: simulate, calibrate, price.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(cmd, help_text, options):
        p = sub.add_parser(cmd, help=help_text)
        p.add_argument("--config", help="JSON config file")
        p.add_argument("--show-config", action="store_true",
                       help="print the merged configuration and exit")
        p.add_argument("--out-dir", dest="out_dir", help="output directory")
        for name, typ, help_ in options:
            p.add_argument(f"--{name.replace('_', '-')}", dest=name, type=typ,
                           default=None, help=help_)
        return p

    add("simulate", "simulate price paths", [
        ("mu", float, "drift, per year"),
        ("sigma", float, "base volatility"),
        ("c1", float, "volatility-per-price coefficient"),
        ("s0", float, "initial price"),
        ("horizon", float, "horizon in years"),
        ("steps", int, "time steps"),
        ("paths", int, "number of paths"),
        ("seed", int, "random seed"),
        ("scheme", str, "euler | milstein | exact"),
    ])
    add("calibrate", "calibrate (sigma, c1) from a close-price CSV", [
        ("csv", str, "input CSV (date,close)"),
        ("window", int, "rolling volatility window in trading days"),
        ("trading_days", int, "trading days per year"),
    ])
    add("price", "price a European call", [
        ("method", str, "comma list of formula,mc,bs"),
        ("sigma", float, "base volatility"),
        ("c1", float, "volatility-per-price coefficient"),
        ("s0", float, "spot price"),
        ("r", float, "risk-free rate"),
        ("strike", float, "strike price"),
        ("maturity", float, "maturity in years"),
        ("t", float, "valuation time in years"),
        ("paths", int, "Monte Carlo paths"),
        ("steps", int, "Monte Carlo time steps"),
        ("seed", int, "random seed"),
        ("tol", float, "quadrature absolute tolerance"),
    ])
    add("convergence", "strong-convergence study", [
        ("mu", float, "drift, per year"),
        ("sigma", float, "base volatility"),
        ("c1", float, "volatility-per-price coefficient"),
        ("s0", float, "initial price"),
        ("horizon", float, "horizon in years"),
        ("levels", str, "comma list of step counts, coarse to fine"),
        ("paths", int, "number of paths"),
        ("seed", int, "random seed"),
        ("scheme", str, "comma list of euler,milstein"),
        ("reference", str, "exact | refined | auto"),
    ])
    add("hv", "rolling historical volatility from a close-price CSV", [
        ("csv", str, "input CSV (date,close)"),
        ("window", int, "rolling window in trading days"),
        ("trading_days", int, "trading days per year"),
    ])
    add("regress", "volatility-on-price regression report from a CSV", [
        ("csv", str, "input CSV (date,close)"),
        ("window", int, "rolling window in trading days"),
        ("trading_days", int, "trading days per year"),
    ])
    return parser


def _merge_config(command: str, args: argparse.Namespace) -> dict:
    cfg = dict(DEFAULTS[command])
    if os.environ.get("VVE_OUTPUT_DIR"):
        cfg["out_dir"] = os.environ["VVE_OUTPUT_DIR"]
    if args.config:
        loaded = json.loads(Path(args.config).read_text())
        section = loaded.get(command, {}) if isinstance(loaded.get(command), dict) else {}
        flat = {k: v for k, v in loaded.items() if k in cfg}
        cfg.update(flat)
        cfg.update({k: v for k, v in section.items() if k in cfg})
    for key in cfg:
        value = getattr(args, key, None)
        if value is not None:
            cfg[key] = value
    return cfg


def _out(cfg: dict, name: str) -> Path:
    out_dir = Path(cfg["out_dir"])
    out_dir.mkdir(parents=True, exist_ok=True)
    return out_dir / name


def _require_csv(cfg: dict) -> str:
    if not cfg["csv"]:
        raise VveError("--csv is required for this command")
    return cfg["csv"]


# --------------------------------------------------------------------------
# Command implementations
# --------------------------------------------------------------------------

def cmd_simulate(cfg: dict) -> list[str]:
    params = validate_params(cfg["mu"], cfg["sigma"], cfg["c1"], cfg["s0"])
    grid = sde.TimeGrid(cfg["horizon"], cfg["steps"])
    scheme = cfg["scheme"]
    simulators = {"euler": sde.simulate_euler, "milstein": sde.simulate_milstein,
                  "exact": sde.simulate_exact}
    if scheme not in simulators:
        raise VveError(f"unknown scheme {scheme!r}; expected euler, milstein, or exact")
    ensemble = simulators[scheme](params, grid, cfg["paths"], cfg["seed"])
    paths_file, summary_file = _out(cfg, "paths.csv"), _out(cfg, "summary.json")
    io.ensemble_to_csv(ensemble, paths_file)
    io.write_json(summary_file, io.ensemble_summary(ensemble))
    return [str(paths_file), str(summary_file)]


def cmd_calibrate(cfg: dict) -> list[str]:
    series = io.ingest_csv(_require_csv(cfg))
    window = cfg["window"]
    result = calibration.calibrate_vve(series, window, cfg["trading_days"])
    vols = calibration.rolling_hv(series, window, cfg["trading_days"])
    report = {
        "params": {"mu": result.params.mu, "sigma": result.params.sigma,
                   "c1": result.params.c1, "s0": result.params.s0},
        "regression": result.report.to_dict(),
        "warnings": result.warnings,
        "window": window,
        "trading_days_per_year": cfg["trading_days"],
    }
    json_file, overlay_file = _out(cfg, "calibration.json"), _out(cfg, "overlay.csv")
    io.write_json(json_file, report)
    rows = ([d.isoformat(), io.fmt(c), io.fmt(v)] for d, c, v in
            zip(vols.dates, series.closes[window:], vols.vols))
    io.write_csv(overlay_file, ["date", "close", "hv"], rows)
    return [str(json_file), str(overlay_file)]


def cmd_price(cfg: dict) -> list[str]:
    methods = [m.strip() for m in cfg["method"].split(",") if m.strip()]
    unknown = set(methods) - {"formula", "mc", "bs"}
    if unknown:
        raise VveError(f"unknown pricing method(s): {sorted(unknown)}")
    rn = pricing.RiskNeutralParams(sigma=cfg["sigma"], c1=cfg["c1"],
                                   s0=cfg["s0"], r=cfg["r"])
    opt = pricing.OptionSpec(strike=cfg["strike"], maturity=cfg["maturity"],
                             rate=cfg["r"], t=cfg["t"])
    quotes = {}
    for m in methods:
        if m == "formula":
            quotes[m] = pricing.price_formula(rn, opt, tol=cfg["tol"])
        elif m == "mc":
            quotes[m] = pricing.price_mc(rn, opt, cfg["paths"], cfg["steps"], cfg["seed"])
        else:
            quotes[m] = pricing.price_bs(rn.s0, opt.strike,
                                         opt.maturity - opt.t, rn.r, rn.sigma)
    differences = {}
    names = sorted(quotes)
    for i, m1 in enumerate(names):
        for m2 in names[i + 1:]:
            diff = abs(quotes[m1].price - quotes[m2].price)
            mc_se = None
            for m in (m1, m2):
                if quotes[m].method == "monte_carlo" and quotes[m].error_estimate > 0:
                    mc_se = quotes[m].error_estimate
            differences[f"{m1}_vs_{m2}"] = {
                "abs_diff": diff,
                "se_units": diff / mc_se if mc_se else None,
            }
    report = {
        "spec": {"sigma": rn.sigma, "c1": rn.c1, "s0": rn.s0, "r": rn.r,
                 "strike": opt.strike, "maturity": opt.maturity, "t": opt.t},
        "quotes": {m: q.to_dict() for m, q in quotes.items()},
        "differences": differences,
    }
    json_file = _out(cfg, "price.json")
    io.write_json(json_file, report)
    print(json.dumps(io._round12(report), indent=2, sort_keys=True))
    return [str(json_file)]


def cmd_convergence(cfg: dict) -> list[str]:
    params = validate_params(cfg["mu"], cfg["sigma"], cfg["c1"], cfg["s0"])
    steps = [int(s) for s in cfg["levels"].split(",")]
    horizon = cfg["horizon"]
    dt_levels = [horizon / n for n in steps]
    schemes = [s.strip() for s in cfg["scheme"].split(",") if s.strip()]
    results = {}
    for scheme in schemes:
        rep = sde.strong_convergence(params, horizon, dt_levels, cfg["paths"],
                                     cfg["seed"], scheme=scheme,
                                     reference=cfg["reference"])
        results[scheme] = {"dt_levels": rep.dt_levels,
                           "strong_errors": rep.strong_errors,
                           "fitted_slope": rep.fitted_slope,
                           "reference": rep.reference}
    json_file, csv_file = _out(cfg, "convergence.json"), _out(cfg, "convergence.csv")
    io.write_json(json_file, results)
    header = ["dt"] + [f"error_{s}" for s in schemes]
    rows = ([io.fmt(dt)] + [io.fmt(results[s]["strong_errors"][i]) for s in schemes]
            for i, dt in enumerate(dt_levels))
    io.write_csv(csv_file, header, rows)
    return [str(json_file), str(csv_file)]


def cmd_hv(cfg: dict) -> list[str]:
    series = io.ingest_csv(_require_csv(cfg))
    vols = calibration.rolling_hv(series, cfg["window"], cfg["trading_days"])
    csv_file = _out(cfg, "hv.csv")
    rows = ([d.isoformat(), io.fmt(v)] for d, v in zip(vols.dates, vols.vols))
    io.write_csv(csv_file, ["date", "hv"], rows)
    return [str(csv_file)]


def cmd_regress(cfg: dict) -> list[str]:
    series = io.ingest_csv(_require_csv(cfg))
    window = cfg["window"]
    vols = calibration.rolling_hv(series, window, cfg["trading_days"])
    report = calibration.ols_fit(series.closes[window:], vols.vols)
    json_file = _out(cfg, "regress.json")
    io.write_json(json_file, report.to_dict())
    print(json.dumps(io._round12(report.to_dict()), indent=2, sort_keys=True))
    return [str(json_file)]


HANDLERS = {
    "simulate": cmd_simulate,
    "calibrate": cmd_calibrate,
    "price": cmd_price,
    "convergence": cmd_convergence,
    "hv": cmd_hv,
    "regress": cmd_regress,
}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = _merge_config(args.command, args)
        if args.show_config:
            print(json.dumps(io._round12(cfg), indent=2, sort_keys=True))
            return 0
        written = HANDLERS[args.command](cfg)
        for path in written:
            print(f"wrote {path}", file=sys.stderr)
        return 0
    except VveError as exc:
        print(json.dumps({"error": exc.code, "message": str(exc)}), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
