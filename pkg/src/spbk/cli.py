"""Command-line surface: fit, simulate, mc and efficiency subcommands.

All flags have config-file counterparts (``--config file.json`` with the
long flag names as keys); explicit flags win.  Exit codes: 0 success,
2 configuration, 3 CSV parsing, 4 numeric/domain, 5 study failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from .backfit import confidence_band, default_grid, full_fit
from .errors import ConfigError, CsvParseError, SpbkError, StudyError
from .io import read_csv_matrix, write_csv
from .kernels import DEFAULT_H_SCALE
from .pilot import choose_knot_count, fit_pilot
from .sample import LagSpec, RegressionSample, fit_domain_map, lag_embed, normalize
from .simulate import (
    McConfig,
    efficiency,
    efficiency_density,
    generate_sample,
    run_mc,
    study_truth,
)

_FIT_DEFAULTS = {
    "input": None,
    "output_dir": ".",
    "lags": None,
    "burn_in": 0,
    "range": "q95",
    "n_knots": None,
    "c": 0.5,
    "Ch": DEFAULT_H_SCALE,
    "level": 0.95,
    "grid": 101,
    "bias_mode": "none",
}

_SIM_DEFAULTS = {
    "example": "ex1",
    "n": 100,
    "d": 3,
    "sigma0": 0.5,
    "seed": 0,
    "output_dir": ".",
}

_MC_DEFAULTS = {
    "example": "ex1",
    "n": 100,
    "d": 3,
    "sigma0": 0.5,
    "c": 0.5,
    "Ch": DEFAULT_H_SCALE,
    "reps": 100,
    "seed": 0,
    "workers": 1,
    "grid": 256,
    "output_dir": ".",
}

_EFF_DEFAULTS = {"spbk": None, "oracle": None, "truth": None, "output": None}


def _build_parser():
    p = argparse.ArgumentParser(
        prog="spbk",
        description="Two-stage additive regression: spline pilot fit plus "
        "kernel re-smoothing, with a seeded replication study driver.",
    )
    sub = p.add_subparsers(dest="command", required=True)

    fit = sub.add_parser("fit", help="fit both stages to a CSV data set")
    fit.add_argument("--input", help="CSV: one series column, or response + predictors")
    fit.add_argument("--lags", help="comma-separated lags to embed a series, e.g. 1,2,3")
    fit.add_argument("--burn-in", dest="burn_in", type=int)
    fit.add_argument("--range", help="observed | q95 | lo,hi (use --range=-2.58,2.58) "
                                     "| per-axis pairs joined by ';'")
    fit.add_argument("--n-knots", dest="n_knots", type=int)
    fit.add_argument("--c", type=float, help="knot-rule constant")
    fit.add_argument("--Ch", type=float, help="bandwidth rule constant")
    fit.add_argument("--level", type=float, help="confidence level for the bands")
    fit.add_argument("--grid", type=int, help="number of evaluation grid points")
    fit.add_argument("--bias-mode", dest="bias_mode", choices=["none", "analytic"])
    fit.add_argument("--output-dir", dest="output_dir")
    fit.add_argument("--config")

    sim = sub.add_parser("simulate", help="write one generated sample plus its truth")
    sim.add_argument("--example", choices=["ex1", "ex2"])
    sim.add_argument("--n", type=int)
    sim.add_argument("--d", type=int)
    sim.add_argument("--sigma0", type=float)
    sim.add_argument("--seed", type=int)
    sim.add_argument("--output-dir", dest="output_dir")
    sim.add_argument("--config")

    mc = sub.add_parser("mc", help="run the seeded replication study")
    mc.add_argument("--example", choices=["ex1", "ex2"])
    mc.add_argument("--n", type=int)
    mc.add_argument("--d", type=int)
    mc.add_argument("--sigma0", type=float)
    mc.add_argument("--c", type=float, help="knot-rule constant")
    mc.add_argument("--Ch", type=float, help="bandwidth rule constant")
    mc.add_argument("--reps", type=int)
    mc.add_argument("--seed", type=int)
    mc.add_argument("--workers", type=int)
    mc.add_argument("--grid", type=int, help="efficiency-density grid size")
    mc.add_argument("--output-dir", dest="output_dir")
    mc.add_argument("--config")

    eff = sub.add_parser(
        "efficiency",
        help="recompute the relative efficiency from stored value columns",
    )
    eff.add_argument("--spbk", help="CSV with the estimator's values")
    eff.add_argument("--oracle", help="CSV with the benchmark smoother's values")
    eff.add_argument("--truth", help="CSV with the true values")
    eff.add_argument("--output", help="write the result as JSON here")
    eff.add_argument("--config")
    return p


def _effective(args, defaults):
    """Merge CLI flags over config-file values over built-in defaults."""
    merged = dict(defaults)
    config_path = getattr(args, "config", None)
    if config_path:
        try:
            with open(config_path, "r", encoding="utf-8") as fh:
                file_values = json.load(fh)
        except (OSError, json.JSONDecodeError) as err:
            raise ConfigError(f"cannot read config file {config_path}: {err}") from err
        if not isinstance(file_values, dict):
            raise ConfigError("config file must hold a JSON object")
        for key, value in file_values.items():
            dest = key.replace("-", "_")
            if dest not in merged:
                raise ConfigError(f"unknown config key {key!r}")
            merged[dest] = value
    for dest in merged:
        value = getattr(args, dest, None)
        if value is not None:
            merged[dest] = value
    return merged


def _parse_range(text, d):
    if text == "observed":
        return "observed", None, None
    if text == "q95":
        return "quantile", 0.95, None
    pairs = []
    for part in str(text).split(";"):
        bits = part.split(",")
        if len(bits) != 2:
            raise ConfigError(f"cannot parse range {text!r}: expected lo,hi pairs")
        try:
            pairs.append((float(bits[0]), float(bits[1])))
        except ValueError as err:
            raise ConfigError(f"cannot parse range {text!r}: {err}") from err
    if len(pairs) == 1:
        pairs = pairs * d
    if len(pairs) != d:
        raise ConfigError(f"range lists {len(pairs)} axes but the data has {d}")
    return "explicit", None, pairs


def _load_input(cfg):
    if not cfg["input"]:
        raise ConfigError("fit requires --input")
    header, data = read_csv_matrix(cfg["input"])
    if data.shape[1] == 1:
        if not cfg["lags"]:
            raise ConfigError("a single-column series needs --lags to embed")
        lags = tuple(int(k) for k in str(cfg["lags"]).split(","))
        return lag_embed(data[:, 0], LagSpec(lags, burn_in=int(cfg["burn_in"])))
    return RegressionSample(data[:, 0], data[:, 1:])


def cmd_fit(args) -> int:
    cfg = _effective(args, _FIT_DEFAULTS)
    if cfg["bias_mode"] == "analytic":
        raise ConfigError(
            "analytic bias centering needs truth derivatives, which a data "
            "CSV cannot supply; use the library API (confidence_band with "
            "BiasInputs)"
        )
    sample = _load_input(cfg)
    mode, q, bounds = _parse_range(cfg["range"], sample.d)
    dmap = fit_domain_map(sample.x, mode=mode, **(
        {"q": q} if q is not None else {"bounds": bounds} if bounds else {}
    ))
    unit, oob = normalize(sample, dmap)
    used = unit.select(~oob)

    n_knots = cfg["n_knots"] or choose_knot_count(used.n, used.d, float(cfg["c"]))
    pilot = fit_pilot(used, n_knots)
    grid = default_grid(int(cfg["grid"]))
    fit = full_fit(used, pilot, grids=[grid] * used.d, h_scale=float(cfg["Ch"]))
    banded = [
        confidence_band(comp, used, fit, level=float(cfg["level"]))
        for comp in fit.components
    ]

    out = cfg["output_dir"]
    os.makedirs(out, exist_ok=True)
    with open(os.path.join(out, "pilot.json"), "w", encoding="utf-8") as fh:
        fh.write(pilot.to_json())
    for a, comp in enumerate(banded):
        write_csv(
            os.path.join(out, f"component_{a + 1}.csv"),
            ["x", "value", "band_lo", "band_hi", "interior"],
            comp.to_csv_rows(dmap),
        )
    summary = {
        "n_rows": sample.n,
        "n_used": used.n,
        "n_out_of_range": int(oob.sum()),
        "d": sample.d,
        "n_knots": n_knots,
        "c_hat": pilot.c_hat,
        "m_hat_c": pilot.m_hat_c,
        "h_per_axis": [comp.h.h for comp in fit.components],
        "dropped_bins": [list(b) for b in pilot.dropped_bins],
        "range_lo": dmap.lo.tolist(),
        "range_hi": dmap.hi.tolist(),
        "level": float(cfg["level"]),
        "grid_points": int(cfg["grid"]),
    }
    with open(os.path.join(out, "summary.json"), "w", encoding="utf-8") as fh:
        json.dump(summary, fh, indent=2)
        fh.write("\n")
    print(f"fit: wrote pilot.json, {used.d} component CSVs and summary.json to {out}")
    return 0


def cmd_simulate(args) -> int:
    cfg = _effective(args, _SIM_DEFAULTS)
    config = McConfig(
        example=cfg["example"],
        n=int(cfg["n"]),
        d=int(cfg["d"]) if cfg["example"] == "ex2" else 3,
        sigma0=float(cfg["sigma0"]),
        replications=1,
        seed=int(cfg["seed"]),
    )
    sample = generate_sample(config, 0)
    truth = study_truth(config)
    t_vals = truth.values_at(sample.x)

    out = cfg["output_dir"]
    os.makedirs(out, exist_ok=True)
    d = sample.d
    write_csv(
        os.path.join(out, "sample.csv"),
        ["y"] + [f"x_{a + 1}" for a in range(d)],
        np.column_stack([sample.y, sample.x]),
    )
    write_csv(
        os.path.join(out, "truth.csv"),
        [f"comp_{a + 1}" for a in range(d)],
        t_vals,
        comments=[f"c_true = {truth.constant:.17g}"],
    )
    print(f"simulate: wrote sample.csv ({sample.n} rows, d={d}) and truth.csv to {out}")
    return 0


def cmd_mc(args) -> int:
    cfg = _effective(args, _MC_DEFAULTS)
    config = McConfig(
        example=cfg["example"],
        n=int(cfg["n"]),
        d=int(cfg["d"]) if cfg["example"] == "ex2" else 3,
        sigma0=float(cfg["sigma0"]),
        c_tuning=float(cfg["c"]),
        replications=int(cfg["reps"]),
        seed=int(cfg["seed"]),
        c_h=float(cfg["Ch"]),
    )
    result = run_mc(config, workers=int(cfg["workers"]))

    out = cfg["output_dir"]
    os.makedirs(out, exist_ok=True)
    rows = []
    for a in range(config.d):
        rows.append((config.sigma0, config.n, config.c_tuning, a + 1, 1,
                     result.mean_ase(1)[a]))
        rows.append((config.sigma0, config.n, config.c_tuning, a + 1, 2,
                     result.mean_ase(2)[a]))
    write_csv(
        os.path.join(out, "ase_table.csv"),
        ["sigma0", "n", "c", "component", "stage", "ase"],
        rows,
    )
    eff_rows = [
        (r, a + 1, result.eff[r, a])
        for r in range(config.replications)
        for a in range(config.d)
        if not np.isnan(result.eff[r, a])
    ]
    write_csv(
        os.path.join(out, "efficiency.csv"),
        ["rep", "component", "efficiency"],
        eff_rows,
    )
    dens_rows = []
    for a in range(config.d):
        grid, dens = efficiency_density(result.eff[:, a], grid_size=int(cfg["grid"]))
        dens_rows.extend((a + 1, x, f) for x, f in zip(grid, dens))
    write_csv(
        os.path.join(out, "efficiency_density.csv"),
        ["component", "x", "density"],
        dens_rows,
    )
    print(
        f"mc: {config.replications} replications done "
        f"({len(result.failed)} failed); wrote ase_table.csv, efficiency.csv, "
        f"efficiency_density.csv to {out}"
    )
    return 0


def _value_column(path):
    header, data = read_csv_matrix(path)
    if header and "value" in header:
        return data[:, header.index("value")]
    if data.shape[1] == 1:
        return data[:, 0]
    raise ConfigError(f"{path}: need a 'value' column or a single-column file")


def cmd_efficiency(args) -> int:
    cfg = _effective(args, _EFF_DEFAULTS)
    for key in ("spbk", "oracle", "truth"):
        if not cfg[key]:
            raise ConfigError(f"efficiency requires --{key}")
    s = _value_column(cfg["spbk"])
    o = _value_column(cfg["oracle"])
    t = _value_column(cfg["truth"])
    if not (s.shape == o.shape == t.shape):
        raise ConfigError("the three value columns must have equal length")
    keep = np.isfinite(s) & np.isfinite(o) & np.isfinite(t)
    value = efficiency(s[keep], o[keep], t[keep])
    print(f"efficiency = {value:.17g}")
    if cfg["output"]:
        with open(cfg["output"], "w", encoding="utf-8") as fh:
            json.dump({"efficiency": value, "points": int(keep.sum())}, fh, indent=2)
            fh.write("\n")
    return 0


_COMMANDS = {
    "fit": cmd_fit,
    "simulate": cmd_simulate,
    "mc": cmd_mc,
    "efficiency": cmd_efficiency,
}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except ConfigError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except CsvParseError as err:
        print(f"error: {err}", file=sys.stderr)
        return 3
    except StudyError as err:
        print(f"error: {err}", file=sys.stderr)
        return 5
    except SpbkError as err:
        print(f"error: {err}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
