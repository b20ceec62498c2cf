"""Command-line interface: simulate data, run the threshold and changepoint tests, verify the limit theory.

Subcommands::

    seqemp gen --config gen.ini [--seed S] [--out data.csv]
    seqemp setar-test data.csv [--config test.ini] [--seed S] [--out report.json] [--plot-data t.csv]
    seqemp cpt-test data.csv [--config test.ini] [--seed S] [--workers K] [--out ...] [--plot-data ...]
    seqemp verify {moment,modulus,fidi,entropy} --config v.ini [--seed S] [--out ...] [--plot-data ...]
    seqemp quantiles --functional {ks,cvm} --levels 0.9,0.95 --reps R --seed S [--out q.json]

Configuration files are INI-style (``key = value`` lines grouped in
``[section]`` blocks).  Values are parsed as JSON when possible
(``n = 500``, ``n_list = [64, 256]``, ``weights = null``) and kept as plain
strings otherwise (``kind = gaussian``).  A ``.json`` file holding an object
of sections is accepted as well.

Exit status: 0 on success (tests: null retained), 2 when a test rejects,
1 on any error.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import json
import sys
from pathlib import Path

import jsonschema

from . import __version__
from ._rng import child, seed_path
from .cpt_test import CptConfig, beta_process, run_cpt_test, s_grid_for, z_grid_for
from .entropy import EntropyBudget, check_A1, check_A2_integral
from .exceptions import CholeskyError, CsvFormatError, DegenerateDataError
from .io import read_regression_csv, read_series_csv, write_regression_csv, write_series_csv
from .laws import Law
from .limits import QuantileTable, functional_quantiles
from .report import SCHEMA_VERSION, dumps, jsonable
from .schemas import validate
from .seriesgen import CatalogFunction, Innovation, MixingSpec, gen_regression, gen_setar
from .setar_test import SetarTestConfig, run_setar_test, t_process
from .verify import equicontinuity_modulus, fidi_check, moment_scaling

EXIT_OK, EXIT_ERROR, EXIT_REJECT = 0, 1, 2


class ConfigError(ValueError):
    pass


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------


def _value(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def load_config(path) -> dict:
    """Read a config file into ``{section: {key: value}}``."""
    if path is None:
        return {}
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    if path.suffix.lower() == ".json":
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON: {exc}") from None
        if not isinstance(data, dict) or not all(isinstance(v, dict) for v in data.values()):
            raise ConfigError(f"{path}: expected an object of sections")
        return data
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str
    try:
        parser.read_string(path.read_text(encoding="utf-8"), source=str(path))
    except configparser.Error as exc:
        raise ConfigError(f"{path}: {exc}") from None
    return {sec: {k: _value(v) for k, v in parser.items(sec)} for sec in parser.sections()}


def _section(cfg: dict, name: str) -> dict:
    return dict(cfg.get(name, {}))


def _require(section: dict, key: str, where: str):
    if key not in section or section[key] is None:
        raise ConfigError(f"missing required field '{key}' in section [{where}]")
    return section[key]


def _seed(args, section: dict, where: str):
    if args.seed is not None:
        return seed_path(args.seed)
    if "seed" not in section or section["seed"] is None:
        raise ConfigError(f"missing required field 'seed' in section [{where}] (or pass --seed)")
    return seed_path(section["seed"])


def _known(section: dict, keys, where: str) -> dict:
    extra = set(section) - set(keys)
    if extra:
        raise ConfigError(f"unknown field(s) {sorted(extra)} in section [{where}]")
    return section


def _innovation(cfg) -> Innovation:
    sec = _known(_section(cfg, "innovation"), ("kind", "sigma", "df"), "innovation")
    return Innovation(**sec)


def _function(cfg, name, default=None):
    if name not in cfg:
        return default
    sec = _known(_section(cfg, name), ("kind", "level", "slope", "amplitude", "frequency"), name)
    return CatalogFunction(**sec)


# ---------------------------------------------------------------------------
# output helpers
# ---------------------------------------------------------------------------


def _emit(doc: dict, kind: str, out) -> None:
    validate(doc, kind)
    text = dumps(doc)
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _write_rows(path, header, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([repr(float(v)) if isinstance(v, float) else v for v in row])


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def cmd_gen(args) -> int:
    cfg = load_config(_require_config(args))
    sec = _known(_section(cfg, "gen"), ("kind", "n", "seed", "out"), "gen")
    kind = _require(sec, "kind", "gen")
    n = int(_require(sec, "n", "gen"))
    seed = _seed(args, sec, "gen")
    out = args.out or sec.get("out")
    if not out:
        raise ConfigError("missing required field 'out' in section [gen] (or pass --out)")
    innovation = _innovation(cfg)
    if kind == "setar":
        p = _known(_section(cfg, "setar"), ("mu1", "mu2", "threshold", "burn_in", "y0"), "setar")
        data = gen_setar(
            n, float(p.get("mu1", 0.0)), float(p.get("mu2", 0.0)), float(p.get("threshold", 0.0)),
            innovation, seed, burn_in=int(p.get("burn_in", 0)), y0=p.get("y0"),
        )
        write_series_csv(data, out)
    elif kind == "regression":
        p = _known(_section(cfg, "regression"), ("d", "regressor_law", "change_fraction"), "regression")
        data = gen_regression(
            n, int(p.get("d", 1)),
            mean_fn=_function(cfg, "mean_fn", CatalogFunction()),
            scale_fn=_function(cfg, "scale_fn", CatalogFunction("constant", 1.0)),
            regressor_law=p.get("regressor_law", "uniform"),
            innovation=innovation, seed=seed,
            change_fraction=p.get("change_fraction"),
            mean_fn_after=_function(cfg, "mean_fn_after"),
        )
        write_regression_csv(data, out)
    else:
        raise ConfigError(f"[gen] kind must be 'setar' or 'regression', got {kind!r}")
    sidecar = {
        "schema_version": SCHEMA_VERSION,
        "kind": kind,
        "data_path": str(out),
        "n": n,
        "seed": list(seed),
        "parameters": jsonable(data.origin),
        "artifact_version": __version__,
    }
    validate(sidecar, "gen-sidecar")
    text = dumps(sidecar)
    Path(str(out) + ".json").write_text(text, encoding="utf-8")
    sys.stdout.write(text)
    return EXIT_OK


def _require_config(args):
    if not args.config:
        raise ConfigError("--config is required for this command")
    return args.config


_SETAR_KEYS = ("statistic", "level", "ks_source", "seed", "cvm_table", "cvm_reps", "cvm_resolution",
               "ks_reps", "ks_resolution", "weight_grid", "weights")


def cmd_setar_test(args) -> int:
    cfg = load_config(args.config)
    sec = _known(_section(cfg, "setar_test"), _SETAR_KEYS, "setar_test")
    series = read_series_csv(args.data)
    statistic = sec.get("statistic", "both")
    ks_source = sec.get("ks_source", "series")
    need_seed = (statistic != "KS" and "cvm_table" not in sec) or (ks_source == "table" and statistic != "CvM")
    seed = _seed(args, sec, "setar_test") if need_seed else (
        seed_path(args.seed) if args.seed is not None else (seed_path(sec["seed"]) if "seed" in sec else None))
    cvm_table = ks_table = None
    if statistic != "KS":
        if "cvm_table" in sec:
            cvm_table = QuantileTable.from_dict(json.loads(Path(sec["cvm_table"]).read_text(encoding="utf-8")))
        else:
            cvm_table = functional_quantiles(
                "cvm", (0.90, 0.95, 0.99), int(sec.get("cvm_resolution", 1000)), int(sec.get("cvm_reps", 100_000)),
                child(seed, 1), workers=args.workers,
            )
    if ks_source == "table" and statistic != "CvM":
        ks_table = functional_quantiles(
            "ks", (0.90, 0.95, 0.99), int(sec.get("ks_resolution", 2000)), int(sec.get("ks_reps", 100_000)),
            child(seed, 2), workers=args.workers,
        )
    weights = None
    if "weight_grid" in sec or "weights" in sec:
        weights = (_require(sec, "weight_grid", "setar_test"), _require(sec, "weights", "setar_test"))
    config = SetarTestConfig(
        statistic=statistic, level=float(sec.get("level", 0.05)), weights=weights, ks_source=ks_source,
        ks_table=ks_table, cvm_table=cvm_table, seed=None if seed is None else list(seed),
    )
    report = run_setar_test(series, config)
    if args.plot_data:
        path = t_process(series)
        _write_rows(args.plot_data, ["z", "T_n"], zip(path.z_grid.tolist(), path.values[0].tolist()))
    _emit(report.to_dict(), "test-report", args.out)
    return EXIT_REJECT if report.rejected else EXIT_OK


_CPT_KEYS = ("s_resolution", "z_points", "z_cap", "max_z_points", "reps", "level", "seed")


def cmd_cpt_test(args) -> int:
    cfg = load_config(args.config)
    sec = _known(_section(cfg, "cpt_test"), _CPT_KEYS, "cpt_test")
    sample = read_regression_csv(args.data)
    seed = _seed(args, sec, "cpt_test")
    opts = {k: sec[k] for k in _CPT_KEYS if k in sec and k != "seed"}
    config = CptConfig(**opts, seed=seed, workers=args.workers)
    report = run_cpt_test(sample, config)
    if args.plot_data:
        beta_process(sample, s_grid=s_grid_for(sample.n, config), z_grid=z_grid_for(sample, config)[0]).to_csv(
            args.plot_data
        )
    _emit(report.to_dict(), "test-report", args.out)
    return EXIT_REJECT if report.rejected else EXIT_OK


def _law(sec) -> Law:
    kind = sec.get("law", "uniform")
    if kind == "uniform":
        return Law.uniform(float(sec.get("a", 0.0)), float(sec.get("b", 1.0)))
    if kind == "gaussian":
        return Law.gaussian(float(sec.get("mu", 0.0)), float(sec.get("sigma", 1.0)))
    raise ConfigError(f"unknown law {kind!r}; expected 'uniform' or 'gaussian'")


def cmd_verify(args) -> int:
    cfg = load_config(_require_config(args))
    check = args.check
    sec = _section(cfg, check)
    if check == "moment":
        _known(sec, ("gen", "Q", "tau", "n_list", "reps", "seed"), check)
        res = moment_scaling(
            _require(sec, "gen", check), int(_require(sec, "Q", check)), float(sec.get("tau", 1.0)),
            sec.get("n_list", [64, 256, 1024, 4096]), int(sec.get("reps", 5000)), _seed(args, sec, check),
            workers=args.workers,
        )
        rows = zip(res["n"], res["M"], res["M_se"], res["ratio"])
        header = ["n", "M", "se", "ratio"]
    elif check == "modulus":
        _known(sec, ("law", "a", "b", "mu", "sigma", "Q", "gamma", "delta_list", "n_list", "reps", "seed",
                     "z_grid", "z_points"), check)
        law = _law(sec)
        z_grid = sec.get("z_grid")
        if z_grid is None and "z_points" in sec:
            k = int(sec["z_points"])
            z_grid = law.ppf([(j + 1) / (k + 1) for j in range(k)]).tolist()
        res = equicontinuity_modulus(
            law, int(_require(sec, "Q", check)), float(_require(sec, "gamma", check)),
            _require(sec, "delta_list", check), _require(sec, "n_list", check), int(sec.get("reps", 500)),
            _seed(args, sec, check), z_grid=z_grid, workers=args.workers,
        )
        rows = [(d, n, res["M"][i][j], res["M_se"][i][j])
                for i, d in enumerate(res["delta"]) for j, n in enumerate(res["n"])]
        header = ["delta", "n", "M", "se"]
    elif check == "fidi":
        _known(sec, ("kind", "sigma", "df", "z_pair", "quantiles", "n", "reps", "seed"), check)
        inn = Innovation(sec.get("kind", "gaussian"), float(sec.get("sigma", 1.0)), sec.get("df"))
        res = fidi_check(
            inn, sec.get("z_pair"), int(sec.get("n", 1000)), int(sec.get("reps", 2000)), _seed(args, sec, check),
            quantiles=sec.get("quantiles", [0.3, 0.7]), workers=args.workers,
        )
        rows = [(i, j, res["covariance"][i][j], res["target"][i][j], res["mc_se"][i][j])
                for i in range(2) for j in range(2)]
        header = ["i", "j", "covariance", "target", "se"]
    else:
        _known(sec, ("Q", "gamma", "d", "form", "m", "C", "beta", "c", "rho", "truncation"), check)
        mix = MixingSpec(**{k: sec[k] for k in ("form", "m", "C", "beta", "c", "rho") if k in sec})
        budget = EntropyBudget(int(_require(sec, "Q", check)), float(_require(sec, "gamma", check)),
                               float(sec.get("d", 2.0)), mix)
        a1 = check_A1(budget, int(sec.get("truncation", 100_000))).to_dict()
        a2 = check_A2_integral(budget).to_dict()
        res = {"A1": a1, "A2": a2, "pass": a1["pass"] and a2["pass"]}
        rows = [(r["condition"], r["pass"], r["value"]) for r in (a1, a2)]
        header = ["condition", "pass", "value"]
    if args.plot_data:
        _write_rows(args.plot_data, header, rows)
    _emit({"schema_version": SCHEMA_VERSION, "check": check, "result": jsonable(res)}, "verify-report", args.out)
    return EXIT_OK


def cmd_quantiles(args) -> int:
    levels = [float(v) for v in args.levels.split(",")]
    if args.seed is None:
        raise ConfigError("missing required field 'seed' (pass --seed)")
    table = functional_quantiles(args.functional, levels, args.resolution, args.reps, seed_path(args.seed),
                                 workers=args.workers)
    _emit({"schema_version": SCHEMA_VERSION, **table.to_dict()}, "quantile-table", args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------


def _seed_arg(text: str):
    parts = [int(p) for p in text.split(",")]
    seed_path(parts)
    return parts[0] if len(parts) == 1 else parts


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="INI or JSON configuration file")
    common.add_argument("--seed", type=_seed_arg, help="master seed (overrides the config)")
    common.add_argument("--workers", type=int, default=1, help="Monte Carlo worker processes")
    common.add_argument("--out", help="output path (JSON report; CSV data for gen); default stdout")
    common.add_argument("--plot-data", dest="plot_data", help="also write plot data as CSV to this path")

    p = argparse.ArgumentParser(prog="seqemp", description=__doc__.split("\n")[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("gen", parents=[common], help="simulate a series or regression sample").set_defaults(func=cmd_gen)
    for name, fn, what in (("setar-test", cmd_setar_test, "threshold test for a SETAR(1) series (t,y CSV)"),
                           ("cpt-test", cmd_cpt_test, "changepoint test for a regression sample (t,y,x1.. CSV)")):
        sp = sub.add_parser(name, parents=[common], help=what)
        sp.add_argument("data", help="input CSV")
        sp.set_defaults(func=fn)
    sp = sub.add_parser("verify", parents=[common], help="Monte Carlo / closed-form verification reports")
    sp.add_argument("check", choices=("moment", "modulus", "fidi", "entropy"))
    sp.set_defaults(func=cmd_verify)
    sp = sub.add_parser("quantiles", parents=[common], help="Monte Carlo quantiles of bridge functionals")
    sp.add_argument("--functional", required=True, choices=("ks", "cvm"))
    sp.add_argument("--levels", default="0.9,0.95,0.99")
    sp.add_argument("--reps", type=int, default=100_000)
    sp.add_argument("--resolution", type=int, default=2000)
    sp.set_defaults(func=cmd_quantiles)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.workers < 1:
        print("error: --workers must be positive", file=sys.stderr)
        return EXIT_ERROR
    try:
        return args.func(args)
    except (ConfigError, CsvFormatError, DegenerateDataError, CholeskyError, ValueError, OSError,
            jsonschema.ValidationError, FloatingPointError, KeyError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
