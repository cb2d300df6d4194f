"""Command-line interface: unit roots, cointegration, long memory and asymmetry tests.

Exit status: 0 success, 1 operational failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import itertools
import sys
import warnings
from pathlib import Path

import numpy as np

from . import __version__
from .asymmetry import STATISTICS, asym_report
from .longmemory import gph, local_whittle
from .pipeline import ConfigError, load_config, run_pipeline
from .regression import LongMemoryWarning, ecm, engle_granger
from .results import dumps
from .surrogate import DEFAULT_SURROGATES, RNG_NAME
from .synth import GeneratorSpec, simulate_pvalues
from .timeseries import align, fill_missing, ingest_csv, log_series
from .unitroot import adf, kpss


def _auto_int(text: str):
    if text.lower() == "auto":
        return "auto"
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer or 'auto', got {text!r}") from None
    if value < 0:
        raise argparse.ArgumentTypeError("value must be non-negative")
    return value


def _float_list(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _csv_options(p: argparse.ArgumentParser):
    p.add_argument("--date-column", default="date")
    p.add_argument("--value-column", default="value")
    p.add_argument("--date-format", default="%Y-%m-%d")


def _load(path: str, args, label: str | None = None, repair: bool = True):
    with open(path, "rb") as fh:
        series = ingest_csv(fh.read(), args.date_column, args.value_column, args.date_format,
                            label=label or Path(path).stem)
    return fill_missing(series) if repair else series


def _emit(text: str, output: str | None):
    if output:
        Path(output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def cmd_ingest(args) -> int:
    series = _load(args.csv, args, args.label, repair=not args.no_repair)
    _emit(series.to_csv(), args.output)
    return 0


def cmd_unitroot(args) -> int:
    s = _load(args.csv, args)
    x = log_series(s).values if args.log else s.values
    out = {"series": s.label, "nobs": len(x)}
    if args.test in ("adf", "both"):
        out["adf"] = adf(x, args.deterministic, args.lags)
    if args.test in ("kpss", "both"):
        out["kpss"] = kpss(x, args.kpss_deterministic, args.bandwidth)
    _emit(dumps(out), args.output)
    return 0


def cmd_cointegrate(args) -> int:
    gas = _load(args.gasoline, args)
    oil = _load(args.oil, args)
    pair = align(log_series(gas), log_series(oil))
    fit = engle_granger(
        pair.y, pair.x,
        hac_bandwidth=args.hac_bandwidth,
        adf_lags=args.lags,
        residual_deterministic=args.residual_deterministic,
        pvalue_table=args.pvalue_table,
        kpss_bandwidth=args.kpss_bandwidth,
        require_unit_roots=args.require_unit_roots,
    )
    out = {"gasoline": gas.label, "oil": oil.label, "nobs": len(pair), "cointegration": fit,
           "lw": local_whittle(fit.ect, args.lw_bandwidth),
           "gph": gph(fit.ect, args.gph_bandwidth)}
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", LongMemoryWarning)
        out["ecm"] = ecm(pair.y, pair.x, fit.ect, args.ecm_lags, contemporaneous=args.ecm_contemporaneous,
                         hac_bandwidth=args.hac_bandwidth, memory_bandwidth=args.lw_bandwidth)
    if args.ect_output:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["date", "value"])
        for t, e in zip(pair.timestamps, fit.ect):
            w.writerow([str(t), repr(float(e))])
        Path(args.ect_output).write_text(buf.getvalue(), encoding="utf-8")
    _emit(dumps(out), args.output)
    return 0


def cmd_longmem(args) -> int:
    s = _load(args.csv, args)
    x = log_series(s).values if args.log else s.values
    out = {"series": s.label, "nobs": len(x)}
    if args.method in ("lw", "both"):
        out["lw"] = local_whittle(x, args.bandwidth)
    if args.method in ("gph", "both"):
        out["gph"] = gph(x, args.bandwidth, args.gph_regressor)
    _emit(dumps(out), args.output)
    return 0


def cmd_asym(args) -> int:
    s = _load(args.csv, args)
    report = asym_report(s.values, args.n, args.seed, keep_null=bool(args.dump_null))
    if args.dump_null:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["test", "replica", "statistic"])
        for name, mc in (("median", report.median), ("wave", report.wave), ("rrr", report.rrr)):
            for i, v in enumerate(mc.null_distribution):
                w.writerow([name, i, repr(float(v))])
        Path(args.dump_null).write_text(buf.getvalue(), encoding="utf-8")
    _emit(dumps({"series": s.label, "nobs": len(s), "rng": RNG_NAME, **report.to_dict()}), args.output)
    return 0


def cmd_pipeline(args) -> int:
    config = load_config(
        args.config,
        n_surrogates=args.n_surrogates,
        seed=args.seed,
        output_dir=Path(args.output_dir) if args.output_dir else None,
        formats=tuple(args.formats.split(",")) if args.formats else None,
        lw_bandwidth=args.lw_bandwidth,
        gph_bandwidth=args.gph_bandwidth,
        hac_bandwidth=args.hac_bandwidth,
        adf_lags=args.lags,
        kpss_bandwidth=args.kpss_bandwidth,
        residual_pvalue_table=args.pvalue_table,
    )
    outcome = run_pipeline(config)
    for failure in outcome.failures:
        print(f"market {failure['market']} failed: {failure['error']}", file=sys.stderr)
    return 0 if outcome.ok else 1


def cmd_simulate(args) -> int:
    tests = [t.strip() for t in args.tests.split(",")]
    unknown = set(tests) - set(STATISTICS)
    if unknown:
        raise argparse.ArgumentTypeError(f"unknown tests {sorted(unknown)}")
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["test", "kind", "d", "phi_up", "phi_down", "length", "replications", "surrogates",
                "alpha", "rejection_rate", "rng", "seed"])
    for d, up, down in itertools.product(args.d, args.phi_up, args.phi_down):
        spec = GeneratorSpec(args.kind, args.length, sigma=args.sigma, d=d, phi_up=up, phi_down=down)
        pvals = simulate_pvalues(spec, args.replications, args.surrogates, args.seed, tests=tests)
        for name in tests:
            rate = float(np.mean(pvals[name] <= args.alpha))
            w.writerow([name, args.kind, d, up, down, args.length, args.replications, args.surrogates,
                        args.alpha, f"{rate:.6g}", RNG_NAME, args.seed])
    _emit(buf.getvalue(), args.output)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="asymadjust", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="parse and repair one price CSV")
    p.add_argument("csv")
    _csv_options(p)
    p.add_argument("--label")
    p.add_argument("--no-repair", action="store_true", help="keep gaps instead of interpolating")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("unitroot", help="ADF and/or KPSS on one series")
    p.add_argument("csv")
    _csv_options(p)
    p.add_argument("--test", choices=("adf", "kpss", "both"), default="both")
    p.add_argument("--log", action="store_true", help="take natural logs first")
    p.add_argument("--deterministic", choices=("none", "constant", "trend"), default="constant")
    p.add_argument("--kpss-deterministic", choices=("level", "trend"), default="level")
    p.add_argument("--lags", type=_auto_int, default="auto")
    p.add_argument("--bandwidth", type=_auto_int, default="auto", help="KPSS Bartlett bandwidth")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_unitroot)

    p = sub.add_parser("cointegrate", help="Engle-Granger fit of log gasoline on log oil")
    p.add_argument("gasoline")
    p.add_argument("oil")
    _csv_options(p)
    p.add_argument("--hac-bandwidth", type=_auto_int, default="auto")
    p.add_argument("--lags", type=_auto_int, default="auto", help="ADF lags")
    p.add_argument("--kpss-bandwidth", type=_auto_int, default="auto")
    p.add_argument("--residual-deterministic", choices=("none", "constant", "trend"), default="none")
    p.add_argument("--pvalue-table", choices=("engle-granger", "adf"), default="engle-granger")
    p.add_argument("--require-unit-roots", action="store_true")
    p.add_argument("--lw-bandwidth", type=_auto_int, default="auto")
    p.add_argument("--gph-bandwidth", type=_auto_int, default="auto")
    p.add_argument("--ecm-lags", default=4, type=lambda s: s if s == "aic" else int(s))
    p.add_argument("--ecm-contemporaneous", action="store_true")
    p.add_argument("--ect-output", help="write the error-correction term as date,value CSV")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_cointegrate)

    p = sub.add_parser("longmem", help="local Whittle and/or GPH estimate of d")
    p.add_argument("csv")
    _csv_options(p)
    p.add_argument("--method", choices=("lw", "gph", "both"), default="both")
    p.add_argument("-m", "--bandwidth", type=_auto_int, default="auto")
    p.add_argument("--gph-regressor", choices=("exact", "log"), default="exact")
    p.add_argument("--log", action="store_true")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_longmem)

    p = sub.add_parser("asym", help="median, wave and RRR tests on an ect series")
    p.add_argument("csv")
    _csv_options(p)
    p.add_argument("-n", type=int, default=DEFAULT_SURROGATES, help="number of surrogates")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--dump-null", help="write the surrogate statistic distributions to this CSV")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_asym)

    p = sub.add_parser("pipeline", help="run all tables for the markets in a config file")
    p.add_argument("config")
    p.add_argument("--n-surrogates", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--output-dir")
    p.add_argument("--formats", help="comma-separated subset of json,csv")
    p.add_argument("--lw-bandwidth", type=_auto_int)
    p.add_argument("--gph-bandwidth", type=_auto_int)
    p.add_argument("--hac-bandwidth", type=_auto_int)
    p.add_argument("--lags", type=_auto_int, help="ADF lags")
    p.add_argument("--kpss-bandwidth", type=_auto_int)
    p.add_argument("--pvalue-table", choices=("engle-granger", "adf"))
    p.set_defaults(func=cmd_pipeline)

    p = sub.add_parser("simulate", help="rejection rates of the asymmetry tests on synthetic processes")
    p.add_argument("--kind", choices=("white", "random_walk", "arfima0d0", "threshold_ar"), default="threshold_ar")
    p.add_argument("--tests", default="median,wave,rrr")
    p.add_argument("--length", type=int, default=959)
    p.add_argument("--d", type=_float_list, default=[0.0], help="comma-separated d grid (arfima0d0)")
    p.add_argument("--phi-up", type=_float_list, default=[0.0], help="comma-separated grid (threshold_ar)")
    p.add_argument("--phi-down", type=_float_list, default=[0.0], help="comma-separated grid (threshold_ar)")
    p.add_argument("--sigma", type=float, default=1.0)
    p.add_argument("--replications", type=int, default=500)
    p.add_argument("--surrogates", type=int, default=500)
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_simulate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (argparse.ArgumentTypeError, ConfigError) as exc:
        parser.print_usage(sys.stderr)
        print(f"{parser.prog}: error: {exc}", file=sys.stderr)
        return 2
    except (OSError, ValueError, RuntimeError, np.linalg.LinAlgError) as exc:
        print(f"{parser.prog} {args.command}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
