"""End-to-end market pipeline: unit roots, cointegration, memory and asymmetry tables.

Configuration is an INI file::

    [pipeline]
    n_surrogates = 10000
    seed = 20140519
    output_dir = reports
    formats = json, csv
    lw_bandwidth = 60

    [market:Belgium]
    gasoline = data/belgium.csv
    oil = data/brent.csv
    oil_label = Brent

Relative paths are resolved against the config file's directory.
"""

from __future__ import annotations

import configparser
import csv
import io
import platform
import warnings
import zlib
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .asymmetry import asym_report
from .longmemory import gph, local_whittle
from .regression import LongMemoryWarning, ecm, engle_granger
from .results import dumps, format_float
from .surrogate import DEFAULT_SURROGATES, RNG_NAME, derive_seed
from .timeseries import align, fill_missing, ingest_csv, log_series
from .unitroot import adf, kpss


class ConfigError(ValueError):
    pass


def _auto_or_int(value):
    if value is None:
        return "auto"
    if isinstance(value, int):
        return value
    text = str(value).strip().lower()
    if text in ("", "auto"):
        return "auto"
    return int(text)


@dataclass(frozen=True)
class Market:
    label: str
    gasoline: Path
    oil: Path
    oil_label: str


@dataclass(frozen=True)
class PipelineConfig:
    markets: tuple[Market, ...]
    n_surrogates: int = DEFAULT_SURROGATES
    seed: int = 0
    output_dir: Path = Path("reports")
    formats: tuple[str, ...] = ("json", "csv")
    adf_lags: object = "auto"
    kpss_bandwidth: object = "auto"
    hac_bandwidth: object = "auto"
    lw_bandwidth: object = "auto"
    gph_bandwidth: object = "auto"
    gph_regressor: str = "exact"
    residual_pvalue_table: str = "engle-granger"
    residual_deterministic: str = "none"
    ecm_lags: object = 4
    date_column: str = "date"
    value_column: str = "value"
    date_format: str = "%Y-%m-%d"
    dump_null: bool = False

    def __post_init__(self):
        if not self.markets:
            raise ConfigError("configuration lists no markets")
        labels = [m.label for m in self.markets]
        if len(set(labels)) != len(labels):
            raise ConfigError("market labels must be unique")
        for m in self.markets:
            if Path(m.gasoline) == Path(m.oil):
                raise ConfigError(f"market {m.label}: gasoline and oil paths must differ")
        bad = set(self.formats) - {"json", "csv"}
        if bad or not self.formats:
            raise ConfigError(f"unknown output formats {sorted(bad)}")

    def market_seed(self, label: str) -> int:
        return derive_seed(self.seed, zlib.crc32(label.encode("utf-8")))

    def settings(self) -> dict:
        return {
            "n_surrogates": self.n_surrogates,
            "seed": self.seed,
            "adf_lags": self.adf_lags,
            "kpss_bandwidth": self.kpss_bandwidth,
            "hac_bandwidth": self.hac_bandwidth,
            "lw_bandwidth": self.lw_bandwidth,
            "gph_bandwidth": self.gph_bandwidth,
            "gph_regressor": self.gph_regressor,
            "residual_pvalue_table": self.residual_pvalue_table,
            "residual_deterministic": self.residual_deterministic,
            "ecm_lags": self.ecm_lags,
        }


_INT_KEYS = ("n_surrogates", "seed")
_AUTO_KEYS = ("adf_lags", "kpss_bandwidth", "hac_bandwidth", "lw_bandwidth", "gph_bandwidth")
_STR_KEYS = ("gph_regressor", "residual_pvalue_table", "residual_deterministic",
             "date_column", "value_column", "date_format")


def load_config(path, **overrides) -> PipelineConfig:
    """Read an INI config; keyword overrides that are not None win over file values."""
    path = Path(path)
    parser = configparser.ConfigParser(interpolation=None)
    with open(path, encoding="utf-8") as fh:
        try:
            parser.read_file(fh)
        except configparser.Error as exc:
            raise ConfigError(f"cannot parse config {path}: {exc}") from None
    base = path.parent
    opts = dict(parser["pipeline"]) if parser.has_section("pipeline") else {}
    kwargs: dict = {}
    try:
        for key in _INT_KEYS:
            if key in opts:
                kwargs[key] = int(opts[key])
        for key in _AUTO_KEYS:
            if key in opts:
                kwargs[key] = _auto_or_int(opts[key])
        for key in _STR_KEYS:
            if key in opts:
                kwargs[key] = opts[key].strip()
        if "ecm_lags" in opts:
            v = opts["ecm_lags"].strip().lower()
            kwargs["ecm_lags"] = v if v == "aic" else int(v)
        if "formats" in opts:
            kwargs["formats"] = tuple(f.strip() for f in opts["formats"].split(",") if f.strip())
        if "dump_null" in opts:
            kwargs["dump_null"] = parser.getboolean("pipeline", "dump_null")
    except ValueError as exc:
        raise ConfigError(f"invalid [pipeline] value: {exc}") from None
    if "output_dir" in opts:
        kwargs["output_dir"] = base / opts["output_dir"].strip()

    markets = []
    for section in parser.sections():
        if not section.startswith("market:"):
            continue
        label = section.split(":", 1)[1].strip()
        sec = parser[section]
        for key in ("gasoline", "oil"):
            if key not in sec:
                raise ConfigError(f"[{section}] is missing {key!r}")
        oil = base / sec["oil"].strip()
        markets.append(Market(label, base / sec["gasoline"].strip(), oil, sec.get("oil_label", oil.stem).strip()))
    kwargs["markets"] = tuple(markets)
    kwargs.update({k: v for k, v in overrides.items() if v is not None})
    return PipelineConfig(**kwargs)


def _read_series(path: Path, config: PipelineConfig, label: str):
    with open(path, "rb") as fh:
        data = fh.read()
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        raw = ingest_csv(data, config.date_column, config.value_column, config.date_format, label=label)
    return raw, fill_missing(raw)


def run_market(market: Market, config: PipelineConfig) -> dict:
    """All table rows and tidy series for one market. Raises on any failure."""
    _, gas = _read_series(market.gasoline, config, market.label)
    _, oil = _read_series(market.oil, config, market.oil_label)
    pair = align(log_series(gas), log_series(oil))

    levels = {}
    for name, values in ((market.label, pair.y), (market.oil_label, pair.x)):
        levels[name] = {
            "adf": adf(values, "constant", config.adf_lags),
            "kpss": kpss(values, "level", config.kpss_bandwidth),
        }

    coint = engle_granger(
        pair.y, pair.x,
        hac_bandwidth=config.hac_bandwidth,
        adf_lags=config.adf_lags,
        residual_deterministic=config.residual_deterministic,
        pvalue_table=config.residual_pvalue_table,
        kpss_bandwidth=config.kpss_bandwidth,
    )
    lw = local_whittle(coint.ect, config.lw_bandwidth)
    gp = gph(coint.ect, config.gph_bandwidth, config.gph_regressor)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", LongMemoryWarning)
        ecm_fit = ecm(pair.y, pair.x, coint.ect, config.ecm_lags,
                      hac_bandwidth=config.hac_bandwidth, memory_bandwidth=config.lw_bandwidth)
    seed = config.market_seed(market.label)
    asym = asym_report(coint.ect, config.n_surrogates, seed, keep_null=config.dump_null)
    return {
        "label": market.label,
        "oil_label": market.oil_label,
        "nobs": len(pair),
        "start": str(pair.timestamps[0]),
        "end": str(pair.timestamps[-1]),
        "imputed": {market.label: int(gas.imputed_mask.sum()), market.oil_label: int(oil.imputed_mask.sum())},
        "levels": levels,
        "cointegration": coint,
        "lw": lw,
        "gph": gp,
        "ecm": ecm_fit,
        "asymmetry": asym,
        "seed": seed,
        "_series": (gas, oil, pair),
    }


def _table1_rows(results: list[dict]) -> list[dict]:
    rows, oil_rows, seen = [], [], set()
    for res in results:
        for name, tests in res["levels"].items():
            row = {"series": name, "adf": tests["adf"], "kpss": tests["kpss"]}
            if name == res["label"]:
                rows.append(row)
            elif name not in seen:
                seen.add(name)
                oil_rows.append(row)
    return rows + oil_rows


def _table2_row(res: dict) -> dict:
    c = res["cointegration"]
    return {
        "country": res["label"],
        "transmission": c.transmission,
        "se": float(c.hac_se[1]),
        "adf": c.residual_adf,
        "kpss": c.residual_kpss,
        "lw": res["lw"],
        "gph": res["gph"],
        "cointegrated": c.cointegrated,
    }


def _json_tables(results: list[dict]) -> dict[str, object]:
    t1 = [
        {
            "series": r["series"],
            "adf": r["adf"].statistic,
            "adf_p": r["adf"].to_dict()["p_value"],
            "adf_lags": r["adf"].nuisance["lags"],
            "kpss": r["kpss"].statistic,
            "kpss_p": r["kpss"].to_dict()["p_value"],
            "kpss_bandwidth": r["kpss"].nuisance["bandwidth"],
        }
        for r in _table1_rows(results)
    ]
    t2 = []
    for res in results:
        r = _table2_row(res)
        t2.append({
            "country": r["country"],
            "transmission": r["transmission"],
            "se": r["se"],
            "adf": r["adf"].statistic,
            "adf_p": r["adf"].to_dict()["p_value"],
            "kpss": r["kpss"].statistic,
            "kpss_p": r["kpss"].to_dict()["p_value"],
            "lwe": r["lw"].d_hat,
            "lwe_se": r["lw"].se,
            "lwe_m": r["lw"].bandwidth,
            "gph": r["gph"].d_hat,
            "gph_se": r["gph"].se,
            "gph_m": r["gph"].bandwidth,
            "cointegrated": r["cointegrated"],
        })
    t3 = [{"country": res["label"], **res["asymmetry"].row()} for res in results]
    return {"table1": t1, "table2": t2, "table3": t3}


def _fmt(x: float) -> str:
    return format_float(x, 4, fixed=True)


def _mc_p_text(p: float) -> str:
    return ">0.1" if p > 0.1 else _fmt(p)


def _csv_text(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _csv_tables(results: list[dict]) -> dict[str, str]:
    t1 = _csv_text(
        ["Country", "ADF", "p-value", "KPSS", "p-value"],
        [[r["series"], _fmt(r["adf"].statistic), _adf_p_text(r["adf"]), _fmt(r["kpss"].statistic), r["kpss"].p_text()]
         for r in _table1_rows(results)],
    )
    rows2 = []
    for res in results:
        r = _table2_row(res)
        rows2.append([r["country"], _fmt(r["transmission"]), _fmt(r["se"]), _fmt(r["adf"].statistic),
                      _adf_p_text(r["adf"]), _fmt(r["kpss"].statistic), r["kpss"].p_text(),
                      r["lw"].cell(), r["gph"].cell()])
    t2 = _csv_text(["Country", "Transmission", "SE", "ADF", "p-value", "KPSS", "p-value", "LWE", "GPH"], rows2)
    rows3 = []
    for res in results:
        a = res["asymmetry"]
        rows3.append([res["label"]] + [v for t in (a.median, a.wave, a.rrr) for v in (_fmt(t.statistic), _mc_p_text(t.p_value))])
    t3 = _csv_text(["Country", "Median test", "p-value", "Wave test", "p-value", "RRR test", "p-value"], rows3)
    return {"table1": t1, "table2": t2, "table3": t3}


def _adf_p_text(res) -> str:
    # MacKinnon p-values above 0.1 or below 0.01 shown as bounds
    if res.p_value > 0.1:
        return ">0.1"
    if res.p_value < 0.01:
        return "<0.01"
    return _fmt(res.p_value)


def _market_record(res: dict) -> dict:
    return {
        "label": res["label"],
        "oil_label": res["oil_label"],
        "nobs": res["nobs"],
        "start": res["start"],
        "end": res["end"],
        "seed": res["seed"],
        "imputed": res["imputed"],
        "levels": {k: {"adf": v["adf"], "kpss": v["kpss"]} for k, v in res["levels"].items()},
        "cointegration": res["cointegration"],
        "memory": {"lw": res["lw"], "gph": res["gph"]},
        "ecm": res["ecm"],
        "asymmetry": res["asymmetry"],
    }


def _series_csvs(results: list[dict], dump_null: bool) -> dict[str, str]:
    prices, ects, nulls = [], [], []
    for res in results:
        gas, oil, pair = res["_series"]
        for s in (gas, oil):
            for t, v, m in zip(s.timestamps, s.values, s.imputed_mask):
                prices.append([res["label"], s.label, str(t), repr(float(v)), int(m)])
        for t, e in zip(pair.timestamps, res["cointegration"].ect):
            ects.append([res["label"], str(t), repr(float(e))])
        if dump_null:
            a = res["asymmetry"]
            for name, mc in (("median", a.median), ("wave", a.wave), ("rrr", a.rrr)):
                for i, v in enumerate(mc.null_distribution):
                    nulls.append([res["label"], name, i, repr(float(v))])
    out = {
        "prices.csv": _csv_text(["market", "series", "date", "value", "imputed"], prices),
        "ect.csv": _csv_text(["market", "date", "ect"], ects),
    }
    if dump_null:
        out["surrogate_null.csv"] = _csv_text(["market", "test", "replica", "statistic"], nulls)
    return out


def _versions() -> dict:
    import statsmodels

    return {
        "asymadjust": __version__,
        "numpy": np.__version__,
        "statsmodels": statsmodels.__version__,
        "python": platform.python_version(),
    }


@dataclass
class PipelineOutcome:
    results: list[dict] = field(default_factory=list)
    failures: list[dict] = field(default_factory=list)
    files: list[Path] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


def run_pipeline(config: PipelineConfig) -> PipelineOutcome:
    """Process every market, isolating failures, and write all report files."""
    outcome = PipelineOutcome()
    for market in config.markets:
        try:
            outcome.results.append(run_market(market, config))
        except Exception as exc:  # per-market isolation
            outcome.failures.append({"market": market.label, "error": f"{type(exc).__name__}: {exc}"})

    out = Path(config.output_dir)
    (out / "markets").mkdir(parents=True, exist_ok=True)

    def write(name: str, text: str):
        path = out / name
        path.write_text(text, encoding="utf-8")
        outcome.files.append(path)

    if "json" in config.formats:
        for name, rows in _json_tables(outcome.results).items():
            write(f"{name}.json", dumps(rows))
        for res in outcome.results:
            write(f"markets/{res['label']}.json", dumps(_market_record(res)))
    if "csv" in config.formats:
        for name, text in _csv_tables(outcome.results).items():
            write(f"{name}.csv", text)
        for name, text in _series_csvs(outcome.results, config.dump_null).items():
            write(name, text)
    meta = {
        "settings": config.settings(),
        "rng": RNG_NAME,
        "market_seeds": {m.label: config.market_seed(m.label) for m in config.markets},
        "markets": [m.label for m in config.markets],
        "completed": [r["label"] for r in outcome.results],
        "failures": outcome.failures,
        "residual_adf_table": config.residual_pvalue_table,
        "versions": _versions(),
    }
    write("run_metadata.json", dumps(meta))
    return outcome

