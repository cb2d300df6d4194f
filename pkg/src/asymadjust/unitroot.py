"""Augmented Dickey-Fuller and KPSS tests.

ADF p-values come from MacKinnon's response surfaces (the coefficient
tables shipped with statsmodels); KPSS p-values are interpolated in the
Kwiatkowski et al. critical-value table and reported as one-sided bounds
when the statistic falls off the table.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from statsmodels.tsa.adfvalues import mackinnoncrit, mackinnonp

from .results import TestResult

ADF_DETERMINISTIC = {"none": "n", "constant": "c", "trend": "ct"}

KPSS_PVALUES = np.array([0.10, 0.05, 0.025, 0.01])
KPSS_CRITICAL = {
    "level": np.array([0.347, 0.463, 0.574, 0.739]),
    "trend": np.array([0.119, 0.146, 0.176, 0.216]),
}


def schwert_maxlag(nobs: int) -> int:
    return int(math.floor(12.0 * (nobs / 100.0) ** 0.25))


def kpss_auto_bandwidth(nobs: int) -> int:
    return int(math.floor(4.0 * (nobs / 100.0) ** 0.25))


def _deterministic_columns(n: int, deterministic: str) -> np.ndarray:
    if deterministic == "none":
        return np.empty((n, 0))
    if deterministic == "constant":
        return np.ones((n, 1))
    if deterministic == "trend":
        return np.column_stack([np.ones(n), np.arange(1, n + 1, dtype=float)])
    raise ValueError(f"unknown deterministic case {deterministic!r}")


@dataclass(frozen=True)
class _AdfFit:
    statistic: float
    lags: int
    nobs: int
    aic: float


def _adf_regression(x: np.ndarray, lags: int, deterministic: str, start: int | None = None) -> _AdfFit:
    """Fit dx_t on x_{t-1}, dx_{t-1..t-lags} and deterministic terms.

    ``start`` fixes the first usable index of dx so that regressions with
    different lag counts share one estimation sample.
    """
    dx = np.diff(x)
    first = lags if start is None else start
    n = len(dx) - first
    rows = np.arange(first, len(dx))
    cols = [x[rows]]  # level at t-1, since dx[i] = x[i+1] - x[i]
    for j in range(1, lags + 1):
        cols.append(dx[rows - j])
    design = np.column_stack(cols + [_deterministic_columns(n, deterministic)])
    target = dx[rows]
    q, r = np.linalg.qr(design)
    diag = np.abs(np.diag(r))
    if diag.min() <= 1e-10 * diag.max():
        raise np.linalg.LinAlgError("ADF regression design is rank deficient")
    beta = np.linalg.solve(r, q.T @ target)
    resid = target - design @ beta
    k = design.shape[1]
    ssr = float(resid @ resid)
    sigma2 = ssr / (n - k)
    rinv = np.linalg.inv(r)
    se0 = math.sqrt(sigma2 * float(rinv[0] @ rinv[0]))
    llf = -0.5 * n * (math.log(2 * math.pi) + math.log(ssr / n) + 1.0)
    return _AdfFit(float(beta[0] / se0), lags, n, -2.0 * llf + 2.0 * k)


def adf_statistic(x, deterministic: str = "constant", lags="auto") -> _AdfFit:
    """ADF t-ratio with the lag order resolved (AIC over 0..Schwert bound when 'auto')."""
    x = np.asarray(x, dtype=float)
    if deterministic not in ADF_DETERMINISTIC:
        raise ValueError(f"unknown deterministic case {deterministic!r}")
    if not np.all(np.isfinite(x)):
        raise ValueError("ADF input contains non-finite values")
    T = len(x)
    if lags == "auto":
        ndet = _deterministic_columns(1, deterministic).shape[1]
        maxlag = min(schwert_maxlag(T), (T - 1) // 2 - ndet - 1)
        if maxlag < 0 or T <= 10:
            raise ValueError(f"series of length {T} too short for ADF")
        fits = [_adf_regression(x, k, deterministic, start=maxlag) for k in range(maxlag + 1)]
        best = min(fits, key=lambda f: f.aic).lags
        return _adf_regression(x, best, deterministic)
    lags = int(lags)
    if lags < 0:
        raise ValueError("lags must be non-negative")
    if T <= lags + 10:
        raise ValueError(f"series of length {T} too short for ADF with {lags} lags")
    return _adf_regression(x, lags, deterministic)


def adf(x, deterministic: str = "constant", lags="auto") -> TestResult:
    """Augmented Dickey-Fuller unit-root test.

    Parameters
    ----------
    x : array_like
        Series in levels.
    deterministic : {"none", "constant", "trend"}
        Deterministic terms in the test regression ("trend" means constant
        plus linear trend).
    lags : int or "auto"
        Number of lagged differences; "auto" selects by AIC over
        ``0..floor(12 (T/100)^(1/4))`` on a common sample.
    """
    fit = adf_statistic(x, deterministic, lags)
    reg = ADF_DETERMINISTIC[deterministic]
    return _adf_result(fit, reg, n_integrated=1, method="ADF", deterministic=deterministic,
                       detail=f"MacKinnon (1994) response surface, case '{reg}'")


def _adf_result(fit: _AdfFit, reg: str, n_integrated: int, method: str, deterministic: str,
                detail: str) -> TestResult:
    p = float(mackinnonp(fit.statistic, regression=reg, N=n_integrated))
    crit = mackinnoncrit(N=n_integrated, regression=reg, nobs=fit.nobs)
    return TestResult(
        statistic=fit.statistic,
        p_value=min(max(p, 0.0), 1.0),
        method=method,
        nuisance={"lags": fit.lags, "deterministic": deterministic},
        detail=detail,
        critical_values={"1%": float(crit[0]), "5%": float(crit[1]), "10%": float(crit[2])},
        nobs=fit.nobs,
    )


def kpss_statistic(x, deterministic: str = "level", bandwidth="auto") -> tuple[float, int]:
    x = np.asarray(x, dtype=float)
    T = len(x)
    if T <= 20:
        raise ValueError(f"series of length {T} too short for KPSS")
    if not np.all(np.isfinite(x)):
        raise ValueError("KPSS input contains non-finite values")
    if deterministic == "level":
        resid = x - x.mean()
    elif deterministic == "trend":
        design = np.column_stack([np.ones(T), np.arange(1, T + 1, dtype=float)])
        beta, *_ = np.linalg.lstsq(design, x, rcond=None)
        resid = x - design @ beta
    else:
        raise ValueError(f"unknown deterministic case {deterministic!r}")
    L = kpss_auto_bandwidth(T) if bandwidth == "auto" else int(bandwidth)
    if not 0 <= L < T:
        raise ValueError(f"KPSS bandwidth {L} must lie in [0, {T})")
    lrv = float(resid @ resid) / T
    for lag in range(1, L + 1):
        lrv += 2.0 * (1.0 - lag / (L + 1.0)) * float(resid[lag:] @ resid[:-lag]) / T
    if lrv <= 0:
        raise ValueError("KPSS long-run variance estimate is not positive")
    partial = np.cumsum(resid)
    return float(partial @ partial) / (T * T * lrv), L


def kpss(x, deterministic: str = "level", bandwidth="auto") -> TestResult:
    """KPSS stationarity test with a Bartlett-kernel long-run variance.

    ``bandwidth="auto"`` uses ``floor(4 (T/100)^(1/4))`` lags.
    """
    stat, L = kpss_statistic(x, deterministic, bandwidth)
    crit = KPSS_CRITICAL[deterministic]
    if stat < crit[0]:
        p, direction = float(KPSS_PVALUES[0]), ">"
    elif stat > crit[-1]:
        p, direction = float(KPSS_PVALUES[-1]), "<"
    else:
        p, direction = float(np.interp(stat, crit, KPSS_PVALUES)), "="
    return TestResult(
        statistic=stat,
        p_value=p,
        method="KPSS",
        nuisance={"bandwidth": L, "deterministic": deterministic},
        detail="Kwiatkowski et al. (1992) table, linear interpolation",
        p_direction=direction,
        critical_values={f"{int(round(a * 1000)) / 10:g}%": float(c) for a, c in zip(KPSS_PVALUES, crit)},
        nobs=len(x),
    )
