"""OLS with Newey-West covariance, Engle-Granger cointegration and the ECM diagnostic."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import unitroot
from .longmemory import MemoryEstimate, local_whittle
from .results import TestResult

RANK_TOL = 1e-10
ECM_MAX_AIC_LAG = 8
LONG_MEMORY_THRESHOLD = 0.25


class LongMemoryWarning(UserWarning):
    """The error-correction term is fractionally integrated; ECM estimates are inconsistent."""


@dataclass(frozen=True)
class OlsFit:
    coefficients: np.ndarray
    residuals: np.ndarray
    fitted: np.ndarray
    nobs: int
    design_width: int
    xtx_inv: np.ndarray = field(repr=False)

    @property
    def sigma2(self) -> float:
        return float(self.residuals @ self.residuals) / (self.nobs - self.design_width)

    def classical_se(self) -> np.ndarray:
        return np.sqrt(self.sigma2 * np.diag(self.xtx_inv))


def ols(y, X) -> OlsFit:
    """Least squares via QR, refusing rank-deficient designs."""
    y = np.asarray(y, dtype=float)
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    n, k = X.shape
    if len(y) != n:
        raise ValueError(f"design has {n} rows but y has {len(y)} elements")
    if n <= k:
        raise ValueError(f"need more observations ({n}) than regressors ({k})")
    q, r = np.linalg.qr(X)
    diag = np.abs(np.diag(r))
    scale = np.linalg.norm(X, axis=0)
    if np.any(diag <= RANK_TOL * np.maximum(scale, np.finfo(float).tiny)) or np.any(scale == 0):
        raise np.linalg.LinAlgError("design matrix is not of full column rank")
    beta = np.linalg.solve(r, q.T @ y)
    fitted = X @ beta
    rinv = np.linalg.inv(r)
    return OlsFit(beta, y - fitted, fitted, n, k, rinv @ rinv.T)


def newey_west_bandwidth(nobs: int) -> int:
    return int(math.floor(4.0 * (nobs / 100.0) ** (2.0 / 9.0)))


def hac_covariance(fit: OlsFit, X, bandwidth="auto") -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    if X.shape != (fit.nobs, fit.design_width):
        raise ValueError("design does not match the fit")
    L = newey_west_bandwidth(fit.nobs) if bandwidth in (None, "auto") else int(bandwidth)
    if L < 0:
        raise ValueError("bandwidth must be non-negative")
    if L >= fit.nobs:
        raise ValueError(f"bandwidth {L} must be smaller than nobs {fit.nobs}")
    scores = X * fit.residuals[:, None]
    meat = scores.T @ scores
    for lag in range(1, L + 1):
        gamma = scores[lag:].T @ scores[:-lag]
        meat += (1.0 - lag / (L + 1.0)) * (gamma + gamma.T)
    return fit.xtx_inv @ meat @ fit.xtx_inv


def hac_se(fit: OlsFit, X, bandwidth="auto") -> np.ndarray:
    """Newey-West standard errors with Bartlett weights ``1 - l/(L+1)``.

    ``bandwidth="auto"`` uses ``floor(4 (T/100)^(2/9))``; bandwidth 0 gives
    White's heteroskedasticity-consistent (HC0) errors.
    """
    return np.sqrt(np.diag(hac_covariance(fit, X, bandwidth)))


@dataclass(frozen=True)
class CointegrationFit:
    intercept: float
    transmission: float
    hac_se: np.ndarray
    ect: np.ndarray
    residual_adf: TestResult
    residual_kpss: TestResult
    cointegrated: bool
    hac_bandwidth: int
    input_adf: tuple[TestResult, TestResult] | None = None
    preconditions_met: bool = True
    notes: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {
            "transmission": self.transmission,
            "se": float(self.hac_se[1]),
            "intercept": self.intercept,
            "intercept_se": float(self.hac_se[0]),
            "hac_bandwidth": self.hac_bandwidth,
            "residual_adf": self.residual_adf.to_dict(),
            "residual_kpss": self.residual_kpss.to_dict(),
            "cointegrated": self.cointegrated,
            "preconditions_met": self.preconditions_met,
            "notes": list(self.notes),
        }


def residual_adf(ect, lags="auto", deterministic: str = "none", table: str = "engle-granger") -> TestResult:
    """Unit-root test on cointegrating residuals.

    ``table="engle-granger"`` evaluates the statistic against MacKinnon's
    two-variable cointegration surface (constant in the cointegrating
    regression); ``table="adf"`` uses the ordinary constant-case ADF surface.
    """
    fit = unitroot.adf_statistic(ect, deterministic, lags)
    if table == "engle-granger":
        return unitroot._adf_result(fit, "c", n_integrated=2, method="ADF (Engle-Granger residual)",
                                    deterministic=deterministic,
                                    detail="MacKinnon (1994) cointegration response surface, N=2, case 'c'")
    if table == "adf":
        return unitroot._adf_result(fit, "c", n_integrated=1, method="ADF (residual)",
                                    deterministic=deterministic,
                                    detail="MacKinnon (1994) response surface, N=1, case 'c'")
    raise ValueError(f"unknown residual critical-value table {table!r}")


def engle_granger(
    gas,
    oil,
    *,
    hac_bandwidth="auto",
    adf_lags="auto",
    residual_deterministic: str = "none",
    pvalue_table: str = "engle-granger",
    kpss_bandwidth="auto",
    alpha: float = 0.05,
    require_unit_roots: bool = False,
) -> CointegrationFit:
    """Two-step Engle-Granger procedure on log prices.

    Step one tests both inputs for a unit root (constant-case ADF); step two
    regresses ``gas`` on a constant and ``oil`` and tests the residuals. With
    ``require_unit_roots=True`` a stationary input raises; otherwise the fit
    proceeds and ``preconditions_met`` records the violation.
    """
    gas = np.asarray(gas, dtype=float)
    oil = np.asarray(oil, dtype=float)
    if gas.shape != oil.shape:
        raise ValueError("gas and oil series must have equal length")

    notes = []
    input_tests = (unitroot.adf(gas, "constant", adf_lags), unitroot.adf(oil, "constant", adf_lags))
    preconditions = True
    for name, res in zip(("gas", "oil"), input_tests):
        if res.rejects(alpha):
            preconditions = False
            notes.append(f"{name}: unit root rejected (ADF p={res.p_value:.4g}); input is not I(1)")
    if not preconditions and require_unit_roots:
        raise ValueError("; ".join(notes))

    X = np.column_stack([np.ones(len(oil)), oil])
    fit = ols(gas, X)
    bw = newey_west_bandwidth(fit.nobs) if hac_bandwidth in (None, "auto") else int(hac_bandwidth)
    se = hac_se(fit, X, bw)
    ect = fit.residuals
    r_adf = residual_adf(ect, adf_lags, residual_deterministic, pvalue_table)
    r_kpss = unitroot.kpss(ect, "level", kpss_bandwidth)
    return CointegrationFit(
        intercept=float(fit.coefficients[0]),
        transmission=float(fit.coefficients[1]),
        hac_se=se,
        ect=ect,
        residual_adf=r_adf,
        residual_kpss=r_kpss,
        cointegrated=r_adf.rejects(alpha),
        hac_bandwidth=bw,
        input_adf=input_tests,
        preconditions_met=preconditions,
        notes=tuple(notes),
    )


@dataclass(frozen=True)
class EcmFit:
    lag_order: int
    intercept: float
    gamma: np.ndarray
    delta: np.ndarray
    eta: float
    eta_se: float
    residual_sd: float
    nobs: int
    contemporaneous: float | None = None
    ect_memory: MemoryEstimate | None = None
    long_memory_warning: bool = False

    def to_dict(self) -> dict:
        return {
            "lag_order": self.lag_order,
            "intercept": self.intercept,
            "gamma": list(self.gamma),
            "delta": list(self.delta),
            "eta": self.eta,
            "eta_hac_se": self.eta_se,
            "residual_sd": self.residual_sd,
            "nobs": self.nobs,
            "contemporaneous": self.contemporaneous,
            "ect_memory": self.ect_memory.to_dict() if self.ect_memory else None,
            "long_memory_warning": self.long_memory_warning,
        }


def _ecm_design(g, o, ect, p: int, contemporaneous: bool, first: int):
    dg = np.diff(g)
    do = np.diff(o)
    # dg[i] is the change into level index i+1; ect lagged one step is ect[i]
    rows = np.arange(first, len(dg))
    cols = [np.ones(len(rows))]
    cols += [dg[rows - j] for j in range(1, p + 1)]
    cols += [do[rows - j] for j in range(1, p + 1)]
    if contemporaneous:
        cols.append(do[rows])
    cols.append(ect[rows])
    return dg[rows], np.column_stack(cols)


def _aic(fit: OlsFit) -> float:
    ssr = float(fit.residuals @ fit.residuals)
    n = fit.nobs
    return n * math.log(ssr / n) + 2.0 * fit.design_width


def ecm(
    gas,
    oil,
    ect,
    lag_order=4,
    *,
    contemporaneous: bool = False,
    hac_bandwidth="auto",
    memory_bandwidth="auto",
) -> EcmFit:
    """Estimate the error-correction model by OLS.

    dlog G_t = g0 + sum_j g_j dlog G_{t-j} + sum_j d_j dlog CO_{t-j} + eta ect_{t-1} + u_t

    ``lag_order="aic"`` picks p in 1..8 on a common sample. A
    :class:`LongMemoryWarning` is issued when the local Whittle d of ``ect``
    is at least 0.25, since the regression is then inconsistent.
    """
    g = np.asarray(gas, dtype=float)
    o = np.asarray(oil, dtype=float)
    e = np.asarray(ect, dtype=float)
    if not (len(g) == len(o) == len(e)):
        raise ValueError("gas, oil and ect must have equal length")

    if lag_order == "aic":
        best = None
        for p in range(1, ECM_MAX_AIC_LAG + 1):
            y, X = _ecm_design(g, o, e, p, contemporaneous, first=ECM_MAX_AIC_LAG)
            crit = _aic(ols(y, X))
            if best is None or crit < best[0]:
                best = (crit, p)
        p = best[1]
    else:
        p = int(lag_order)
        if p < 1:
            raise ValueError("lag_order must be at least 1")

    y, X = _ecm_design(g, o, e, p, contemporaneous, first=p)
    if len(y) <= X.shape[1] + 10:
        raise ValueError(f"only {len(y)} observations after lagging for {X.shape[1]} regressors")
    fit = ols(y, X)
    se = hac_se(fit, X, hac_bandwidth)
    beta = fit.coefficients

    memory = None
    flagged = False
    try:
        memory = local_whittle(e, memory_bandwidth)
    except ValueError:
        pass
    if memory is not None and memory.d_hat >= LONG_MEMORY_THRESHOLD:
        flagged = True
        warnings.warn(
            f"error-correction term has d={memory.d_hat:.3f} >= {LONG_MEMORY_THRESHOLD}; "
            "ECM estimates are inconsistent under long memory",
            LongMemoryWarning,
            stacklevel=2,
        )
    return EcmFit(
        lag_order=p,
        intercept=float(beta[0]),
        gamma=beta[1 : p + 1].copy(),
        delta=beta[p + 1 : 2 * p + 1].copy(),
        eta=float(beta[-1]),
        eta_se=float(se[-1]),
        residual_sd=math.sqrt(fit.sigma2),
        nobs=fit.nobs,
        contemporaneous=float(beta[2 * p + 1]) if contemporaneous else None,
        ect_memory=memory,
        long_memory_warning=flagged,
    )
