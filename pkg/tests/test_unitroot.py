import numpy as np
import pytest
from statsmodels.tsa.stattools import adfuller
from statsmodels.tsa.stattools import kpss as sm_kpss

from asymadjust.synth import GeneratorSpec, generate
from asymadjust.unitroot import adf, kpss, kpss_auto_bandwidth, schwert_maxlag


def _ar1(T, phi, seed):
    z = np.random.default_rng(seed).standard_normal(T)
    x = np.empty(T)
    x[0] = z[0]
    for t in range(1, T):
        x[t] = phi * x[t - 1] + z[t]
    return x


def _df_ratio_bruteforce(x, deterministic):
    """Dickey-Fuller t-ratio by normal equations, no lags."""
    dx = np.diff(x)
    cols = [x[:-1]]
    n = len(dx)
    if deterministic in ("constant", "trend"):
        cols.append(np.ones(n))
    if deterministic == "trend":
        cols.append(np.arange(n, dtype=float))
    X = np.column_stack(cols)
    xtx_inv = np.linalg.inv(X.T @ X)
    b = xtx_inv @ X.T @ dx
    e = dx - X @ b
    s2 = e @ e / (n - X.shape[1])
    return b[0] / np.sqrt(s2 * xtx_inv[0, 0])


@pytest.mark.parametrize("deterministic", ["none", "constant", "trend"])
def test_adf_lag0_equals_direct_df_ratio(deterministic):
    x = _ar1(300, 0.9, seed=1)
    assert adf(x, deterministic, lags=0).statistic == pytest.approx(_df_ratio_bruteforce(x, deterministic), abs=1e-10)


@pytest.mark.parametrize("deterministic, reg", [("none", "n"), ("constant", "c"), ("trend", "ct")])
@pytest.mark.parametrize("lags", [0, 3, 7])
def test_adf_matches_statsmodels_fixed_lags(deterministic, reg, lags):
    x = _ar1(400, 0.95, seed=lags + 2)
    ours = adf(x, deterministic, lags)
    ref = adfuller(x, maxlag=lags, regression=reg, autolag=None)
    assert ours.statistic == pytest.approx(ref[0], rel=1e-9)
    assert ours.p_value == pytest.approx(ref[1], rel=1e-9)
    assert ours.nobs == ref[3]


def test_adf_auto_lag_matches_statsmodels_aic():
    x = np.cumsum(_ar1(500, 0.5, seed=4))
    ours = adf(x, "constant", "auto")
    ref = adfuller(x, maxlag=schwert_maxlag(500), regression="c", autolag="AIC")
    assert ours.nuisance["lags"] == ref[2]
    assert ours.statistic == pytest.approx(ref[0], rel=1e-9)


def test_adf_too_short():
    with pytest.raises(ValueError, match="too short"):
        adf(np.arange(12.0), lags=3)


@pytest.mark.filterwarnings("ignore::statsmodels.tools.sm_exceptions.InterpolationWarning")
@pytest.mark.parametrize("L", [0, 1, 5, 12])
@pytest.mark.parametrize("deterministic, reg", [("level", "c"), ("trend", "ct")])
def test_kpss_matches_statsmodels(L, deterministic, reg):
    x = _ar1(250, 0.6, seed=L)
    ours = kpss(x, deterministic, L)
    ref = sm_kpss(x, regression=reg, nlags=L)
    assert ours.statistic == pytest.approx(ref[0], rel=1e-10)


def test_kpss_bandwidth_zero_is_naive_variance_sum():
    x = _ar1(100, 0.3, seed=9)
    e = x - x.mean()
    partial = [sum(e[: t + 1]) for t in range(len(e))]
    naive_var = sum(v * v for v in e) / len(e)
    brute = sum(s * s for s in partial) / (len(e) ** 2 * naive_var)
    assert kpss(x, "level", 0).statistic == pytest.approx(brute, rel=1e-12)


def test_kpss_p_value_bounds_and_interpolation():
    rw = np.cumsum(np.random.default_rng(0).standard_normal(959))
    res = kpss(rw)
    assert res.p_direction == "<" and res.p_value == 0.01
    assert res.p_text() == "<0.01"
    assert res.rejects(0.05)
    wn = np.random.default_rng(3).standard_normal(500)
    res = kpss(wn, bandwidth=0)
    assert res.statistic < 0.347
    assert res.p_direction == ">" and res.p_value == 0.1
    assert not res.rejects(0.10)
    # interpolation between table nodes
    from asymadjust.unitroot import KPSS_CRITICAL, KPSS_PVALUES

    assert np.interp(0.463, KPSS_CRITICAL["level"], KPSS_PVALUES) == pytest.approx(0.05)


@pytest.mark.parametrize("a, b", [(3.0, 2.0), (-10.0, 0.01)])
def test_affine_invariance(a, b):
    x = np.cumsum(_ar1(300, 0.2, seed=5))
    assert adf(a + b * x, "constant", 2).statistic == pytest.approx(adf(x, "constant", 2).statistic, abs=1e-8)
    assert kpss(a + b * x, "level", 4).statistic == pytest.approx(kpss(x, "level", 4).statistic, abs=1e-8)


def test_bandwidth_rules():
    assert schwert_maxlag(959) == 21
    assert kpss_auto_bandwidth(959) == 7
    assert kpss_auto_bandwidth(100) == 4


def test_trend_with_noise_kpss_grows_with_sample():
    stats = []
    for T in (200, 800):
        t = np.arange(T, dtype=float)
        x = 0.05 * t + np.random.default_rng(T).standard_normal(T)
        stats.append(kpss(x, "level").statistic)
    assert stats[1] > stats[0]
    assert kpss(0.05 * np.arange(800.0) + np.random.default_rng(1).standard_normal(800)).rejects(0.05)


def test_adf_rejects_white_noise():
    wn = generate(GeneratorSpec("white", 1000, seed=1))
    res = adf(wn)
    assert res.rejects(0.05)
    assert res.statistic < res.critical_values["1%"]


def test_serialization_shape():
    res = kpss(np.cumsum(np.random.default_rng(0).standard_normal(300)))
    d = res.to_dict()
    assert d["p_value"] == {"bound": 0.01, "direction": "<"}
    assert list(d) == ["method", "statistic", "p_value", "nuisance", "nobs", "critical_values", "detail"]
