"""Asymmetric adjustment to long-run equilibrium under long memory."""

from .asymmetry import AsymmetryReport, asym_report, median_stat, rrr_stat, runs_decompose, wave_stat
from .longmemory import MemoryEstimate, gph, local_whittle, periodogram
from .regression import CointegrationFit, EcmFit, OlsFit, ecm, engle_granger, hac_se, ols
from .results import TestResult
from .surrogate import MonteCarloPValue, SurrogateEnsemble, fourier_surrogate, mc_pvalue
from .synth import GeneratorSpec, generate, size_power
from .timeseries import AlignedPair, PriceSeries, align, diff_series, fill_missing, ingest_csv, log_series
from .unitroot import adf, kpss

__version__ = "0.1.0"
